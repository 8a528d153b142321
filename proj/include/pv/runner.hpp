#pragma once

#include "pv/config.hpp"

namespace pv {

// Exit-code contract: 0 all checks pass, 2 solver unconverged, 1 errors or
// failed verification.
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUnconverged = 2;

// Executes the configured command and writes the artifacts into cfg.out_dir:
//   solve:  solution.csv, boundary.csv, verification.json, config.resolved
//   euler:  solution.csv, boundary.csv, euler_report.json, config.resolved
//   verify: verification.json, config.resolved
//   sweeps: sweep.csv, sweep.json, config.resolved
// Identical resolved configs produce byte-identical artifacts.
int run(const RunConfig& cfg);

} // namespace pv
