#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pv/verify.hpp"

namespace pv {

// One solve of a parameter sweep. For sweep-mu the parameter is mu and
// dist_ref = dist(x^mu, x*) with x* = argmin H; for sweep-lambda the
// parameter is lambda and dist_ref = |x^lambda - x^mu| against the
// vortex-wave solution on the same grid. threshold is b^mu resp. c^lambda;
// scale is s = (mu pi)^{-1/2} resp. eps = (lambda pi)^{-1/2}.
struct SweepRow {
    double param = 0.0;
    Vec2 x = Vec2::Zero();
    double dist_ref = 0.0;
    double mass_sqrt_scale = 0.0;   // mass in B_sqrt(scale) (mu: around x*)
    double support_diam = 0.0;
    double threshold = 0.0;
    double energy = 0.0;
    double energy_plus_logterm = 0.0;  // E + (1/4pi) ln(scale)
    std::optional<double> l1_to_mu_solution;  // lambda sweeps only
    int iterations = 0;
    bool converged = false;
    std::string verification_json;  // embedded report of the row's solution
    bool verification_pass = false;
};

struct SweepTable {
    std::string kind;  // "sweep-mu" | "sweep-lambda"
    std::vector<SweepRow> rows;
    bool pass = false;  // all rows converged and verified
};

// Solves for each mu in increasing order and records concentration
// diagnostics around x* (argmin H, scan + descent refinement). Infeasible
// rows are emitted with converged = false.
SweepTable mu_sweep(std::shared_ptr<const Grid> grid, const SolverConfig& base,
                    const std::vector<double>& mu_list);

// Solves the Euler pair for each lambda and compares against the vortex-wave
// solution at the same mu on the same grid.
SweepTable lambda_sweep(std::shared_ptr<const Grid> grid, const SolverConfig& base,
                        const std::vector<double>& lambda_list);

// Writes the CSV (header
// param,x1,x2,dist_xstar,mass_sqrt_s,diam,threshold,energy,energy_plus_logterm,l1_to_mu_solution,iters,converged
// one row per line, l1 column empty for mu sweeps) and a JSON summary with
// min/max and trend flags per column next to it (same stem, .json). Throws
// ContractError on an empty table and IoError on unwritable paths.
void emit_report(const SweepTable& table, const std::string& csv_path);

std::string sweep_csv(const SweepTable& table);
std::string sweep_summary_json(const SweepTable& table);

} // namespace pv
