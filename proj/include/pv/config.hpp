#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pv/geometry.hpp"

namespace pv {

inline constexpr const char* kVersion = "patchvortex 0.1.0";

// Fully resolved run configuration. File values come from a flat
// "key = value" text (strings quoted, lists comma-separated, '#' comments);
// command-line flags override file values; unknown keys are hard errors.
struct RunConfig {
    std::string command;           // solve | euler | verify | sweep-mu | sweep-lambda
    std::string domain_spec = "disk";  // "disk" or "mask:<path>"
    int n = 256;
    double mu = 0.0;
    std::optional<double> lambda;
    std::vector<double> lambda_list;
    std::vector<double> mu_list;
    int max_iters = 200;
    double tol_patch = -1.0;       // area; < 0 means 2.5 cells
    double tol_x = 1e-6;
    std::string x0 = "argmin-H";   // or "x1,x2"
    std::string out_dir = "out";
    std::string field_path;        // verify: solution dump to certify
    std::optional<double> b;       // verify: solver threshold, optional

    std::optional<Vec2> x0_point() const;  // nullopt for "argmin-H"

    // Validates ranges for the resolved command; throws ConfigError with the
    // offending key in the message.
    void validate() const;

    // Canonical flat-text echo (deterministic ordering, version comment).
    std::string to_text() const;
};

// Key/value overrides as collected from the command line.
using ConfigOverrides = std::map<std::string, std::string>;

// Parses the file (optional) and applies overrides. `command` comes from the
// CLI subcommand and wins over any file value.
RunConfig parse_config(const std::string& command,
                       const std::string& config_path,
                       const ConfigOverrides& overrides);

// Parses flat "key = value" text into a key->raw-value map; unknown keys are
// rejected against the RunConfig schema.
std::map<std::string, std::string> parse_flat_text(const std::string& text);

} // namespace pv
