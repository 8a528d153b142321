// Batch front end: solve / euler / verify / sweep-mu / sweep-lambda.

#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pv/errors.hpp"
#include "pv/runner.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::string> domain, x0, out, field;
    std::optional<int> n, max_iters;
    std::optional<double> mu, lambda, tol_patch, tol_x, b;
    std::optional<std::string> mu_list, lambda_list;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "flat key = value config file");
    cmd->add_option("--domain", f.domain, "\"disk\" or \"mask:<path>\"");
    cmd->add_option("--n", f.n, "cells per bounding-box axis");
    cmd->add_option("--mu", f.mu, "patch strength");
    cmd->add_option("--lambda", f.lambda, "concentrated-patch strength (euler)");
    cmd->add_option("--mu-list", f.mu_list, "comma-separated mu ladder");
    cmd->add_option("--lambda-list", f.lambda_list, "comma-separated lambda ladder");
    cmd->add_option("--max-iters", f.max_iters, "ascent iteration cap");
    cmd->add_option("--tol-patch", f.tol_patch, "patch symmetric-difference tolerance (area)");
    cmd->add_option("--tol-x", f.tol_x, "vortex position tolerance");
    cmd->add_option("--x0", f.x0, "\"argmin-H\" or \"x1,x2\"");
    cmd->add_option("--out", f.out, "output directory");
}

pv::ConfigOverrides to_overrides(const Flags& f) {
    pv::ConfigOverrides o;
    char buf[40];
    auto put_d = [&](const char* key, const std::optional<double>& v) {
        if (!v) return;
        std::snprintf(buf, sizeof(buf), "%.17g", *v);
        o[key] = buf;
    };
    if (f.domain) o["domain"] = *f.domain;
    if (f.n) o["n"] = std::to_string(*f.n);
    put_d("mu", f.mu);
    put_d("lambda", f.lambda);
    if (f.mu_list) o["mu_list"] = *f.mu_list;
    if (f.lambda_list) o["lambda_list"] = *f.lambda_list;
    if (f.max_iters) o["max_iters"] = std::to_string(*f.max_iters);
    put_d("tol_patch", f.tol_patch);
    put_d("tol_x", f.tol_x);
    if (f.x0) o["x0"] = *f.x0;
    if (f.out) o["out"] = *f.out;
    if (f.field) o["field"] = *f.field;
    put_d("b", f.b);
    return o;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"steady vortex-patch solver for the planar vortex-wave system"};
    app.require_subcommand(1);

    Flags flags;
    const char* names[] = {"solve", "euler", "verify", "sweep-mu", "sweep-lambda"};
    const char* descs[] = {
        "vortex-wave rearrangement ascent (patch + point vortex)",
        "two-patch Euler ascent on the separated class",
        "certify a solution dump against the weak-solution checks",
        "mu ladder: concentration at the Robin minimum",
        "lambda ladder: desingularization toward the vortex-wave solution"};
    for (int k = 0; k < 5; ++k) {
        CLI::App* cmd = app.add_subcommand(names[k], descs[k]);
        add_common(cmd, flags);
        if (std::string(names[k]) == "verify") {
            cmd->add_option("--field", flags.field, "solution.csv to certify");
            cmd->add_option("--b", flags.b, "solver threshold for the recovery check");
        }
    }

    CLI11_PARSE(app, argc, argv);

    try {
        std::string command = app.get_subcommands().front()->get_name();
        pv::RunConfig cfg = pv::parse_config(command, flags.config, to_overrides(flags));
        return pv::run(cfg);
    } catch (const pv::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return pv::kExitError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return pv::kExitError;
    }
}
