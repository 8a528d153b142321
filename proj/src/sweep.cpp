#include "pv/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "pv/errors.hpp"

namespace pv {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void require_increasing(const std::vector<double>& v, const char* what) {
    if (v.empty()) throw ContractError(std::string("sweep: empty ") + what);
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1]))
            throw ContractError(std::string("sweep: ") + what + " must be strictly increasing");
}

SweepRow infeasible_row(double param, const std::string& reason) {
    SweepRow row;
    row.param = param;
    row.x = Vec2(kNan, kNan);
    row.dist_ref = kNan;
    row.mass_sqrt_scale = kNan;
    row.support_diam = kNan;
    row.threshold = kNan;
    row.energy = kNan;
    row.energy_plus_logterm = kNan;
    row.converged = false;
    row.verification_json = nlohmann::ordered_json({{"error", reason}}).dump(2) + "\n";
    row.verification_pass = false;
    return row;
}

double patch_l1_distance(const PatchField& p, const PatchField& q) {
    double sum = 0.0;
    auto a = p.support();
    auto b = q.support();
    std::vector<int> all;
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(all));
    all.erase(std::unique(all.begin(), all.end()), all.end());
    for (int c : all)
        sum += std::abs(p.strength * p.occupancy(c) - q.strength * q.occupancy(c));
    return sum * p.grid->cell_area();
}

} // namespace

SweepTable mu_sweep(std::shared_ptr<const Grid> grid, const SolverConfig& base,
                    const std::vector<double>& mu_list) {
    require_increasing(mu_list, "mu_list");
    SweepTable table;
    table.kind = "sweep-mu";
    const Vec2 xstar = argmin_robin(*grid, true);

    bool all_ok = true;
    for (double mu : mu_list) {
        SolverConfig cfg = base;
        cfg.mu = mu;
        cfg.lambda.reset();
        SweepRow row;
        try {
            PatchSolution sol = solve_vortex_wave(grid, cfg);
            const double s = 1.0 / std::sqrt(mu * kPi);
            row.param = mu;
            row.x = sol.x;
            row.dist_ref = (sol.x - xstar).norm();
            row.mass_sqrt_scale = mass_in_ball(sol.omega, xstar, std::sqrt(s));
            row.support_diam = support_diameter(sol.omega);
            row.threshold = sol.b;
            row.energy = energy(sol.omega, sol.psi);
            row.energy_plus_logterm = row.energy + std::log(s) / (2.0 * kTwoPi);
            row.iterations = sol.iterations;
            row.converged = sol.converged;
            VerificationReport rep = verify_solution(sol);
            row.verification_json = rep.to_json();
            row.verification_pass = rep.pass;
        } catch (const ResolutionError& e) {
            row = infeasible_row(mu, e.what());
        } catch (const InfeasibleError& e) {
            row = infeasible_row(mu, e.what());
        }
        all_ok = all_ok && row.converged && row.verification_pass;
        table.rows.push_back(std::move(row));
    }
    table.pass = all_ok;
    return table;
}

SweepTable lambda_sweep(std::shared_ptr<const Grid> grid, const SolverConfig& base,
                        const std::vector<double>& lambda_list) {
    require_increasing(lambda_list, "lambda_list");
    if (lambda_list.front() <= base.mu)
        throw ContractError("sweep: lambda_list must start above mu");
    SweepTable table;
    table.kind = "sweep-lambda";

    SolverConfig mu_cfg = base;
    mu_cfg.lambda.reset();
    PatchSolution ref = solve_vortex_wave(grid, mu_cfg);

    bool all_ok = true;
    for (double lambda : lambda_list) {
        SolverConfig cfg = base;
        cfg.lambda = lambda;
        SweepRow row;
        try {
            EulerSolution sol = solve_euler_pair(grid, cfg);
            const double eps = 1.0 / std::sqrt(lambda * kPi);
            row.param = lambda;
            row.x = sol.centroid2;
            row.dist_ref = (sol.centroid2 - ref.x).norm();
            row.mass_sqrt_scale = mass_in_ball(sol.omega2, sol.centroid2, std::sqrt(eps));
            row.support_diam = support_diameter(sol.omega2);
            row.threshold = sol.c;
            row.energy = sol.energy_self1 + sol.energy_self2 + sol.energy_interaction;
            row.energy_plus_logterm = row.energy + std::log(eps) / (2.0 * kTwoPi);
            row.l1_to_mu_solution = patch_l1_distance(sol.omega1, ref.omega);
            row.iterations = sol.iterations;
            row.converged = sol.converged;
            EulerStructureReport rep = euler_structure_check(sol);
            row.verification_json = rep.to_json();
            row.verification_pass = rep.pass;
        } catch (const ResolutionError& e) {
            row = infeasible_row(lambda, e.what());
        } catch (const InfeasibleError& e) {
            row = infeasible_row(lambda, e.what());
        }
        all_ok = all_ok && row.converged && row.verification_pass;
        table.rows.push_back(std::move(row));
    }
    table.pass = all_ok;
    return table;
}

// --- reporting ----------------------------------------------------------------

std::string sweep_csv(const SweepTable& table) {
    if (table.rows.empty()) throw ContractError("sweep: empty table");
    std::string out =
        "param,x1,x2,dist_xstar,mass_sqrt_s,diam,threshold,energy,"
        "energy_plus_logterm,l1_to_mu_solution,iters,converged\n";
    char buf[512];
    for (const auto& r : table.rows) {
        char l1[48] = "";
        if (r.l1_to_mu_solution)
            std::snprintf(l1, sizeof(l1), "%.12g", *r.l1_to_mu_solution);
        std::snprintf(buf, sizeof(buf),
                      "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%s,%d,%d\n",
                      r.param, r.x.x(), r.x.y(), r.dist_ref, r.mass_sqrt_scale,
                      r.support_diam, r.threshold, r.energy, r.energy_plus_logterm, l1,
                      r.iterations, r.converged ? 1 : 0);
        out += buf;
    }
    return out;
}

namespace {

struct Trend {
    bool nondecreasing = true;
    bool nonincreasing = true;
    bool strictly_decreasing = true;

    void feed(double prev, double cur) {
        if (cur < prev - 1e-12) nondecreasing = false;
        if (cur > prev + 1e-12) nonincreasing = false;
        if (!(cur < prev)) strictly_decreasing = false;
    }
};

} // namespace

std::string sweep_summary_json(const SweepTable& table) {
    if (table.rows.empty()) throw ContractError("sweep: empty table");
    nlohmann::ordered_json j;
    j["kind"] = table.kind;
    j["pass"] = table.pass;

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : table.rows) {
        nlohmann::ordered_json row;
        row["param"] = r.param;
        row["x1"] = r.x.x();
        row["x2"] = r.x.y();
        row["dist_xstar"] = r.dist_ref;
        row["mass_sqrt_s"] = r.mass_sqrt_scale;
        row["diam"] = r.support_diam;
        row["threshold"] = r.threshold;
        row["energy"] = r.energy;
        row["energy_plus_logterm"] = r.energy_plus_logterm;
        if (r.l1_to_mu_solution)
            row["l1_to_mu_solution"] = *r.l1_to_mu_solution;
        else
            row["l1_to_mu_solution"] = nullptr;
        row["iters"] = r.iterations;
        row["converged"] = r.converged;
        row["verification"] = nlohmann::ordered_json::parse(r.verification_json);
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);

    Trend mass, dist, l1, diam_scale;
    double e_min = std::numeric_limits<double>::infinity();
    double e_max = -e_min;
    bool thresholds_positive = true;
    double diam_ratio_max = 0.0;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        double scale = 1.0 / std::sqrt(r.param * kPi);
        double ratio = r.support_diam / scale;
        diam_ratio_max = std::max(diam_ratio_max, ratio);
        e_min = std::min(e_min, r.energy_plus_logterm);
        e_max = std::max(e_max, r.energy_plus_logterm);
        thresholds_positive = thresholds_positive && r.threshold > 0.0;
        if (i > 0) {
            const auto& p = table.rows[i - 1];
            double pscale = 1.0 / std::sqrt(p.param * kPi);
            mass.feed(p.mass_sqrt_scale, r.mass_sqrt_scale);
            dist.feed(p.dist_ref, r.dist_ref);
            diam_scale.feed(p.support_diam / pscale, ratio);
            if (p.l1_to_mu_solution && r.l1_to_mu_solution)
                l1.feed(*p.l1_to_mu_solution, *r.l1_to_mu_solution);
        }
    }
    nlohmann::ordered_json trends;
    trends["threshold_positive_all"] = thresholds_positive;
    trends["mass_sqrt_s_nondecreasing"] = mass.nondecreasing;
    trends["diam_over_scale_max"] = diam_ratio_max;
    trends["diam_over_scale_nonincreasing"] = diam_scale.nonincreasing;
    trends["energy_plus_logterm_spread"] = e_max - e_min;
    trends["dist_strictly_decreasing"] = dist.strictly_decreasing;
    trends["l1_strictly_decreasing"] = l1.strictly_decreasing;
    j["trends"] = std::move(trends);
    return j.dump(2) + "\n";
}

void emit_report(const SweepTable& table, const std::string& csv_path) {
    std::string csv = sweep_csv(table);
    std::string json = sweep_summary_json(table);

    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw IoError("sweep: cannot write '" + csv_path + "'");
    out << csv;
    if (!out) throw IoError("sweep: write failed for '" + csv_path + "'");
    out.close();

    std::filesystem::path jp(csv_path);
    jp.replace_extension(".json");
    std::ofstream js(jp, std::ios::binary);
    if (!js) throw IoError("sweep: cannot write '" + jp.string() + "'");
    js << json;
    if (!js) throw IoError("sweep: write failed for '" + jp.string() + "'");
}

} // namespace pv
