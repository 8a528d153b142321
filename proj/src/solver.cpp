#include "pv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "pv/errors.hpp"
#include "pv/parallel.hpp"

namespace pv {

void SolverConfig::validate(const Grid& grid, bool euler_mode) const {
    const double area = grid.domain().area();
    if (!(mu > 1.0 / area)) {
        std::ostringstream msg;
        msg << "solver: mu = " << mu << " violates the existence hypothesis mu > 1/|D| = "
            << 1.0 / area;
        throw ConfigError(msg.str());
    }
    if (1.0 / mu < 4.0 * grid.cell_area())
        throw ResolutionError("solver: patch area 1/mu covers fewer than 4 grid cells");
    if (max_iters < 1) throw ConfigError("solver: max_iters must be positive");
    if (tol_x <= 0.0) throw ConfigError("solver: tol_x must be positive");
    if (euler_mode) {
        if (!lambda) throw ConfigError("solver: euler mode requires lambda");
        if (*lambda <= mu) throw ConfigError("solver: lambda must exceed mu");
        if (1.0 / *lambda < 4.0 * grid.cell_area())
            throw ResolutionError("solver: patch area 1/lambda covers fewer than 4 grid cells");
    }
}

double SolverConfig::resolved_tol_patch(const Grid& grid) const {
    return tol_patch < 0.0 ? 2.5 * grid.cell_area() : tol_patch;
}

// --- point-vortex relocation -------------------------------------------------

Vec2 argmin_robin(const Grid& g, bool refine) {
    const Domain& dom = g.domain();
    std::vector<int> scan;
    for (int c = 0; c < g.size(); ++c)
        if (g.cell_ix(c) % 4 == 0 && g.cell_iy(c) % 4 == 0) scan.push_back(c);
    if (scan.empty())
        for (int c = 0; c < g.size(); ++c) scan.push_back(c);

    std::vector<double> vals(scan.size());
    parallel_for(scan.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k)
            vals[k] = robin(dom, g.center(scan[k])).value;
    });
    std::size_t best = 0;
    for (std::size_t k = 1; k < scan.size(); ++k)
        if (vals[k] < vals[best]) best = k;

    Vec2 y = g.center(scan[best]);
    if (!refine) return y;

    double fy = vals[best];
    double trial = g.spacing();
    for (int it = 0; it < 200; ++it) {
        Vec2 gr = robin(dom, y).gradient;
        double gn = gr.norm();
        if (gn <= 1e-9) break;
        Vec2 dir = -gr / gn;
        double step = trial;
        bool moved = false;
        while (step > 1e-14) {
            Vec2 yn = y + step * dir;
            if (dom.contains(yn)) {
                double fn = robin(dom, yn).value;
                if (fn < fy) {
                    y = yn;
                    fy = fn;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!moved) break;
        trial = std::min(2.0 * step, 0.25);
    }
    return y;
}

Vec2 vortex_step(const PatchField& omega, std::optional<Vec2> current, bool* clamped) {
    const Grid& g = *omega.grid;
    const Domain& dom = g.domain();
    if (clamped) *clamped = false;

    auto Q = [&](const Vec2& y) { return interaction(omega, y) - robin(dom, y).value; };

    // coarse scan: every 4th interior cell center, plus the incoming iterate
    std::vector<int> scan;
    for (int c = 0; c < g.size(); ++c)
        if (g.cell_ix(c) % 4 == 0 && g.cell_iy(c) % 4 == 0) scan.push_back(c);
    std::vector<double> vals(scan.size());
    parallel_for(scan.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) vals[k] = Q(g.center(scan[k]));
    });
    Vec2 y = Vec2::Zero();
    double qy = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < scan.size(); ++k)
        if (vals[k] > qy) {
            qy = vals[k];
            y = g.center(scan[k]);
        }
    if (current && dom.contains(*current)) {
        double qc = Q(*current);
        if (qc > qy) {
            qy = qc;
            y = *current;
        }
    }
    if (!std::isfinite(qy)) throw InternalError("solver: vortex scan found no candidate");

    // backtracking gradient ascent
    double trial = g.spacing();
    for (int it = 0; it < 200; ++it) {
        Vec2 gr = interaction_gradient(omega, y) - robin(dom, y).gradient;
        double gn = gr.norm();
        if (gn <= 1e-8) break;
        Vec2 dir = gr / gn;
        double step = trial;
        bool moved = false;
        bool exit_rejected = false;
        while (step > 1e-12) {
            Vec2 yn = y + step * dir;
            if (!dom.contains(yn)) {
                exit_rejected = true;
            } else {
                double qn = Q(yn);
                if (qn > qy) {
                    y = yn;
                    qy = qn;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!moved) {
            if (exit_rejected && clamped) *clamped = true;
            break;
        }
        trial = std::min(2.0 * step, 0.5);
    }
    return y;
}

// --- vortex-wave alternating ascent -------------------------------------------

namespace {

// mu * (occ_new - occ_old) over the union of supports, ascending cell order.
void occupancy_delta(const PatchField& before, const PatchField& after,
                     std::vector<int>* cells, std::vector<double>* delta) {
    cells->clear();
    delta->clear();
    auto a = before.support();
    auto b = after.support();
    std::vector<int> all;
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(all));
    all.erase(std::unique(all.begin(), all.end()), all.end());
    for (int c : all) {
        double d = after.strength * after.occupancy(c) - before.strength * before.occupancy(c);
        if (d != 0.0) {
            cells->push_back(c);
            delta->push_back(d);
        }
    }
}

// <point_stream(x), omega> against cell areas: the linear term of F.
double pairing(const PatchField& omega, const ScalarField& kappa) {
    double acc = 0.0;
    for (int c : omega.full_cells) acc += kappa.values[c];
    if (omega.fractional) acc += omega.fractional->weight * kappa.values[omega.fractional->cell];
    return omega.strength * acc * omega.grid->cell_area();
}

ScalarField negative_distance_squared(std::shared_ptr<const Grid> grid, const Vec2& x) {
    ScalarField f(grid);
    for (int i = 0; i < grid->size(); ++i)
        f.values[i] = -(grid->center(i) - x).squaredNorm();
    return f;
}

void check_unit_mass(const PatchField& p, const char* who) {
    if (std::abs(p.integral() - 1.0) > 1e-12)
        throw InternalError(std::string("solver: ") + who + " mass drifted from 1");
}

} // namespace

PatchSolution solve_vortex_wave(std::shared_ptr<const Grid> grid, const SolverConfig& cfg) {
    cfg.validate(*grid, false);
    const Grid& g = *grid;
    const Domain& dom = g.domain();
    const double tol_patch = cfg.resolved_tol_patch(g);

    Vec2 x = cfg.x0 ? *cfg.x0 : argmin_robin(g, false);
    if (!dom.contains(x)) throw DomainError("solver: x0 lies outside the domain");

    auto init = bathtub_single(negative_distance_squared(grid, x), cfg.mu);
    PatchField omega = std::move(init.patch);
    double b = init.threshold;

    ScalarField psi = stream(omega);
    ScalarField kappa = point_stream(x, grid);

    PatchSolution sol;
    double F = energy(omega, psi) + pairing(omega, kappa) - robin(dom, x).value;
    sol.F_history.push_back(F);

    std::vector<int> cells;
    std::vector<double> delta;
    bool converged = false;
    int iterations = 0;

    for (int k = 1; k <= cfg.max_iters; ++k) {
        iterations = k;

        ScalarField Psi(grid);
        Psi.values = psi.values + kappa.values;
        auto step = bathtub_single(Psi, cfg.mu);
        check_unit_mass(step.patch, "patch");

        double sym = omega.symmetric_difference(step.patch);
        occupancy_delta(omega, step.patch, &cells, &delta);
        add_stream_increment(psi, cells, delta);
        omega = std::move(step.patch);
        b = step.threshold;

        bool clamp = false;
        Vec2 xn = vortex_step(omega, x, &clamp);
        sol.boundary_clamped = sol.boundary_clamped || clamp;
        double dx = (xn - x).norm();
        x = xn;
        kappa = point_stream(x, grid);

        double Fn = energy(omega, psi) + pairing(omega, kappa) - robin(dom, x).value;
        if (Fn < F - 1e-10 * std::max(1.0, std::abs(F)))
            throw InternalError("solver: ascent objective decreased beyond slack");
        sol.F_history.push_back(Fn);
        F = Fn;

        if (sym <= tol_patch && dx <= cfg.tol_x) {
            converged = true;
            break;
        }
    }

    if (converged && !(b > 0.0))
        throw InternalError("solver: threshold b is not positive at the fixed point");

    sol.omega = std::move(omega);
    sol.x = x;
    sol.b = b;
    sol.iterations = iterations;
    sol.converged = converged;
    sol.psi = std::move(psi);
    return sol;
}

// --- two-patch Euler ascent -----------------------------------------------------

namespace {

std::map<int, double> combined_values(const PatchField& w1, const PatchField& w2) {
    std::map<int, double> v;
    for (int c : w1.full_cells) v[c] += w1.strength;
    if (w1.fractional) v[w1.fractional->cell] += w1.strength * w1.fractional->weight;
    for (int c : w2.full_cells) v[c] += w2.strength;
    if (w2.fractional) v[w2.fractional->cell] += w2.strength * w2.fractional->weight;
    return v;
}

void check_disjoint(const PatchField& w1, const PatchField& w2) {
    for (int c : w1.full_cells)
        if (w2.is_full(c))
            throw InternalError("solver: euler patches share a full cell");
}

} // namespace

EulerSolution solve_euler_pair(std::shared_ptr<const Grid> grid, const SolverConfig& cfg) {
    cfg.validate(*grid, true);
    const Grid& g = *grid;
    const Domain& dom = g.domain();
    const double lambda = *cfg.lambda;
    const double a = g.cell_area();
    const double tol_patch = cfg.resolved_tol_patch(g);

    Vec2 x0 = cfg.x0 ? *cfg.x0 : argmin_robin(g, false);
    if (!dom.contains(x0)) throw DomainError("solver: x0 lies outside the domain");

    auto init = bathtub_two_level(negative_distance_squared(grid, x0), cfg.mu, lambda);
    PatchField w1 = std::move(init.omega1);
    PatchField w2 = std::move(init.omega2);
    double c = init.threshold;

    auto totals = combined_values(w1, w2);
    ScalarField omega_total(grid);
    for (auto& [cell, v] : totals) omega_total.values[cell] = v;
    ScalarField psi = stream(omega_total);

    EulerSolution sol;
    double E = 0.5 * (omega_total.values * psi.values).sum() * a;
    sol.E_history.push_back(E);

    bool converged = false;
    int iterations = 0;
    for (int k = 1; k <= cfg.max_iters; ++k) {
        iterations = k;

        auto step = bathtub_two_level(psi, cfg.mu, lambda);
        check_unit_mass(step.omega1, "omega1");
        check_unit_mass(step.omega2, "omega2");
        check_disjoint(step.omega1, step.omega2);

        double sym1 = w1.symmetric_difference(step.omega1);
        double sym2 = w2.symmetric_difference(step.omega2);

        auto new_totals = combined_values(step.omega1, step.omega2);
        std::vector<int> cells;
        std::vector<double> delta;
        for (auto& [cell, v] : new_totals) {
            auto it = totals.find(cell);
            double d = v - (it == totals.end() ? 0.0 : it->second);
            if (d != 0.0) {
                cells.push_back(cell);
                delta.push_back(d);
            }
        }
        for (auto& [cell, v] : totals) {
            if (new_totals.count(cell)) continue;
            cells.push_back(cell);
            delta.push_back(-v);
        }
        // merge keeps ascending order deterministic
        std::vector<std::size_t> ord(cells.size());
        for (std::size_t i = 0; i < ord.size(); ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(),
                  [&](std::size_t l, std::size_t r) { return cells[l] < cells[r]; });
        std::vector<int> cells_sorted(cells.size());
        std::vector<double> delta_sorted(cells.size());
        for (std::size_t i = 0; i < ord.size(); ++i) {
            cells_sorted[i] = cells[ord[i]];
            delta_sorted[i] = delta[ord[i]];
        }
        add_stream_increment(psi, cells_sorted, delta_sorted);

        w1 = std::move(step.omega1);
        w2 = std::move(step.omega2);
        c = step.threshold;
        totals = std::move(new_totals);
        omega_total = ScalarField(grid);
        for (auto& [cell, v] : totals) omega_total.values[cell] = v;

        double En = 0.5 * (omega_total.values * psi.values).sum() * a;
        if (En < E - 1e-10 * std::max(1.0, std::abs(E)))
            throw InternalError("solver: euler energy decreased beyond slack");
        sol.E_history.push_back(En);
        E = En;

        if (sym1 <= tol_patch && sym2 <= tol_patch) {
            converged = true;
            break;
        }
    }

    sol.omega1 = std::move(w1);
    sol.omega2 = std::move(w2);
    sol.c = c;
    sol.centroid2 = centroid(sol.omega2);
    sol.iterations = iterations;
    sol.converged = converged;

    // energy split via the partial streams
    ScalarField psi1 = stream(sol.omega1);
    ScalarField psi2 = stream(sol.omega2);
    sol.energy_self1 = energy(sol.omega1, psi1);
    sol.energy_self2 = energy(sol.omega2, psi2);
    double inter = 0.0;
    for (int cell : sol.omega2.full_cells) inter += psi1.values[cell];
    if (sol.omega2.fractional)
        inter += sol.omega2.fractional->weight * psi1.values[sol.omega2.fractional->cell];
    sol.energy_interaction = sol.omega2.strength * inter * a;
    sol.psi = std::move(psi);
    return sol;
}

PatchSolution solve_vortex_wave(std::shared_ptr<const Domain> domain, const SolverConfig& cfg) {
    return solve_vortex_wave(build_grid(std::move(domain), cfg.n), cfg);
}

EulerSolution solve_euler_pair(std::shared_ptr<const Domain> domain, const SolverConfig& cfg) {
    return solve_euler_pair(build_grid(std::move(domain), cfg.n), cfg);
}

} // namespace pv
