#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "pv/bathtub.hpp"
#include "pv/field.hpp"

namespace pv {

// Parameters for the rearrangement-ascent solvers. mu * area(D) > 1 is the
// existence hypothesis; the resolution guard demands a patch of >= 4 cells.
struct SolverConfig {
    double mu = 0.0;
    std::optional<double> lambda;  // euler mode only, > mu
    int n = 256;
    int max_iters = 200;
    double tol_patch = -1.0;  // symmetric-difference area; < 0 => 2.5 cells
    double tol_x = 1e-6;
    std::optional<Vec2> x0;   // nullopt => argmin H (grid scan)

    void validate(const Grid& grid, bool euler_mode) const;
    double resolved_tol_patch(const Grid& grid) const;
};

// Steady vortex-wave candidate: patch omega, vortex position x, level-set
// threshold b and the ascent history of F(omega, x) = E + G*omega(x) - H(x).
struct PatchSolution {
    PatchField omega;
    Vec2 x = Vec2::Zero();
    double b = 0.0;
    std::vector<double> F_history;
    int iterations = 0;
    bool converged = false;
    bool boundary_clamped = false;  // an ascent step had to be clamped
    ScalarField psi;                // stream(omega) at the final iterate
};

// Steady two-patch Euler candidate on the class with strengths mu (omega1)
// and lambda (omega2, the concentrating slab).
struct EulerSolution {
    PatchField omega1;
    PatchField omega2;
    double c = 0.0;
    Vec2 centroid2 = Vec2::Zero();  // x^lambda
    std::vector<double> E_history;
    int iterations = 0;
    bool converged = false;
    ScalarField psi;  // stream(omega1 + omega2) at the final iterate
    double energy_self1 = 0.0;      // E(omega1)
    double energy_self2 = 0.0;      // E(omega2)
    double energy_interaction = 0.0;
};

// argmax over the domain of Q(y) = G*omega(y) - H(y): coarse scan over every
// 4th interior cell center (plus `current` when given), then gradient ascent
// with backtracking; stops at |grad Q| <= 1e-8 or step <= 1e-12. The result
// never scores below the scanned candidates, so Q increases relative to the
// input iterate unless it is already stationary. Steps leaving the domain are
// rejected; *clamped is set when that terminated the ascent.
Vec2 vortex_step(const PatchField& omega, std::optional<Vec2> current = std::nullopt,
                 bool* clamped = nullptr);

// Minimum of H over interior cell centers, optionally refined by descent.
Vec2 argmin_robin(const Grid& grid, bool refine);

// Alternating ascent on F: bathtub step on Psi = stream(omega) +
// point_stream(x), then vortex step. F_history is nondecreasing up to
// 1e-10 * max(1,|F|) per step (an InternalError reports any larger drop).
// Convergence: patch symmetric difference <= tol_patch and |dx| <= tol_x.
// Hitting max_iters yields converged = false, not an exception.
PatchSolution solve_vortex_wave(std::shared_ptr<const Grid> grid, const SolverConfig& cfg);

// Same ascent for the two-level problem: psi = stream(omega1 + omega2),
// two-level bathtub; converged when both patches' symmetric differences are
// within tol_patch.
EulerSolution solve_euler_pair(std::shared_ptr<const Grid> grid, const SolverConfig& cfg);

// Convenience overloads that build the grid from cfg.n.
PatchSolution solve_vortex_wave(std::shared_ptr<const Domain> domain, const SolverConfig& cfg);
EulerSolution solve_euler_pair(std::shared_ptr<const Domain> domain, const SolverConfig& cfg);

} // namespace pv
