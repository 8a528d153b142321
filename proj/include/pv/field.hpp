#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pv/grid.hpp"

namespace pv {

// Cell-indexed real values on a grid (vorticity, stream, combined potential).
struct ScalarField {
    std::shared_ptr<const Grid> grid;
    Eigen::ArrayXd values;

    ScalarField() = default;
    ScalarField(std::shared_ptr<const Grid> g, Eigen::ArrayXd v);
    // Zero field.
    explicit ScalarField(std::shared_ptr<const Grid> g);

    double integral() const;  // sum of value * cell area
};

// Unit-mass patch of constant strength: value = strength on full cells, one
// optional fractional cell makes the integral exactly 1.
struct PatchField {
    struct Frac {
        int cell = -1;
        double weight = 0.0;  // in (0,1)
    };

    std::shared_ptr<const Grid> grid;
    double strength = 0.0;
    std::vector<int> full_cells;          // ascending cell index
    std::optional<Frac> fractional;

    double integral() const;
    // Occupied-area fraction of a cell: 1, the fractional weight, or 0.
    double occupancy(int cell) const;
    ScalarField to_field() const;
    // Full cells plus the fractional cell, ascending.
    std::vector<int> support() const;
    // Area of the symmetric difference, fractional weights included.
    double symmetric_difference(const PatchField& other) const;
    bool is_full(int cell) const;
};

// --- Green-kernel machinery -------------------------------------------------

// Mean over the square cell (center c, side s) of (1/2pi) ln(1/|x - y|) dy,
// by 4-way recursive subdivision until the estimate moves < tol (singular
// sub-cells use the exact square average ln(1/side) + c0). Far cells
// (|x-c| >= 2s) use the midpoint value, which is exact to O(s^6/|x-c|^4)
// because the kernel is harmonic away from x.
double log_kernel_cell_average(const Vec2& x, const Vec2& c, double side, double tol = 1e-10);

// Mean of grad_x [(1/2pi) ln(1/|x-y|)] = -(1/2pi)(x-y)/|x-y|^2 over the cell,
// same scheme; the cell containing x averages to ~0 by antisymmetry.
Vec2 log_kernel_grad_cell_average(const Vec2& x, const Vec2& c, double side, double tol = 1e-10);

// Per-cell coefficients of the point-vortex field G(x, .): cell averages for
// cells within 2h of x, midpoint values beyond. interaction() and the solver
// pair against exactly these coefficients.
double point_kernel_coeff(const Grid& g, const Vec2& x, int cell);
Vec2 point_kernel_grad_coeff(const Grid& g, const Vec2& x, int cell);

// --- Operations --------------------------------------------------------------

// Stream function psi = G * omega by kernel quadrature over the cells where
// omega != 0. Off-diagonal entries are midpoint evaluations of G; the
// self-cell uses the square-average log kernel minus h(c,c). Throws
// ContractError if omega has negative values.
ScalarField stream(const ScalarField& omega);
ScalarField stream(const PatchField& omega);

// Adds  sum_j K(., j) * delta_j * area  to psi for the given source cells;
// used by the solvers to update psi incrementally as patches move.
void add_stream_increment(ScalarField& psi, const std::vector<int>& cells,
                          const std::vector<double>& delta);

// Field of G(x, cell center) values (see point_kernel_coeff for the near-x
// cell-average rule). Throws DomainError if x is outside.
ScalarField point_stream(const Vec2& x, std::shared_ptr<const Grid> grid);

// Kinetic energy E = 1/2 * sum omega * psi * area; psi must be stream(omega).
double energy(const ScalarField& omega, const ScalarField& psi);
double energy(const PatchField& omega, const ScalarField& psi);

// G*omega(x) paired against the point-kernel coefficients (cells within 2h of
// x are integrated by recursive subdivision to 1e-10).
double interaction(const ScalarField& omega, const Vec2& x);
double interaction(const PatchField& omega, const Vec2& x);
// grad_x of the same quantity.
Vec2 interaction_gradient(const PatchField& omega, const Vec2& x);

// Excess kinetic energy T = 1/2 * sum omega2 * max(psi - c, 0) * area.
double excess_energy(const PatchField& omega2, const ScalarField& psi, double c);

// Mass-weighted center; omega must have unit integral.
Vec2 centroid(const PatchField& omega);

// Max pairwise distance between occupied cell centers (fractional included).
// Throws ContractError on empty support.
double support_diameter(const PatchField& omega);

// Mass of omega over cells whose centers lie in the closed ball.
double mass_in_ball(const ScalarField& omega, const Vec2& center, double r);
double mass_in_ball(const PatchField& omega, const Vec2& center, double r);

// Gradient of G*omega at the center of an interior cell, by kernel-gradient
// quadrature (self-cell log term drops by symmetry). Used by verify.
Vec2 stream_gradient_at_cell(const PatchField& omega, int cell);

// Field dump: header "i,j,x,y,omega,psi", row-major over interior cells,
// values with round-trip precision. LF endings.
void dump_field_csv(const std::string& path, const ScalarField& omega, const ScalarField& psi);

} // namespace pv
