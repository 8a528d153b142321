#include "pv/bathtub.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pv/errors.hpp"

namespace pv {

namespace {

// Ranks cells by value descending; equal values resolve to ascending cell
// index (stable sort over an ascending base order).
std::vector<int> rank_descending(const Eigen::ArrayXd& v) {
    std::vector<int> idx(static_cast<std::size_t>(v.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] > v[b]; });
    return idx;
}

// Splits a target area into a full-cell count and a fractional weight,
// snapping weights within 1e-12 of 0 or 1.
void split_area(double target, double cell_area, int* n_full, double* weight) {
    double q = target / cell_area;
    int n = static_cast<int>(std::floor(q));
    double w = q - n;
    const double snap = 1e-12 * std::max(1.0, q);
    if (w <= snap) {
        w = 0.0;
    } else if (1.0 - w <= snap) {
        n += 1;
        w = 0.0;
    }
    *n_full = n;
    *weight = w;
}

// Fills `count` full cells and an optional fractional cell starting at sorted
// position `pos`; the fractional weight is recomputed so the integral is
// exactly 1 in floating point.
PatchField fill_slab(const ScalarField& values, const std::vector<int>& order,
                     std::size_t pos, int count, double weight, double strength) {
    PatchField p;
    p.grid = values.grid;
    p.strength = strength;
    p.full_cells.assign(order.begin() + pos, order.begin() + pos + count);
    std::sort(p.full_cells.begin(), p.full_cells.end());
    if (weight > 0.0) {
        const double a = values.grid->cell_area();
        PatchField::Frac f;
        f.cell = order[pos + count];
        f.weight = (1.0 / strength - count * a) / a;
        p.fractional = f;
    }
    return p;
}

} // namespace

BathtubResult bathtub_single(const ScalarField& Psi, double mu) {
    if (mu <= 0.0) throw ContractError("bathtub: mu must be positive");
    if (!Psi.values.allFinite()) throw ContractError("bathtub: non-finite Psi");
    const Grid& g = *Psi.grid;
    const double target = 1.0 / mu;
    if (target > g.total_area() * (1.0 + 1e-12))
        throw InfeasibleError("bathtub: patch area 1/mu exceeds the grid area");

    int n_full = 0;
    double w = 0.0;
    split_area(target, g.cell_area(), &n_full, &w);
    if (n_full == 0 && w == 0.0)
        throw ResolutionError("bathtub: patch area 1/mu is below one cell");
    const int needed = n_full + (w > 0.0 ? 1 : 0);
    if (needed > g.size())
        throw InfeasibleError("bathtub: patch does not fit on the grid");

    auto order = rank_descending(Psi.values);
    BathtubResult out;
    out.patch = fill_slab(Psi, order, 0, n_full, w, mu);
    out.threshold = w > 0.0 ? Psi.values[order[n_full]]
                            : Psi.values[order[n_full - 1]];
    return out;
}

TwoLevelResult bathtub_two_level(const ScalarField& psi, double mu, double lambda) {
    if (mu <= 0.0) throw ContractError("bathtub: mu must be positive");
    if (lambda <= mu) throw ContractError("bathtub: lambda must exceed mu");
    if (!psi.values.allFinite()) throw ContractError("bathtub: non-finite psi");
    const Grid& g = *psi.grid;
    if (1.0 / mu + 1.0 / lambda > g.total_area() * (1.0 + 1e-12))
        throw InfeasibleError("bathtub: 1/lambda + 1/mu exceeds the grid area");

    int n2 = 0, n1 = 0;
    double w2 = 0.0, w1 = 0.0;
    split_area(1.0 / lambda, g.cell_area(), &n2, &w2);
    split_area(1.0 / mu, g.cell_area(), &n1, &w1);
    if ((n2 == 0 && w2 == 0.0) || (n1 == 0 && w1 == 0.0))
        throw ResolutionError("bathtub: slab area is below one cell");

    // omega1 starts past omega2's cells; a fractional top cell stays recorded
    // on omega2 and its remainder is skipped, keeping supports disjoint and
    // each patch to a single fractional cell.
    const std::size_t pos1 = static_cast<std::size_t>(n2) + (w2 > 0.0 ? 1 : 0);
    const std::size_t needed = pos1 + static_cast<std::size_t>(n1) + (w1 > 0.0 ? 1 : 0);
    if (needed > static_cast<std::size_t>(g.size()))
        throw InfeasibleError("bathtub: two-level slabs do not fit on the grid");

    auto order = rank_descending(psi.values);
    TwoLevelResult out;
    out.omega2 = fill_slab(psi, order, 0, n2, w2, lambda);
    out.omega1 = fill_slab(psi, order, pos1, n1, w1, mu);
    out.threshold = psi.values[order[n2]];  // lower edge of the top slab
    return out;
}

} // namespace pv
