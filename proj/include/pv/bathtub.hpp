#pragma once

#include <memory>
#include <utility>

#include "pv/field.hpp"

namespace pv {

struct BathtubResult {
    PatchField patch;
    double threshold = 0.0;  // Psi at the fractional (or last full) cell
};

// Maximizer of sum omega * Psi * area over {0 <= omega <= mu, integral = 1}:
// cells sorted by Psi descending (ties: ascending cell index) are filled at
// value mu until area 1/mu is reached; the boundary cell takes the fractional
// weight that makes the integral exactly 1. Throws InfeasibleError when 1/mu
// exceeds the grid area.
BathtubResult bathtub_single(const ScalarField& Psi, double mu);

struct TwoLevelResult {
    PatchField omega1;  // strength mu, area 1/mu
    PatchField omega2;  // strength lambda, area 1/lambda (top slab)
    double threshold = 0.0;  // c = psi at the lower edge of the top slab
};

// Two-level bathtub over the same sort: the top slab of area 1/lambda becomes
// omega2, the next slab of area 1/mu becomes omega1. When omega2 ends with a
// fractional cell, that cell's split is recorded on omega2 and omega1 starts
// at the next cell, so full-cell supports are disjoint by construction.
// c is psi at omega2's fractional cell, or at the first cell after the slab
// when the fill is exact. Throws ContractError if lambda <= mu and
// InfeasibleError when 1/lambda + 1/mu exceeds the grid area.
TwoLevelResult bathtub_two_level(const ScalarField& psi, double mu, double lambda);

} // namespace pv
