#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pv/bathtub.hpp"
#include "pv/errors.hpp"
#include "oracles.hpp"

using namespace pv;

namespace {

// 1x1-cell mask grid: k x k unit-ish cells for the hand examples; cell area
// is (1/k)^2, so strengths below are expressed through the cell area.
std::shared_ptr<const Grid> unit_cells(int k) {
    std::vector<std::vector<int>> rows(k, std::vector<int>(k, 1));
    return build_grid(Domain::from_mask(rows), std::max(16, k));
}

} // namespace

TEST_CASE("bathtub_single: hand examples with and without a fractional cell") {
    // 4 cells in one row carrying Psi = [3,2,1,0]
    auto g = unit_cells(16);
    const double a = g->cell_area();
    ScalarField Psi(g);
    Psi.values.setConstant(-1.0);
    // pick four specific cells in ascending index order
    int c0 = 0, c1 = 1, c2 = 2, c3 = 3;
    Psi.values[c0] = 3;
    Psi.values[c1] = 2;
    Psi.values[c2] = 1;
    Psi.values[c3] = 0;

    SUBCASE("exact fill: top-2 selection, b at the last full cell") {
        double mu = 1.0 / (2.0 * a);  // patch area = 2 cells
        auto r = bathtub_single(Psi, mu);
        CHECK(r.patch.full_cells == std::vector<int>{c0, c1});
        CHECK(!r.patch.fractional);
        CHECK(r.threshold == 2.0);
    }
    SUBCASE("fractional fill: weight makes the mass exact, b at the fractional cell") {
        double mu = 1.0 / (1.5 * a);  // patch area = 1.5 cells
        auto r = bathtub_single(Psi, mu);
        CHECK(r.patch.full_cells == std::vector<int>{c0});
        REQUIRE(r.patch.fractional);
        CHECK(r.patch.fractional->cell == c1);
        CHECK(r.patch.fractional->weight == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(r.threshold == 2.0);
        CHECK(std::abs(r.patch.integral() - 1.0) <= 1e-12);
    }
}

TEST_CASE("bathtub_single: infeasible patch areas") {
    auto g = unit_cells(16);
    CHECK_THROWS_AS(bathtub_single(ScalarField(g), 1.0 / (2.0 * g->total_area())),
                    InfeasibleError);
}

TEST_CASE("bathtub_single: ties break to ascending cell index") {
    auto g = unit_cells(16);
    const double a = g->cell_area();
    ScalarField Psi(g);
    Psi.values.setZero();
    Psi.values[5] = 1.0;
    Psi.values[9] = 1.0;
    Psi.values[3] = 1.0;
    auto r = bathtub_single(Psi, 1.0 / (2.0 * a));
    CHECK(r.patch.full_cells == std::vector<int>{3, 5});
}

TEST_CASE("bathtub_single: 200 randomized instances match the brute-force oracle") {
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> uval(-1.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        int k = 8 + static_cast<int>(rng() % 25);  // up to 32x32
        auto g = unit_cells(k);
        ScalarField Psi(g);
        for (int i = 0; i < g->size(); ++i) Psi.values[i] = uval(rng);
        // occasional exact ties
        if (rep % 3 == 0)
            for (int i = 0; i < g->size(); i += 7) Psi.values[i] = 0.25;
        std::uniform_real_distribution<double> umu(1.2 / g->total_area(),
                                                   4.0 / g->total_area());
        double mu = rep % 5 == 0 ? 20.0 : umu(rng);
        if (1.0 / mu < g->cell_area()) mu = 1.0 / (g->cell_area() * 1.5);
        auto got = bathtub_single(Psi, mu);
        auto ref = oracle::brute_bathtub_single(Psi, mu);
        CHECK(oracle::matches(ref, got.patch));
        CHECK(got.threshold == ref.threshold);
        CHECK(std::abs(got.patch.integral() - 1.0) <= 1e-12);
        // optimality certificate: no empty cell beats a full cell
        double min_full = 1e300, max_empty = -1e300;
        for (int c : got.patch.full_cells) min_full = std::min(min_full, Psi.values[c]);
        for (int i = 0; i < g->size(); ++i)
            if (got.patch.occupancy(i) == 0.0) max_empty = std::max(max_empty, Psi.values[i]);
        CHECK(min_full >= max_empty - 1e-14);
    }
}

TEST_CASE("bathtub_two_level: hand example on six ranked cells") {
    auto g = unit_cells(16);
    const double a = g->cell_area();
    ScalarField psi(g);
    psi.values.setConstant(-10.0);
    for (int c = 0; c < 6; ++c) psi.values[c] = 5.0 - c;  // [5,4,3,2,1,0]
    double lambda = 1.0 / a;        // area 1 cell
    double mu = 1.0 / (2.0 * a);    // area 2 cells
    auto r = bathtub_two_level(psi, mu, lambda);
    CHECK(r.omega2.full_cells == std::vector<int>{0});
    CHECK(!r.omega2.fractional);
    CHECK(r.omega1.full_cells == std::vector<int>{1, 2});
    CHECK(!r.omega1.fractional);
    CHECK(r.threshold == 4.0);
}

TEST_CASE("bathtub_two_level: radial profile gives concentric slabs") {
    auto g = build_grid(Domain::unit_disk(), 128);
    ScalarField psi(g);
    for (int i = 0; i < g->size(); ++i) psi.values[i] = -g->center(i).squaredNorm();
    const double mu = 20.0, lambda = 800.0;
    auto r = bathtub_two_level(psi, mu, lambda);
    // omega2 is the inner disk, omega1 the surrounding annulus
    double r2_max = 0.0;
    for (int c : r.omega2.full_cells)
        r2_max = std::max(r2_max, g->center(c).squaredNorm());
    double r1_min = 1e300;
    for (int c : r.omega1.full_cells)
        r1_min = std::min(r1_min, g->center(c).squaredNorm());
    CHECK(r2_max <= r1_min + 1e-15);
    CHECK(std::abs(r.omega1.integral() - 1.0) <= 1e-12);
    CHECK(std::abs(r.omega2.integral() - 1.0) <= 1e-12);
    // disjoint at the full-cell level
    for (int c : r.omega1.full_cells) CHECK(!r.omega2.is_full(c));
}

TEST_CASE("bathtub_two_level: lambda <= mu is rejected") {
    auto g = unit_cells(16);
    ScalarField psi(g);
    CHECK_THROWS_AS(bathtub_two_level(psi, 10.0, 10.0), ContractError);
}

TEST_CASE("bathtub_two_level: 200 randomized instances match the oracle") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> uval(-2.0, 2.0);
    for (int rep = 0; rep < 200; ++rep) {
        int k = 8 + static_cast<int>(rng() % 25);
        auto g = unit_cells(k);
        ScalarField psi(g);
        for (int i = 0; i < g->size(); ++i) psi.values[i] = uval(rng);
        if (rep % 4 == 0)
            for (int i = 0; i < g->size(); i += 5) psi.values[i] = 0.5;
        std::uniform_real_distribution<double> umu(3.0 / g->total_area(),
                                                   8.0 / g->total_area());
        double mu = umu(rng);
        double lambda = mu * (2.0 + (rng() % 100) / 10.0);
        if (1.0 / lambda < g->cell_area()) lambda = 1.0 / (1.5 * g->cell_area());
        if (lambda <= mu) continue;
        auto got = bathtub_two_level(psi, mu, lambda);
        auto ref = oracle::brute_bathtub_two_level(psi, mu, lambda);
        CHECK(oracle::matches(ref.top, got.omega2));
        CHECK(oracle::matches(ref.bottom, got.omega1));
        CHECK(got.threshold == ref.c);
    }
}
