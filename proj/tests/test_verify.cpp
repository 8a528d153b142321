#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pv/errors.hpp"
#include "pv/verify.hpp"
#include "oracles.hpp"

using namespace pv;

namespace {

std::shared_ptr<const Grid> disk_grid(int n) { return build_grid(Domain::unit_disk(), n); }

PatchField ball_patch(std::shared_ptr<const Grid> g, double mu, const Vec2& at) {
    ScalarField d2(g);
    for (int i = 0; i < g->size(); ++i) d2.values[i] = -(g->center(i) - at).squaredNorm();
    return bathtub_single(d2, mu).patch;
}

} // namespace

TEST_CASE("test functions: bump profile, support and gradient bound") {
    TestFunction f;
    f.center = Vec2(0.2, -0.1);
    f.radius = 0.15;
    CHECK(f.value(f.center) == 1.0);
    CHECK(f.value(f.center + Vec2(f.radius, 0.0)) == 0.0);
    CHECK(f.value(f.center + Vec2(0.5, 0.5)) == 0.0);

    // numeric sup of |grad| over the support vs the closed form
    double sup = 0.0;
    for (int k = 0; k < 2000; ++k) {
        double t = k / 1999.0;
        Vec2 y = f.center + Vec2(t * f.radius, 0.0);
        sup = std::max(sup, f.gradient(y).norm());
    }
    CHECK(f.gradient_sup() == doctest::Approx(sup).epsilon(1e-5));
    CHECK(f.gradient_sup() <= 2.0 / f.radius);

    // C^1: gradient matches finite differences of the value
    Vec2 y = f.center + Vec2(0.06, -0.04);
    const double d = 1e-6;
    Vec2 fd((f.value(y + Vec2(d, 0)) - f.value(y - Vec2(d, 0))) / (2 * d),
            (f.value(y + Vec2(0, d)) - f.value(y - Vec2(0, d))) / (2 * d));
    CHECK((f.gradient(y) - fd).norm() <= 1e-8);
}

TEST_CASE("battery: 20 deterministic bumps strictly inside the disk") {
    auto dom = Domain::unit_disk();
    auto battery = test_function_battery(*dom);
    CHECK(battery.size() == 20);
    for (const auto& f : battery) {
        CHECK(f.radius > 0.0);
        CHECK(f.center.norm() + f.radius < 1.0);
    }
    auto doubled = test_function_battery(*dom, true);
    CHECK(doubled.size() == 40);
}

TEST_CASE("weak_residual: radial configuration is pure quadrature error") {
    auto g = disk_grid(128);
    auto p = ball_patch(g, 50.0, Vec2(0.0, 0.0));
    auto battery = test_function_battery(g->domain());
    double r = weak_residual(p, Vec2(0.0, 0.0), battery);
    CHECK(r >= 0.0);
    CHECK(r <= 5e-3);

    // empty battery is a contract violation
    CHECK_THROWS_AS(weak_residual(p, Vec2(0.0, 0.0), {}), ContractError);
}

TEST_CASE("weak_residual: test function away from the support contributes zero") {
    auto g = disk_grid(96);
    int cell = g->locate(Vec2(-0.5, -0.5));
    REQUIRE(cell >= 0);
    PatchField p;
    p.grid = g;
    p.full_cells = {cell};
    p.strength = 1.0 / g->cell_area();
    TestFunction far;
    far.center = Vec2(0.55, 0.55);
    far.radius = 0.1;
    double r = weak_residual(p, Vec2(0.5, 0.0), {far});
    CHECK(std::abs(r) <= 1e-14);
}

TEST_CASE("weak_residual: shifted patch scores an order worse") {
    auto g = disk_grid(128);
    const double mu = 50.0;
    auto good = ball_patch(g, mu, Vec2(0.0, 0.0));
    auto bad = ball_patch(g, mu, Vec2(4.0 * g->spacing(), 0.0));  // shifted by 4h
    auto battery = test_function_battery(g->domain());
    double r_good = weak_residual(good, Vec2(0.0, 0.0), battery);
    double r_bad = weak_residual(bad, Vec2(0.0, 0.0), battery);
    CHECK(r_bad >= 10.0 * r_good);
}

TEST_CASE("weak_residual: battery independence for the radial configuration") {
    auto g = disk_grid(128);
    auto p = ball_patch(g, 50.0, Vec2(0.0, 0.0));
    double r1 = weak_residual(p, Vec2(0.0, 0.0), test_function_battery(g->domain()));
    double r2 = weak_residual(p, Vec2(0.0, 0.0), test_function_battery(g->domain(), true));
    CHECK(r2 <= 2.0 * std::max(r1, 1e-6));
    CHECK(r1 <= 2.0 * std::max(r2, 1e-6));
}

TEST_CASE("stationarity: radial case vanishes, offset matches finite differences") {
    auto g = disk_grid(128);
    auto p = ball_patch(g, 50.0, Vec2(0.0, 0.0));
    CHECK(stationarity_residual(p, Vec2(0.0, 0.0)) <= 1e-8);

    const Vec2 x(0.1, 0.0);
    double res = stationarity_residual(p, x);
    CHECK(res > 0.0);
    // finite differences of Q(y) = G*omega(y) - H(y)
    const double d = 1e-5;
    auto Q = [&](const Vec2& y) {
        return interaction(p, y) - robin(g->domain(), y).value;
    };
    Vec2 fd((Q(x + Vec2(d, 0)) - Q(x - Vec2(d, 0))) / (2 * d),
            (Q(x + Vec2(0, d)) - Q(x - Vec2(0, d))) / (2 * d));
    CHECK(res == doctest::Approx(fd.norm()).epsilon(1e-6));
}

TEST_CASE("levelset_check: recovered threshold and bathtub idempotence") {
    auto g = disk_grid(128);
    const double mu = 50.0;
    const double s = 1.0 / std::sqrt(mu * kPi);
    auto p = ball_patch(g, mu, Vec2(0.0, 0.0));

    auto lc = levelset_check(p, Vec2(0.0, 0.0));
    CHECK(lc.b_recovered == doctest::Approx(std::log(1.0 / s) / kPi).epsilon(0.02));
    // the radial ball is essentially the superlevel set already
    CHECK(lc.sym_diff_area <= 4.0 * g->cell_area());

    // literal idempotence: a patch that IS the bathtub image of its own Psi
    ScalarField Psi = stream(p);
    Psi.values += point_stream(Vec2(0.0, 0.0), g).values;
    auto once = bathtub_single(Psi, mu);
    auto twice = bathtub_single(Psi, mu);
    CHECK(once.patch.symmetric_difference(twice.patch) == 0.0);

    // scattered non-solution is far from its superlevel set
    auto scattered = oracle::scattered_patch(g, 60, 99);
    auto bad = levelset_check(scattered, Vec2(0.0, 0.0));
    CHECK(bad.sym_diff_area >= 0.5 / scattered.strength);
}

TEST_CASE("verify_solution: report fields and JSON schema") {
    auto g = disk_grid(128);
    auto p = ball_patch(g, 50.0, Vec2(0.0, 0.0));
    double s = 1.0 / std::sqrt(50.0 * kPi);
    double b = std::log(1.0 / s) / kPi;
    VerificationReport rep = verify_solution(p, Vec2(0.0, 0.0), b);
    CHECK(rep.weak_ok);
    CHECK(rep.stationarity_ok);

    std::string json = rep.to_json();
    // exactly the five public fields, in order
    CHECK(json.find("\"weak_residual_max\"") != std::string::npos);
    CHECK(json.find("\"stationarity_residual\"") != std::string::npos);
    CHECK(json.find("\"levelset_sym_diff\"") != std::string::npos);
    CHECK(json.find("\"b_recovered\"") != std::string::npos);
    CHECK(json.find("\"pass\"") != std::string::npos);
    CHECK(json.find("weak_residual_max") < json.find("stationarity_residual"));
    CHECK(json.find("stationarity_residual") < json.find("levelset_sym_diff"));
    CHECK(json.find("levelset_sym_diff") < json.find("b_recovered"));
    CHECK(json.find("b_recovered") < json.find("pass"));
}

TEST_CASE("euler_structure_check: converged run passes, tampered run fails") {
    auto g = disk_grid(96);
    SolverConfig cfg;
    cfg.mu = 20.0;
    cfg.lambda = 200.0;
    cfg.n = 96;
    EulerSolution sol = solve_euler_pair(g, cfg);
    REQUIRE(sol.converged);
    auto rep = euler_structure_check(sol);
    CHECK(rep.pass);
    CHECK(rep.c_positive);
    CHECK(rep.levelset_sym_diff <= 2.0 * g->cell_area());
    CHECK(rep.excess >= 0.0);

    // move one omega2 cell to a low-psi location
    EulerSolution tampered = sol;
    Eigen::Index lowest;
    sol.psi.values.minCoeff(&lowest);
    REQUIRE(!tampered.omega2.is_full(static_cast<int>(lowest)));
    tampered.omega2.full_cells.front() = static_cast<int>(lowest);
    std::sort(tampered.omega2.full_cells.begin(), tampered.omega2.full_cells.end());
    auto bad = euler_structure_check(tampered);
    CHECK(!bad.pass);
}
