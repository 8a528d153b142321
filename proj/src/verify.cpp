#include "pv/verify.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "pv/errors.hpp"
#include "pv/parallel.hpp"

namespace pv {

// --- test functions ---------------------------------------------------------

double TestFunction::value(const Vec2& y) const {
    double t2 = (y - center).squaredNorm() / (radius * radius);
    if (t2 >= 1.0) return 0.0;
    double u = 1.0 - t2;
    return u * u;
}

Vec2 TestFunction::gradient(const Vec2& y) const {
    Vec2 d = y - center;
    double t2 = d.squaredNorm() / (radius * radius);
    if (t2 >= 1.0) return Vec2::Zero();
    return -4.0 * (1.0 - t2) / (radius * radius) * d;
}

double TestFunction::gradient_sup() const {
    // max of 4t(1-t^2)/R at t = 1/sqrt(3)
    return 8.0 / (3.0 * std::sqrt(3.0) * radius);
}

std::vector<TestFunction> test_function_battery(const Domain& domain, bool doubled) {
    std::vector<TestFunction> battery;
    const int n_angles = doubled ? 10 : 5;
    const int n_radii = 4;
    int k = 0;
    if (domain.kind() == Domain::Kind::UnitDisk) {
        const double rho[4] = {0.15, 0.35, 0.55, 0.75};
        for (int ir = 0; ir < n_radii; ++ir) {
            for (int ia = 0; ia < n_angles; ++ia, ++k) {
                double th = kTwoPi * ia / n_angles;
                Vec2 c(rho[ir] * std::cos(th), rho[ir] * std::sin(th));
                double base = doubled ? 0.05 + 0.25 * k / (n_angles * n_radii - 1.0)
                                      : (k % 2 == 0 ? 0.1 : 0.2);
                TestFunction f;
                f.center = c;
                f.radius = base * domain.boundary_distance(c);
                battery.push_back(f);
            }
        }
        return battery;
    }
    const Vec2 lo = domain.box_lo(), hi = domain.box_hi();
    for (int ir = 0; ir < n_radii; ++ir) {
        for (int ia = 0; ia < n_angles; ++ia, ++k) {
            Vec2 c(lo.x() + (hi.x() - lo.x()) * (ia + 1.0) / (n_angles + 1.0),
                   lo.y() + (hi.y() - lo.y()) * (ir + 1.0) / (n_radii + 1.0));
            if (!domain.contains(c)) continue;
            double bd = domain.boundary_distance(c);
            if (bd <= domain.raster_h()) continue;
            double base = doubled ? 0.05 + 0.25 * k / (n_angles * n_radii - 1.0)
                                  : (k % 2 == 0 ? 0.1 : 0.2);
            TestFunction f;
            f.center = c;
            f.radius = base * bd;
            battery.push_back(f);
        }
    }
    return battery;
}

// --- weak residual ------------------------------------------------------------

namespace {

// Integral over the square cell of J(A + v(z)) . grad_phi(z), where v is the
// singular point-kernel gradient -(1/2pi)(z-x)/|z-x|^2 and A collects the
// smooth terms frozen at the parent center. Adaptive 4-way subdivision; the
// sub-cell containing x drops v (its average vanishes by antisymmetry).
class NearVortexIntegrand {
public:
    NearVortexIntegrand(const Vec2& x, const Vec2& A, const TestFunction& phi)
        : x_(x), A_(A), phi_(phi) {}

    double integrate(const Vec2& c, double s) const { return refine(c, s, 0); }

private:
    double density(const Vec2& z, double s) const {
        Vec2 field = A_;
        Vec2 d = z - x_;
        double d2 = d.squaredNorm();
        if (d2 >= 0.25 * s * s) field += -d / (kTwoPi * d2);
        return rot_cw(field).dot(phi_.gradient(z));
    }

    double coarse(const Vec2& c, double s) const { return density(c, s) * s * s; }

    double refine(const Vec2& c, double s, int depth) const {
        double v1 = coarse(c, s);
        const double q = 0.25 * s;
        const Vec2 kids[4] = {c + Vec2(q, q), c + Vec2(-q, q), c + Vec2(q, -q),
                              c + Vec2(-q, -q)};
        double v2 = 0.0;
        for (const auto& k : kids) v2 += coarse(k, 0.5 * s);
        if (std::abs(v2 - v1) <= 1e-12 || depth >= 20) return v2;
        double v = 0.0;
        for (const auto& k : kids) v += refine(k, 0.5 * s, depth + 1);
        return v;
    }

    Vec2 x_;
    Vec2 A_;
    const TestFunction& phi_;
};

} // namespace

double weak_residual(const PatchField& omega, const Vec2& x,
                     const std::vector<TestFunction>& battery) {
    if (battery.empty()) throw ContractError("verify: empty test-function battery");
    if (std::abs(omega.integral() - 1.0) > 1e-9)
        throw ContractError("verify: weak_residual requires unit vorticity mass");
    const Grid& g = *omega.grid;
    const Domain& dom = g.domain();
    if (!dom.contains(x)) throw DomainError("verify: vortex position outside the domain");

    const double h = g.spacing();
    const double a = g.cell_area();
    auto cells = omega.support();
    const std::size_t m = cells.size();

    // kernel-gradient quadrature of grad(G*omega) at every support cell
    std::vector<Vec2> grad_psi(m);
    parallel_for(m, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            grad_psi[i] = stream_gradient_at_cell(omega, cells[i]);
    });

    std::vector<Vec2> grad_point(m);   // grad_2 G(x, c_i), far cells only
    std::vector<bool> near(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2 c = g.center(cells[i]);
        if ((c - x).norm() <= 2.0 * h) {
            near[i] = true;
        } else {
            grad_point[i] = green(dom, c, x).gradient_x;  // = grad_1 G(c, x)
        }
    }

    double worst = 0.0;
    for (const auto& phi : battery) {
        double r = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const int cell = cells[i];
            const Vec2 c = g.center(cell);
            const double w = omega.strength * omega.occupancy(cell);
            if (!near[i]) {
                Vec2 total = grad_psi[i] + grad_point[i];
                r += w * rot_cw(total).dot(phi.gradient(c)) * a;
            } else {
                // smooth part frozen at the center; singular part subdivided
                Vec2 A = grad_psi[i] - green_regular(dom, c, x).regular_grad_x;
                NearVortexIntegrand f(x, A, phi);
                r += w * f.integrate(c, h);
            }
        }
        worst = std::max(worst, std::abs(r) / phi.gradient_sup());
    }
    return worst;
}

double stationarity_residual(const PatchField& omega, const Vec2& x) {
    const Domain& dom = omega.grid->domain();
    if (!dom.contains(x)) throw DomainError("verify: vortex position outside the domain");
    return (interaction_gradient(omega, x) - robin(dom, x).gradient).norm();
}

LevelsetCheck levelset_check(const PatchField& omega, const Vec2& x) {
    ScalarField Psi = stream(omega);
    Psi.values += point_stream(x, omega.grid).values;
    auto bt = bathtub_single(Psi, omega.strength);
    LevelsetCheck out;
    out.sym_diff_area = omega.symmetric_difference(bt.patch);
    out.b_recovered = bt.threshold;
    return out;
}

// --- reports ---------------------------------------------------------------------

std::string VerificationReport::to_json() const {
    nlohmann::ordered_json j;
    j["weak_residual_max"] = weak_residual_max;
    j["stationarity_residual"] = stationarity_residual;
    j["levelset_sym_diff"] = levelset_sym_diff;
    j["b_recovered"] = b_recovered;
    j["pass"] = pass;
    return j.dump(2) + "\n";
}

VerificationReport verify_solution(const PatchField& omega, const Vec2& x, double b) {
    const Domain& dom = omega.grid->domain();
    VerificationReport rep;
    rep.weak_residual_max = weak_residual(omega, x, test_function_battery(dom));
    rep.stationarity_residual = stationarity_residual(omega, x);
    auto lc = levelset_check(omega, x);
    rep.levelset_sym_diff = lc.sym_diff_area;
    rep.b_recovered = lc.b_recovered;

    rep.weak_ok = rep.weak_residual_max <= kWeakResidualTol;
    rep.stationarity_ok = rep.stationarity_residual <= kStationarityTol;
    rep.levelset_ok =
        rep.levelset_sym_diff <= kLevelsetSymDiffCells * omega.grid->cell_area() + 1e-15;
    rep.threshold_ok = std::abs(rep.b_recovered - b) <=
                       kThresholdRecoveryRelTol * std::max(1.0, std::abs(b));
    rep.pass = rep.weak_ok && rep.stationarity_ok && rep.levelset_ok && rep.threshold_ok;
    return rep;
}

VerificationReport verify_solution(const PatchSolution& sol) {
    return verify_solution(sol.omega, sol.x, sol.b);
}

std::string EulerStructureReport::to_json() const {
    nlohmann::ordered_json j;
    j["levelset_sym_diff"] = levelset_sym_diff;
    j["omega1_cells_above_c"] = omega1_cells_above_c;
    j["c"] = c;
    j["excess_energy"] = excess;
    j["energy"] = energy;
    j["energy_plus_log_eps"] = energy_plus_log_eps;
    j["levelset_ok"] = levelset_ok;
    j["c_positive"] = c_positive;
    j["omega1_below_c"] = omega1_below_c;
    j["excess_nonneg"] = excess_nonneg;
    j["pass"] = pass;
    return j.dump(2) + "\n";
}

EulerStructureReport euler_structure_check(const EulerSolution& sol) {
    const auto grid = sol.omega1.grid;
    const double a = grid->cell_area();

    ScalarField total(grid);
    total.values = sol.omega1.to_field().values + sol.omega2.to_field().values;
    ScalarField psi = stream(total);

    EulerStructureReport rep;
    rep.c = sol.c;
    rep.c_positive = sol.c > 0.0;

    // superlevel set {psi > c} against omega2's full cells; the fractional
    // cell sits exactly at the threshold and is excluded as a tie cell
    int frac2 = sol.omega2.fractional ? sol.omega2.fractional->cell : -1;
    int mism = 0;
    for (int cell = 0; cell < grid->size(); ++cell) {
        if (cell == frac2) continue;
        bool in_set = psi.values[cell] > sol.c;
        if (in_set != sol.omega2.is_full(cell)) ++mism;
    }
    rep.levelset_sym_diff = mism * a;
    rep.levelset_ok = rep.levelset_sym_diff <= kLevelsetSymDiffCells * a + 1e-15;

    rep.omega1_cells_above_c = 0;
    for (int cell : sol.omega1.full_cells)
        if (psi.values[cell] > sol.c) ++rep.omega1_cells_above_c;
    rep.omega1_below_c = rep.omega1_cells_above_c <= 2;

    rep.excess = excess_energy(sol.omega2, psi, sol.c);
    rep.excess_nonneg = rep.excess >= -1e-15;

    rep.energy = 0.5 * (total.values * psi.values).sum() * a;
    double eps = 1.0 / std::sqrt(sol.omega2.strength * kPi);
    rep.energy_plus_log_eps = rep.energy + std::log(eps) / (2.0 * kTwoPi);

    rep.pass = rep.levelset_ok && rep.c_positive && rep.omega1_below_c && rep.excess_nonneg;
    return rep;
}

} // namespace pv
