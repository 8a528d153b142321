#include "pv/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "pv/errors.hpp"
#include "pv/parallel.hpp"

namespace pv {

// --- field types ----------------------------------------------------------------

ScalarField::ScalarField(std::shared_ptr<const Grid> g, Eigen::ArrayXd v)
    : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid->size())
        throw ContractError("field: value count does not match grid");
    if (!values.allFinite())
        throw ContractError("field: non-finite values");
}

ScalarField::ScalarField(std::shared_ptr<const Grid> g)
    : grid(std::move(g)), values(Eigen::ArrayXd::Zero(grid->size())) {}

double ScalarField::integral() const { return values.sum() * grid->cell_area(); }

double PatchField::integral() const {
    double cells = static_cast<double>(full_cells.size());
    double w = fractional ? fractional->weight : 0.0;
    return strength * grid->cell_area() * (cells + w);
}

double PatchField::occupancy(int cell) const {
    if (std::binary_search(full_cells.begin(), full_cells.end(), cell)) return 1.0;
    if (fractional && fractional->cell == cell) return fractional->weight;
    return 0.0;
}

bool PatchField::is_full(int cell) const {
    return std::binary_search(full_cells.begin(), full_cells.end(), cell);
}

ScalarField PatchField::to_field() const {
    ScalarField f(grid);
    for (int c : full_cells) f.values[c] = strength;
    if (fractional) f.values[fractional->cell] = strength * fractional->weight;
    return f;
}

std::vector<int> PatchField::support() const {
    std::vector<int> s = full_cells;
    if (fractional) {
        s.push_back(fractional->cell);
        std::sort(s.begin(), s.end());
    }
    return s;
}

double PatchField::symmetric_difference(const PatchField& other) const {
    if (grid.get() != other.grid.get())
        throw ContractError("field: symmetric difference across different grids");
    double sum = 0.0;
    auto mine = support();
    auto theirs = other.support();
    std::vector<int> all;
    std::merge(mine.begin(), mine.end(), theirs.begin(), theirs.end(), std::back_inserter(all));
    all.erase(std::unique(all.begin(), all.end()), all.end());
    for (int c : all) sum += std::abs(occupancy(c) - other.occupancy(c));
    return sum * grid->cell_area();
}

// --- log-kernel cell averages -----------------------------------------------------

namespace {

double log_avg_coarse(const Vec2& x, const Vec2& c, double s) {
    double d = (x - c).norm();
    if (d < 0.5 * s) return (std::log(1.0 / s) + kLogKernelSquareAvg) / kTwoPi;
    return std::log(1.0 / d) / kTwoPi;
}

double log_avg_refine(const Vec2& x, const Vec2& c, double s, double tol, int depth) {
    double d = (x - c).norm();
    if (d >= 2.0 * s) return std::log(1.0 / d) / kTwoPi;
    double v1 = log_avg_coarse(x, c, s);
    const double q = 0.25 * s;
    const Vec2 kids[4] = {c + Vec2(q, q), c + Vec2(-q, q), c + Vec2(q, -q), c + Vec2(-q, -q)};
    double v2 = 0.0;
    for (const auto& k : kids) v2 += log_avg_coarse(x, k, 0.5 * s);
    v2 *= 0.25;
    if (std::abs(v2 - v1) <= tol || depth >= 24) return v2;
    double v = 0.0;
    for (const auto& k : kids) v += log_avg_refine(x, k, 0.5 * s, tol, depth + 1);
    return 0.25 * v;
}

Vec2 log_grad_coarse(const Vec2& x, const Vec2& c, double s) {
    Vec2 diff = x - c;
    double d2 = diff.squaredNorm();
    if (d2 < 0.25 * s * s) return Vec2::Zero();  // antisymmetric over the cell
    return -diff / (kTwoPi * d2);
}

Vec2 log_grad_refine(const Vec2& x, const Vec2& c, double s, double tol, int depth) {
    Vec2 diff = x - c;
    double d2 = diff.squaredNorm();
    if (d2 >= 4.0 * s * s) return -diff / (kTwoPi * d2);
    Vec2 v1 = log_grad_coarse(x, c, s);
    const double q = 0.25 * s;
    const Vec2 kids[4] = {c + Vec2(q, q), c + Vec2(-q, q), c + Vec2(q, -q), c + Vec2(-q, -q)};
    Vec2 v2 = Vec2::Zero();
    for (const auto& k : kids) v2 += log_grad_coarse(x, k, 0.5 * s);
    v2 *= 0.25;
    if ((v2 - v1).norm() <= tol || depth >= 24) return v2;
    Vec2 v = Vec2::Zero();
    for (const auto& k : kids) v += log_grad_refine(x, k, 0.5 * s, tol, depth + 1);
    return 0.25 * v;
}

} // namespace

double log_kernel_cell_average(const Vec2& x, const Vec2& c, double side, double tol) {
    return log_avg_refine(x, c, side, tol, 0);
}

Vec2 log_kernel_grad_cell_average(const Vec2& x, const Vec2& c, double side, double tol) {
    return log_grad_refine(x, c, side, tol, 0);
}

double point_kernel_coeff(const Grid& g, const Vec2& x, int cell) {
    const Vec2 c = g.center(cell);
    double logpart = log_kernel_cell_average(x, c, g.spacing());
    return logpart - green_regular(g.domain(), x, c).regular_part;
}

Vec2 point_kernel_grad_coeff(const Grid& g, const Vec2& x, int cell) {
    const Vec2 c = g.center(cell);
    Vec2 logpart = log_kernel_grad_cell_average(x, c, g.spacing());
    return logpart - green_regular(g.domain(), x, c).regular_grad_x;
}

// --- stream -----------------------------------------------------------------------

namespace {

struct Source {
    int cell;
    double mass;  // value * area
};

// psi[t] += sum_s K(t, s) * mass_s, per-target accumulation in source order.
// K(t,s) = G(c_t, c_s) off the diagonal; the diagonal replaces the log part
// by its exact square-cell average.
void accumulate_kernel(Eigen::ArrayXd& psi, const Grid& g, const std::vector<Source>& sources) {
    if (sources.empty()) return;
    const int N = g.size();
    const double h = g.spacing();
    const double diag_log = std::log(1.0 / h) + kLogKernelSquareAvg;  // times 1/2pi

    if (g.domain().kind() == Domain::Kind::UnitDisk) {
        Eigen::ArrayXd cx(N), cy(N), r2(N);
        for (int i = 0; i < N; ++i) {
            cx[i] = g.center(i).x();
            cy[i] = g.center(i).y();
            r2[i] = cx[i] * cx[i] + cy[i] * cy[i];
        }
        parallel_for(static_cast<std::size_t>(N), [&](std::size_t lo, std::size_t hi) {
            const auto len = static_cast<Eigen::Index>(hi - lo);
            const auto off = static_cast<Eigen::Index>(lo);
            Eigen::ArrayXd d2(len), q(len);
            auto X = cx.segment(off, len), Y = cy.segment(off, len), R2 = r2.segment(off, len);
            for (const auto& s : sources) {
                const double sx = cx[s.cell], sy = cy[s.cell], sr2 = r2[s.cell];
                d2 = (X - sx).square() + (Y - sy).square();
                q = R2 * sr2 - 2.0 * (X * sx + Y * sy) + 1.0;
                const bool own = s.cell >= static_cast<int>(lo) && s.cell < static_cast<int>(hi);
                double saved = own ? psi[s.cell] : 0.0;
                psi.segment(off, len) += (q / d2).log() * (s.mass / (2.0 * kTwoPi));
                if (own) {
                    // G(c,c): exact log average plus h(c,c) = -(1/4pi) ln((1-r^2)^2)
                    double diag = (diag_log + std::log(1.0 - sr2)) / kTwoPi;
                    psi[s.cell] = saved + s.mass * diag;
                }
            }
        });
        return;
    }

    // mask domain: prefetch the harmonic field of every source cell
    const Domain& dom = g.domain();
    std::vector<std::shared_ptr<const Domain::HField>> fields(sources.size());
    for (std::size_t k = 0; k < sources.size(); ++k)
        fields[k] = dom.harmonic_field(g.center(sources[k].cell));
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t t = lo; t < hi; ++t) {
            const Vec2 ct = g.center(static_cast<int>(t));
            double acc = 0.0;
            for (std::size_t k = 0; k < sources.size(); ++k) {
                const auto& s = sources[k];
                double hreg = dom.regular_part_at(fields[k], ct);
                double logpart;
                if (static_cast<int>(t) == s.cell) {
                    logpart = diag_log / kTwoPi;
                } else {
                    double d = (ct - g.center(s.cell)).norm();
                    logpart = std::log(1.0 / d) / kTwoPi;
                }
                acc += s.mass * (logpart - hreg);
            }
            psi[t] += acc;
        }
    });
}

std::vector<Source> nonzero_sources(const ScalarField& omega, bool require_nonneg) {
    std::vector<Source> src;
    const double a = omega.grid->cell_area();
    for (int i = 0; i < omega.values.size(); ++i) {
        double v = omega.values[i];
        if (require_nonneg && v < 0.0)
            throw ContractError("field: stream() requires nonnegative vorticity");
        if (v != 0.0) src.push_back({i, v * a});
    }
    return src;
}

std::vector<Source> patch_sources(const PatchField& omega) {
    std::vector<Source> src;
    const double a = omega.grid->cell_area();
    src.reserve(omega.full_cells.size() + 1);
    for (int c : omega.full_cells) src.push_back({c, omega.strength * a});
    if (omega.fractional)
        src.push_back({omega.fractional->cell, omega.strength * omega.fractional->weight * a});
    std::sort(src.begin(), src.end(), [](const Source& l, const Source& r) { return l.cell < r.cell; });
    return src;
}

} // namespace

ScalarField stream(const ScalarField& omega) {
    ScalarField psi(omega.grid);
    accumulate_kernel(psi.values, *omega.grid, nonzero_sources(omega, true));
    return psi;
}

ScalarField stream(const PatchField& omega) {
    if (omega.strength < 0.0)
        throw ContractError("field: stream() requires nonnegative vorticity");
    ScalarField psi(omega.grid);
    accumulate_kernel(psi.values, *omega.grid, patch_sources(omega));
    return psi;
}

void add_stream_increment(ScalarField& psi, const std::vector<int>& cells,
                          const std::vector<double>& delta) {
    if (cells.size() != delta.size())
        throw ContractError("field: increment cells/delta size mismatch");
    std::vector<Source> src;
    const double a = psi.grid->cell_area();
    src.reserve(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k)
        if (delta[k] != 0.0) src.push_back({cells[k], delta[k] * a});
    accumulate_kernel(psi.values, *psi.grid, src);
}

ScalarField point_stream(const Vec2& x, std::shared_ptr<const Grid> grid) {
    const Grid& g = *grid;
    if (!g.domain().contains(x))
        throw DomainError("field: point_stream() source outside the domain");
    ScalarField out(grid);
    const double h = g.spacing();
    const double near2 = 4.0 * h * h;

    if (g.domain().kind() == Domain::Kind::UnitDisk) {
        const double xr2 = x.squaredNorm();
        parallel_for(static_cast<std::size_t>(g.size()), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const Vec2 c = g.center(static_cast<int>(i));
                const double d2 = (x - c).squaredNorm();
                double logpart = d2 > near2 ? -0.5 * std::log(d2) / kTwoPi
                                            : log_kernel_cell_average(x, c, h);
                double q = xr2 * c.squaredNorm() - 2.0 * x.dot(c) + 1.0;
                out.values[i] = logpart + 0.5 * std::log(q) / kTwoPi;
            }
        });
    } else {
        auto field = g.domain().harmonic_field(x);
        parallel_for(static_cast<std::size_t>(g.size()), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const Vec2 c = g.center(static_cast<int>(i));
                const double d2 = (x - c).squaredNorm();
                double logpart = d2 > near2 ? -0.5 * std::log(d2) / kTwoPi
                                            : log_kernel_cell_average(x, c, h);
                out.values[i] = logpart - g.domain().regular_part_at(field, c);
            }
        });
    }
    return out;
}

// --- functionals -------------------------------------------------------------------

double energy(const ScalarField& omega, const ScalarField& psi) {
    if (omega.grid.get() != psi.grid.get())
        throw ContractError("field: energy() grid mismatch");
    return 0.5 * (omega.values * psi.values).sum() * omega.grid->cell_area();
}

double energy(const PatchField& omega, const ScalarField& psi) {
    if (omega.grid.get() != psi.grid.get())
        throw ContractError("field: energy() grid mismatch");
    double acc = 0.0;
    for (int c : omega.full_cells) acc += psi.values[c];
    if (omega.fractional) acc += omega.fractional->weight * psi.values[omega.fractional->cell];
    return 0.5 * omega.strength * acc * omega.grid->cell_area();
}

namespace {

double interaction_impl(const Grid& g, const std::vector<Source>& sources, const Vec2& x) {
    if (!g.domain().contains(x))
        throw DomainError("field: interaction() point outside the domain");
    const double h = g.spacing();
    const double near2 = 4.0 * h * h;
    double acc = 0.0;
    if (g.domain().kind() == Domain::Kind::UnitDisk) {
        const double xr2 = x.squaredNorm();
        for (const auto& s : sources) {
            const Vec2 c = g.center(s.cell);
            const double d2 = (x - c).squaredNorm();
            double logpart = d2 > near2 ? -0.5 * std::log(d2) / kTwoPi
                                        : log_kernel_cell_average(x, c, h);
            double q = xr2 * c.squaredNorm() - 2.0 * x.dot(c) + 1.0;
            acc += s.mass * (logpart + 0.5 * std::log(q) / kTwoPi);
        }
    } else {
        auto field = g.domain().harmonic_field(x);
        for (const auto& s : sources) {
            const Vec2 c = g.center(s.cell);
            const double d2 = (x - c).squaredNorm();
            double logpart = d2 > near2 ? -0.5 * std::log(d2) / kTwoPi
                                        : log_kernel_cell_average(x, c, h);
            acc += s.mass * (logpart - g.domain().regular_part_at(field, c));
        }
    }
    return acc;
}

} // namespace

double interaction(const ScalarField& omega, const Vec2& x) {
    return interaction_impl(*omega.grid, nonzero_sources(omega, false), x);
}

double interaction(const PatchField& omega, const Vec2& x) {
    return interaction_impl(*omega.grid, patch_sources(omega), x);
}

Vec2 interaction_gradient(const PatchField& omega, const Vec2& x) {
    const Grid& g = *omega.grid;
    if (!g.domain().contains(x))
        throw DomainError("field: interaction_gradient() point outside the domain");
    auto sources = patch_sources(omega);
    if (g.domain().kind() == Domain::Kind::UnitDisk) {
        const double h = g.spacing();
        const double near2 = 4.0 * h * h;
        Vec2 acc = Vec2::Zero();
        for (const auto& s : sources) {
            const Vec2 c = g.center(s.cell);
            const Vec2 diff = x - c;
            const double d2 = diff.squaredNorm();
            Vec2 logpart = d2 > near2 ? Vec2(-diff / (kTwoPi * d2))
                                      : log_kernel_grad_cell_average(x, c, h);
            double q = x.squaredNorm() * c.squaredNorm() - 2.0 * x.dot(c) + 1.0;
            Vec2 hgrad = -(x * c.squaredNorm() - c) / (kTwoPi * q);
            acc += s.mass * (logpart - hgrad);
        }
        return acc;
    }
    // mask domains: central differences at the raster scale
    const double delta = 0.25 * g.domain().raster_h();
    auto I = [&](const Vec2& p) { return interaction_impl(g, sources, p); };
    Vec2 ex(delta, 0), ey(0, delta);
    return Vec2((I(x + ex) - I(x - ex)) / (2 * delta), (I(x + ey) - I(x - ey)) / (2 * delta));
}

double excess_energy(const PatchField& omega2, const ScalarField& psi, double c) {
    if (omega2.grid.get() != psi.grid.get())
        throw ContractError("field: excess_energy() grid mismatch");
    double acc = 0.0;
    for (int cell : omega2.full_cells)
        acc += std::max(psi.values[cell] - c, 0.0);
    if (omega2.fractional)
        acc += omega2.fractional->weight *
               std::max(psi.values[omega2.fractional->cell] - c, 0.0);
    return 0.5 * omega2.strength * acc * omega2.grid->cell_area();
}

Vec2 centroid(const PatchField& omega) {
    if (std::abs(omega.integral() - 1.0) > 1e-9)
        throw ContractError("field: centroid() requires unit integral");
    Vec2 acc = Vec2::Zero();
    const double a = omega.grid->cell_area();
    for (int c : omega.full_cells) acc += omega.grid->center(c) * (omega.strength * a);
    if (omega.fractional)
        acc += omega.grid->center(omega.fractional->cell) *
               (omega.strength * omega.fractional->weight * a);
    return acc;
}

double support_diameter(const PatchField& omega) {
    auto cells = omega.support();
    if (cells.empty()) throw ContractError("field: support_diameter() of empty patch");
    double best = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Vec2 ci = omega.grid->center(cells[i]);
        for (std::size_t j = i + 1; j < cells.size(); ++j)
            best = std::max(best, (ci - omega.grid->center(cells[j])).squaredNorm());
    }
    return std::sqrt(best);
}

double mass_in_ball(const ScalarField& omega, const Vec2& center, double r) {
    double acc = 0.0;
    const double r2 = r * r;
    for (int i = 0; i < omega.values.size(); ++i)
        if (omega.values[i] != 0.0 && (omega.grid->center(i) - center).squaredNorm() <= r2)
            acc += omega.values[i];
    return acc * omega.grid->cell_area();
}

double mass_in_ball(const PatchField& omega, const Vec2& center, double r) {
    double acc = 0.0;
    const double r2 = r * r;
    for (int c : omega.full_cells)
        if ((omega.grid->center(c) - center).squaredNorm() <= r2) acc += 1.0;
    if (omega.fractional &&
        (omega.grid->center(omega.fractional->cell) - center).squaredNorm() <= r2)
        acc += omega.fractional->weight;
    return acc * omega.strength * omega.grid->cell_area();
}

Vec2 stream_gradient_at_cell(const PatchField& omega, int cell) {
    const Grid& g = *omega.grid;
    const Vec2 ct = g.center(cell);
    auto sources = patch_sources(omega);
    Vec2 acc = Vec2::Zero();
    if (g.domain().kind() == Domain::Kind::UnitDisk) {
        const double tr2 = ct.squaredNorm();
        for (const auto& s : sources) {
            const Vec2 cs = g.center(s.cell);
            double q = tr2 * cs.squaredNorm() - 2.0 * ct.dot(cs) + 1.0;
            Vec2 hgrad = -(ct * cs.squaredNorm() - cs) / (kTwoPi * q);
            if (s.cell == cell) {
                acc += s.mass * (-hgrad);  // own-cell log gradient averages to 0
            } else {
                const Vec2 diff = ct - cs;
                acc += s.mass * (-diff / (kTwoPi * diff.squaredNorm()) - hgrad);
            }
        }
        return acc;
    }
    const Domain& dom = g.domain();
    const double delta = 0.5 * dom.raster_h();
    for (const auto& s : sources) {
        const Vec2 cs = g.center(s.cell);
        auto field = dom.harmonic_field(cs);  // grad_1 h(ct,cs) = grad_2 h(cs,.)|_ct
        Vec2 hgrad(
            (dom.regular_part_at(field, ct + Vec2(delta, 0)) -
             dom.regular_part_at(field, ct - Vec2(delta, 0))) / (2 * delta),
            (dom.regular_part_at(field, ct + Vec2(0, delta)) -
             dom.regular_part_at(field, ct - Vec2(0, delta))) / (2 * delta));
        if (s.cell == cell) {
            acc += s.mass * (-hgrad);
        } else {
            const Vec2 diff = ct - cs;
            acc += s.mass * (-diff / (kTwoPi * diff.squaredNorm()) - hgrad);
        }
    }
    return acc;
}

// --- dumps --------------------------------------------------------------------------

void dump_field_csv(const std::string& path, const ScalarField& omega, const ScalarField& psi) {
    if (omega.grid.get() != psi.grid.get())
        throw ContractError("field: dump grids mismatch");
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw IoError("field: cannot write '" + path + "'");
    out << "i,j,x,y,omega,psi\n";
    const Grid& g = *omega.grid;
    char buf[160];
    for (int c = 0; c < g.size(); ++c) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g,%.17g\n",
                      g.cell_ix(c), g.cell_iy(c), g.center(c).x(), g.center(c).y(),
                      omega.values[c], psi.values[c]);
        out << buf;
    }
    if (!out) throw IoError("field: write failed for '" + path + "'");
}

} // namespace pv
