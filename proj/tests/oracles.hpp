// Independent reference implementations used only by the test suites.
// Everything here is deliberately naive: plain loops, no shared code with the
// library paths under test beyond the public headers.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "pv/bathtub.hpp"
#include "pv/field.hpp"

namespace oracle {

// --- graded Gauss-Legendre quadrature over a square with a log singularity ---

// 24-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; mirrored).
inline const double kGLx[12] = {
    0.0640568928626056260850430826247450, 0.1911188674736163091586398207570696,
    0.3150426796961633743867932913198102, 0.4337935076260451384870842319133497,
    0.5454214713888395356583756172183723, 0.6480936519369755692524957869107476,
    0.7401241915785543642438281030999784, 0.8200019859739029219539498726697452,
    0.8864155270044010342131543419821967, 0.9382745520027327585236490017087214,
    0.9747285559713094981983919930081690, 0.9951872199970213601799974097007368};
inline const double kGLw[12] = {
    0.1279381953467521569740561652246954, 0.1258374563468282961213753825111836,
    0.1216704729278033912044631534762624, 0.1155056680537256013533444839067835,
    0.1074442701159656347825773424466062, 0.0976186521041138882698806644642471,
    0.0861901615319532759171852029837426, 0.0733464814110803057340336152531165,
    0.0592985849154367807463677585001085, 0.0442774388174198061686027482113382,
    0.0285313886289336631813078159518783, 0.0123412297999871995468056670700372};

template <typename F>
double gauss_legendre_2d(F&& f, double ax, double bx, double ay, double by) {
    double xm = 0.5 * (ax + bx), xr = 0.5 * (bx - ax);
    double ym = 0.5 * (ay + by), yr = 0.5 * (by - ay);
    double acc = 0.0;
    for (int i = 0; i < 24; ++i) {
        double xi = i < 12 ? xm - xr * kGLx[i] : xm + xr * kGLx[i - 12];
        double wi = kGLw[i % 12];
        for (int j = 0; j < 24; ++j) {
            double yj = j < 12 ? ym - yr * kGLx[j] : ym + yr * kGLx[j - 12];
            acc += wi * kGLw[j % 12] * f(xi, yj);
        }
    }
    return acc * xr * yr;
}

// integral of f over the rectangle spanned from the corner (cx0, cy0) along
// signed extents (sx*wx, sy*wy), graded dyadically toward the corner where f
// may have an integrable singularity.
template <typename F>
double graded_corner_integral(F&& f, double cx0, double cy0, double sx, double sy,
                              double wx, double wy) {
    auto g = [&](double u, double v) { return f(cx0 + sx * u, cy0 + sy * v); };
    double acc = 0.0;
    double hi = 1.0;
    for (int level = 0; level < 48; ++level) {
        double lo = 0.5 * hi;
        // L-shell between scales lo and hi
        acc += gauss_legendre_2d(g, lo * wx, hi * wx, 0.0, hi * wy);
        acc += gauss_legendre_2d(g, 0.0, lo * wx, lo * wy, hi * wy);
        hi = lo;
    }
    return acc;
}

// integral over the square (center c, side s) of f with an integrable
// singularity at p (inside, on the boundary, or outside).
template <typename F>
double graded_square_integral(F&& f, double cx, double cy, double s, double px, double py) {
    const double lo_x = cx - 0.5 * s, hi_x = cx + 0.5 * s;
    const double lo_y = cy - 0.5 * s, hi_y = cy + 0.5 * s;
    const double qx = std::clamp(px, lo_x, hi_x);
    const double qy = std::clamp(py, lo_y, hi_y);
    struct R {
        double sx, sy, wx, wy;
    };
    const R rects[4] = {{+1, +1, hi_x - qx, hi_y - qy},
                        {-1, +1, qx - lo_x, hi_y - qy},
                        {+1, -1, hi_x - qx, qy - lo_y},
                        {-1, -1, qx - lo_x, qy - lo_y}};
    double acc = 0.0;
    for (const auto& r : rects) {
        if (r.wx <= 0.0 || r.wy <= 0.0) continue;
        acc += graded_corner_integral(f, qx, qy, r.sx, r.sy, r.wx, r.wy);
    }
    return acc;
}

// --- brute-force bathtub references ------------------------------------------

struct BruteSingle {
    std::vector<int> full;
    int frac_cell = -1;
    double frac_weight = 0.0;
    double threshold = 0.0;
};

inline BruteSingle brute_bathtub_single(const pv::ScalarField& Psi, double mu) {
    const int N = static_cast<int>(Psi.values.size());
    const double a = Psi.grid->cell_area();
    std::vector<std::pair<double, int>> cells(N);
    for (int i = 0; i < N; ++i) cells[i] = {Psi.values[i], i};
    std::sort(cells.begin(), cells.end(), [](const auto& l, const auto& r) {
        if (l.first != r.first) return l.first > r.first;
        return l.second < r.second;
    });
    BruteSingle out;
    double remaining = 1.0 / mu;
    for (const auto& [v, i] : cells) {
        if (remaining >= a * (1.0 - 1e-12)) {
            out.full.push_back(i);
            out.threshold = v;
            remaining -= a;
            if (remaining <= 1e-12 * a) {
                remaining = 0.0;
                break;
            }
        } else {
            out.frac_cell = i;
            out.frac_weight = remaining / a;
            out.threshold = v;
            remaining = 0.0;
            break;
        }
    }
    std::sort(out.full.begin(), out.full.end());
    return out;
}

struct BruteTwo {
    BruteSingle top;     // strength lambda
    BruteSingle bottom;  // strength mu
    double c = 0.0;
};

inline BruteTwo brute_bathtub_two_level(const pv::ScalarField& psi, double mu, double lambda) {
    const int N = static_cast<int>(psi.values.size());
    const double a = psi.grid->cell_area();
    std::vector<std::pair<double, int>> cells(N);
    for (int i = 0; i < N; ++i) cells[i] = {psi.values[i], i};
    std::sort(cells.begin(), cells.end(), [](const auto& l, const auto& r) {
        if (l.first != r.first) return l.first > r.first;
        return l.second < r.second;
    });
    BruteTwo out;
    double remaining = 1.0 / lambda;
    std::size_t pos = 0;
    for (; pos < cells.size() && remaining > 0.0; ++pos) {
        auto [v, i] = cells[pos];
        if (remaining >= a * (1.0 - 1e-12)) {
            out.top.full.push_back(i);
            remaining -= a;
            if (remaining <= 1e-12 * a) remaining = 0.0;
        } else {
            out.top.frac_cell = i;
            out.top.frac_weight = remaining / a;
            remaining = 0.0;
        }
    }
    out.c = cells[out.top.frac_cell >= 0 ? pos - 1 : pos].first;
    // the remainder of a fractional top cell is skipped; omega1 starts below
    remaining = 1.0 / mu;
    for (; pos < cells.size() && remaining > 0.0; ++pos) {
        auto [v, i] = cells[pos];
        if (remaining >= a * (1.0 - 1e-12)) {
            out.bottom.full.push_back(i);
            remaining -= a;
            if (remaining <= 1e-12 * a) remaining = 0.0;
        } else {
            out.bottom.frac_cell = i;
            out.bottom.frac_weight = remaining / a;
            remaining = 0.0;
        }
    }
    std::sort(out.top.full.begin(), out.top.full.end());
    std::sort(out.bottom.full.begin(), out.bottom.full.end());
    return out;
}

inline bool matches(const BruteSingle& ref, const pv::PatchField& got, double wtol = 1e-9) {
    if (ref.full != got.full_cells) return false;
    bool ref_frac = ref.frac_cell >= 0 && ref.frac_weight > 1e-12;
    if (ref_frac != got.fractional.has_value()) return false;
    if (ref_frac) {
        if (got.fractional->cell != ref.frac_cell) return false;
        if (std::abs(got.fractional->weight - ref.frac_weight) > wtol) return false;
    }
    return true;
}

// --- brute-force stream (same kernel, naive full double loop) -----------------

inline pv::ScalarField brute_stream(const pv::ScalarField& omega) {
    const pv::Grid& g = *omega.grid;
    pv::ScalarField psi(omega.grid);
    const double a = g.cell_area();
    const double h = g.spacing();
    for (int t = 0; t < g.size(); ++t) {
        double acc = 0.0;
        for (int s = 0; s < g.size(); ++s) {
            if (omega.values[s] == 0.0) continue;
            double G;
            if (s == t) {
                double logavg = (std::log(1.0 / h) + pv::kLogKernelSquareAvg) / pv::kTwoPi;
                G = logavg - pv::green_regular(g.domain(), g.center(t), g.center(s)).regular_part;
            } else {
                G = pv::green(g.domain(), g.center(t), g.center(s)).value;
            }
            acc += G * omega.values[s] * a;
        }
        psi.values[t] = acc;
    }
    return psi;
}

// --- radial analytic solutions on the unit disk -------------------------------

// stream of omega = 1 on the whole disk
inline double psi_uniform(double r) { return 0.25 * (1.0 - r * r); }

// stream of the unit-mass patch mu * 1_{B_s(0)}, mu pi s^2 = 1
inline double psi_patch(double r, double s) {
    if (r >= s)
        return std::log(1.0 / r) / pv::kTwoPi;
    return std::log(1.0 / s) / pv::kTwoPi + (1.0 - (r * r) / (s * s)) / (2.0 * pv::kTwoPi);
}

// deterministic patch of k scattered cells (unit mass), for negative fixtures
inline pv::PatchField scattered_patch(std::shared_ptr<const pv::Grid> grid, int k,
                                      unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> pick(0, grid->size() - 1);
    std::vector<int> cells;
    while (static_cast<int>(cells.size()) < k) {
        int c = pick(rng);
        if (std::find(cells.begin(), cells.end(), c) == cells.end()) cells.push_back(c);
    }
    std::sort(cells.begin(), cells.end());
    pv::PatchField p;
    p.grid = std::move(grid);
    p.full_cells = std::move(cells);
    p.strength = 1.0 / (k * p.grid->cell_area());
    return p;
}

} // namespace oracle
