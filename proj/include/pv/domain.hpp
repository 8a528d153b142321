#pragma once

#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "pv/geometry.hpp"

namespace pv {

// Evaluation of the Dirichlet Green's function G(x,y) of -Laplace and its
// decomposition G = (1/2pi) ln(1/|x-y|) - h(x,y).
struct GreenEval {
    double value = 0.0;        // G(x,y)
    Vec2 gradient_x = Vec2::Zero();   // grad_x G(x,y)
    double regular_part = 0.0; // h(x,y)
    Vec2 regular_grad_x = Vec2::Zero();
};

// Kirchhoff-Routh function H(x) = h(x,x)/2 and its gradient.
struct RobinEval {
    double value = 0.0;
    Vec2 gradient = Vec2::Zero();
};

// Bounded planar domain carrying its Green's function. Two kinds:
//  - the unit disk, where G/h/H are closed-form (method of images);
//  - a grid-masked domain given by a 0/1 raster, where h(x,.) is the discrete
//    harmonic extension of the boundary data (1/2pi) ln(1/|x-.|), solved by
//    SOR on the raster lattice and cached per source point (LRU).
// All evaluations are const and thread-safe; the h-cache is mutex-guarded.
class Domain {
public:
    enum class Kind { UnitDisk, GridMask };

    static std::shared_ptr<const Domain> unit_disk();
    // Mask text format: rows of '0'/'1' characters, row-major, top row first.
    static std::shared_ptr<const Domain> from_mask_file(const std::string& path);
    // rows[0] is the top row, rows[r][c] in {0,1}. The longer raster side is
    // mapped to unit length; the box has corner at the origin.
    static std::shared_ptr<const Domain> from_mask(const std::vector<std::vector<int>>& rows);

    Kind kind() const { return kind_; }
    double area() const { return area_; }
    bool contains(const Vec2& x) const;

    // Bounding box of the domain ([-1,1]^2 for the disk).
    Vec2 box_lo() const { return box_lo_; }
    Vec2 box_hi() const { return box_hi_; }

    // Shortest distance to the boundary, exact for the disk, conservative
    // (distance to the nearest 0-cell, minus half a raster diagonal) for masks.
    double boundary_distance(const Vec2& x) const;

    ~Domain();

    // Raster geometry, mask domains only.
    int raster_rows() const { return mrows_; }
    int raster_cols() const { return mcols_; }
    double raster_h() const { return mh_; }

    // Cached h(x,.) field on the raster lattice (interior + ghost cells hold
    // their Dirichlet data); mask domains only. Exposed for the harmonicity
    // checks in the test suite.
    struct HField {
        // (cols+2 x rows+2) with a one-cell ghost ring; index (c+1, r+1).
        // Ghost cells hold their Dirichlet data, far-exterior cells 0.
        Eigen::ArrayXXd u;
        double max_residual = 0.0;  // final 5-point stencil residual (abs)
    };
    std::shared_ptr<const HField> harmonic_field(const Vec2& source) const;

    // h(x,y) and its gradient in the *second* argument, via the cached field.
    double regular_part_at(const std::shared_ptr<const HField>& f, const Vec2& y) const;

private:
    friend GreenEval green(const Domain&, const Vec2&, const Vec2&);
    friend GreenEval green_regular(const Domain&, const Vec2&, const Vec2&);
    friend RobinEval robin(const Domain&, const Vec2&);

    Domain() = default;

    GreenEval disk_green(const Vec2& x, const Vec2& y, bool want_value) const;
    GreenEval mask_green(const Vec2& x, const Vec2& y, bool want_value) const;
    RobinEval disk_robin(const Vec2& x) const;
    RobinEval mask_robin(const Vec2& x) const;

    bool mask_cell_inside(int col, int row) const;
    Vec2 raster_center(int col, int row) const;
    HField solve_harmonic(const Vec2& source) const;

    Kind kind_ = Kind::UnitDisk;
    double area_ = kPi;
    Vec2 box_lo_ = Vec2(-1.0, -1.0);
    Vec2 box_hi_ = Vec2(1.0, 1.0);

    // Mask raster; mask_(c, r) is 1 for interior cells, row 0 at the bottom.
    Eigen::ArrayXXi mask_;
    int mrows_ = 0, mcols_ = 0;
    double mh_ = 0.0;

    // LRU cache, source point -> harmonic field. 512 sources by default.
    struct Cache;
    std::unique_ptr<Cache> cache_;
};

// Full Green evaluation. Throws DomainError if x or y is outside and
// SingularityError when x == y (the value is singular there; use
// green_regular for the regular part at coincident points).
GreenEval green(const Domain& d, const Vec2& x, const Vec2& y);

// Regular part h(x,y) and grad_x h only; defined for all interior pairs,
// including x == y. value/gradient_x of the result are unset (zero).
GreenEval green_regular(const Domain& d, const Vec2& x, const Vec2& y);

// H(x) = h(x,x)/2. Gradient is analytic on the disk and central-difference on
// mask domains. Throws DomainError on/outside the boundary.
RobinEval robin(const Domain& d, const Vec2& x);

} // namespace pv
