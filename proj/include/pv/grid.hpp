#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "pv/domain.hpp"

namespace pv {

// Uniform Cartesian cell grid over the domain bounding box. A cell is
// interior iff its center lies in the domain; every interior cell has area
// h^2. Interior cells are ordered row-major, bottom row first, so "ascending
// cell index" is the deterministic tie order used throughout.
class Grid {
public:
    Grid(std::shared_ptr<const Domain> domain, int n);

    const Domain& domain() const { return *domain_; }
    std::shared_ptr<const Domain> domain_ptr() const { return domain_; }

    int n() const { return n_; }
    double spacing() const { return h_; }
    double cell_area() const { return area_; }
    int size() const { return static_cast<int>(centers_.cols()); }
    double total_area() const { return area_ * size(); }

    Vec2 center(int cell) const { return centers_.col(cell); }
    const Eigen::Matrix2Xd& centers() const { return centers_; }
    int cell_ix(int cell) const { return ix_[cell]; }
    int cell_iy(int cell) const { return iy_[cell]; }

    // Interior cell index for lattice coords, or -1.
    int cell_at(int ix, int iy) const;
    // Interior cell whose box contains x, or -1.
    int locate(const Vec2& x) const;

private:
    std::shared_ptr<const Domain> domain_;
    int n_ = 0;
    int nx_ = 0, ny_ = 0;
    double h_ = 0.0;
    double area_ = 0.0;
    Vec2 origin_ = Vec2::Zero();
    Eigen::Matrix2Xd centers_;
    std::vector<int> ix_, iy_;
    std::vector<int> index_map_;  // nx*ny -> interior index or -1
};

// Builds the grid with n cells along each bounding-box axis (n >= 16).
// Throws ResolutionError when the grid cannot resolve the domain.
std::shared_ptr<const Grid> build_grid(std::shared_ptr<const Domain> domain, int n);

} // namespace pv
