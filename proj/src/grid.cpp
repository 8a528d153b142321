#include "pv/grid.hpp"

#include <cmath>

#include "pv/errors.hpp"

namespace pv {

Grid::Grid(std::shared_ptr<const Domain> domain, int n) : domain_(std::move(domain)), n_(n) {
    if (n < 16) throw ResolutionError("grid: n must be at least 16");
    const Vec2 lo = domain_->box_lo();
    const Vec2 hi = domain_->box_hi();
    const double wx = hi.x() - lo.x();
    const double wy = hi.y() - lo.y();
    h_ = std::max(wx, wy) / n;
    area_ = h_ * h_;
    origin_ = lo;
    nx_ = static_cast<int>(std::ceil(wx / h_ - 1e-12));
    ny_ = static_cast<int>(std::ceil(wy / h_ - 1e-12));

    std::vector<double> xs, ys;
    std::vector<int> ixs, iys;
    index_map_.assign(static_cast<std::size_t>(nx_) * ny_, -1);
    for (int iy = 0; iy < ny_; ++iy) {
        for (int ix = 0; ix < nx_; ++ix) {
            Vec2 c(origin_.x() + (ix + 0.5) * h_, origin_.y() + (iy + 0.5) * h_);
            if (!domain_->contains(c)) continue;
            index_map_[static_cast<std::size_t>(iy) * nx_ + ix] =
                static_cast<int>(xs.size());
            xs.push_back(c.x());
            ys.push_back(c.y());
            ixs.push_back(ix);
            iys.push_back(iy);
        }
    }
    if (xs.size() < 4)
        throw ResolutionError("grid: grid cannot resolve the domain (" +
                              std::to_string(xs.size()) + " interior cells)");
    centers_.resize(2, static_cast<int>(xs.size()));
    for (std::size_t k = 0; k < xs.size(); ++k) {
        centers_(0, static_cast<int>(k)) = xs[k];
        centers_(1, static_cast<int>(k)) = ys[k];
    }
    ix_ = std::move(ixs);
    iy_ = std::move(iys);
}

int Grid::cell_at(int ix, int iy) const {
    if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_) return -1;
    return index_map_[static_cast<std::size_t>(iy) * nx_ + ix];
}

int Grid::locate(const Vec2& x) const {
    int ix = static_cast<int>(std::floor((x.x() - origin_.x()) / h_));
    int iy = static_cast<int>(std::floor((x.y() - origin_.y()) / h_));
    return cell_at(ix, iy);
}

std::shared_ptr<const Grid> build_grid(std::shared_ptr<const Domain> domain, int n) {
    return std::make_shared<Grid>(std::move(domain), n);
}

} // namespace pv
