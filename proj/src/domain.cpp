#include "pv/domain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <list>
#include <map>
#include <sstream>
#include <utility>

#include "pv/errors.hpp"

namespace pv {

namespace {

// Disk regular part in its symmetric form:
//   h(x,y) = -(1/4pi) ln(|x|^2 |y|^2 - 2 x.y + 1)
// (equals -(1/2pi) ln(|x - y*||y|) with the image point y* = y/|y|^2 and is
// finite at y = 0, where it vanishes).
inline double disk_q(const Vec2& x, const Vec2& y) {
    return x.squaredNorm() * y.squaredNorm() - 2.0 * x.dot(y) + 1.0;
}

} // namespace

// --- LRU cache of harmonic fields -------------------------------------------

struct Domain::Cache {
    using Key = std::pair<double, double>;
    static constexpr std::size_t kBudget = 512;

    std::mutex mutex;
    std::list<std::pair<Key, std::shared_ptr<const HField>>> order;  // front = hot
    std::map<Key, decltype(order)::iterator> index;

    std::shared_ptr<const HField> find(const Key& k) {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = index.find(k);
        if (it == index.end()) return nullptr;
        order.splice(order.begin(), order, it->second);
        return order.front().second;
    }

    std::shared_ptr<const HField> insert(const Key& k, std::shared_ptr<const HField> f) {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = index.find(k);
        if (it != index.end()) return it->second->second;  // lost a race; keep first
        order.emplace_front(k, std::move(f));
        index[k] = order.begin();
        if (order.size() > kBudget) {
            index.erase(order.back().first);
            order.pop_back();
        }
        return order.front().second;
    }
};

Domain::~Domain() = default;

// --- construction ------------------------------------------------------------

std::shared_ptr<const Domain> Domain::unit_disk() {
    auto d = std::shared_ptr<Domain>(new Domain());
    d->kind_ = Kind::UnitDisk;
    d->area_ = kPi;
    d->box_lo_ = Vec2(-1.0, -1.0);
    d->box_hi_ = Vec2(1.0, 1.0);
    return d;
}

std::shared_ptr<const Domain> Domain::from_mask_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("domain: cannot open mask file '" + path + "'");
    std::vector<std::vector<int>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<int> row;
        for (char ch : line) {
            if (ch == '0') row.push_back(0);
            else if (ch == '1') row.push_back(1);
            else if (ch == ' ' || ch == '\t' || ch == '\r') continue;
            else throw IoError(std::string("domain: mask file contains '") + ch + "'");
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return from_mask(rows);
}

std::shared_ptr<const Domain> Domain::from_mask(const std::vector<std::vector<int>>& rows) {
    if (rows.empty() || rows[0].empty())
        throw ContractError("domain: empty mask");
    const int R = static_cast<int>(rows.size());
    const int C = static_cast<int>(rows[0].size());
    for (const auto& r : rows)
        if (static_cast<int>(r.size()) != C)
            throw ContractError("domain: ragged mask rows");

    auto d = std::shared_ptr<Domain>(new Domain());
    d->kind_ = Kind::GridMask;
    d->mrows_ = R;
    d->mcols_ = C;
    d->mask_.resize(C, R);
    int inside = 0;
    for (int r = 0; r < R; ++r) {
        for (int c = 0; c < C; ++c) {
            int v = rows[R - 1 - r][c];  // file row 0 is the top row
            d->mask_(c, r) = v;
            inside += v;
        }
    }
    if (inside == 0) throw ContractError("domain: mask has no interior cells");

    d->mh_ = 1.0 / std::max(R, C);
    d->box_lo_ = Vec2(0.0, 0.0);
    d->box_hi_ = Vec2(C * d->mh_, R * d->mh_);
    d->area_ = inside * d->mh_ * d->mh_;

    // connectivity: flood fill from the first interior cell must reach all
    Eigen::ArrayXXi seen = Eigen::ArrayXXi::Zero(C, R);
    std::deque<std::pair<int, int>> queue;
    for (int r = 0; r < R && queue.empty(); ++r)
        for (int c = 0; c < C && queue.empty(); ++c)
            if (d->mask_(c, r)) queue.emplace_back(c, r);
    seen(queue.front().first, queue.front().second) = 1;
    int reached = 0;
    while (!queue.empty()) {
        auto [c, r] = queue.front();
        queue.pop_front();
        ++reached;
        const int dc[4] = {1, -1, 0, 0}, dr[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            int cc = c + dc[k], rr = r + dr[k];
            if (cc < 0 || cc >= C || rr < 0 || rr >= R) continue;
            if (!d->mask_(cc, rr) || seen(cc, rr)) continue;
            seen(cc, rr) = 1;
            queue.emplace_back(cc, rr);
        }
    }
    if (reached != inside)
        throw ContractError("domain: mask is not connected");

    d->cache_ = std::make_unique<Cache>();
    return d;
}

// --- geometry ------------------------------------------------------------------

bool Domain::mask_cell_inside(int col, int row) const {
    if (col < 0 || col >= mcols_ || row < 0 || row >= mrows_) return false;
    return mask_(col, row) != 0;
}

Vec2 Domain::raster_center(int col, int row) const {
    return Vec2((col + 0.5) * mh_, (row + 0.5) * mh_);
}

bool Domain::contains(const Vec2& x) const {
    if (kind_ == Kind::UnitDisk) return x.squaredNorm() < 1.0;
    if (x.x() <= box_lo_.x() || x.x() >= box_hi_.x() ||
        x.y() <= box_lo_.y() || x.y() >= box_hi_.y())
        return false;
    int c = static_cast<int>(std::floor(x.x() / mh_));
    int r = static_cast<int>(std::floor(x.y() / mh_));
    return mask_cell_inside(c, r);
}

double Domain::boundary_distance(const Vec2& x) const {
    if (kind_ == Kind::UnitDisk) return 1.0 - x.norm();
    // conservative: distance to the nearest non-interior raster cell center,
    // minus half a cell diagonal (exterior ring included)
    double best = std::numeric_limits<double>::infinity();
    for (int r = -1; r <= mrows_; ++r) {
        for (int c = -1; c <= mcols_; ++c) {
            if (mask_cell_inside(c, r)) continue;
            best = std::min(best, (x - raster_center(c, r)).norm());
        }
    }
    return std::max(0.0, best - mh_ * 0.7071067811865476);
}

// --- harmonic extension on the raster lattice ---------------------------------

Domain::HField Domain::solve_harmonic(const Vec2& source) const {
    HField f;
    f.u = Eigen::ArrayXXd::Zero(mcols_ + 2, mrows_ + 2);

    auto ghost_value = [&](int c, int r) {
        double d = (source - raster_center(c, r)).norm();
        return std::log(1.0 / d) / kTwoPi;
    };

    // Dirichlet data on every non-interior cell adjacent to an interior one.
    double data_scale = 1.0;
    for (int r = -1; r <= mrows_; ++r) {
        for (int c = -1; c <= mcols_; ++c) {
            if (mask_cell_inside(c, r)) continue;
            bool adj = mask_cell_inside(c + 1, r) || mask_cell_inside(c - 1, r) ||
                       mask_cell_inside(c, r + 1) || mask_cell_inside(c, r - 1);
            if (!adj) continue;
            double g = ghost_value(c, r);
            f.u(c + 1, r + 1) = g;
            data_scale = std::max(data_scale, std::abs(g));
        }
    }

    // SOR with the model-problem optimal relaxation factor.
    const double omega = 2.0 / (1.0 + std::sin(kPi / std::max(mrows_, mcols_)));
    const double tol = 1e-10 * data_scale;
    const int max_sweeps = 200000;
    double res = 0.0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        res = 0.0;
        for (int r = 0; r < mrows_; ++r) {
            for (int c = 0; c < mcols_; ++c) {
                if (!mask_(c, r)) continue;
                double nb = f.u(c + 2, r + 1) + f.u(c, r + 1) +
                            f.u(c + 1, r + 2) + f.u(c + 1, r);
                double diff = 0.25 * nb - f.u(c + 1, r + 1);
                f.u(c + 1, r + 1) += omega * diff;
                res = std::max(res, std::abs(diff));
            }
        }
        if (res <= 0.25 * tol) break;
    }
    // stencil residual for the harmonicity audit
    f.max_residual = 0.0;
    for (int r = 0; r < mrows_; ++r)
        for (int c = 0; c < mcols_; ++c)
            if (mask_(c, r)) {
                double lap = 4.0 * f.u(c + 1, r + 1) - f.u(c + 2, r + 1) - f.u(c, r + 1) -
                             f.u(c + 1, r + 2) - f.u(c + 1, r);
                f.max_residual = std::max(f.max_residual, std::abs(lap));
            }
    if (f.max_residual > 1e-8 * data_scale)
        throw InternalError("domain: harmonic solve failed to converge");
    return f;
}

std::shared_ptr<const Domain::HField> Domain::harmonic_field(const Vec2& source) const {
    if (kind_ != Kind::GridMask)
        throw ContractError("domain: harmonic fields exist for mask domains only");
    if (!contains(source)) throw DomainError("domain: source point outside domain");
    Cache::Key key{source.x(), source.y()};
    if (auto hit = cache_->find(key)) return hit;
    auto field = std::make_shared<HField>(solve_harmonic(source));
    return cache_->insert(key, std::move(field));
}

double Domain::regular_part_at(const std::shared_ptr<const HField>& f, const Vec2& y) const {
    // bilinear on cell centers; the ghost ring keeps every in-box point covered
    double tx = y.x() / mh_ - 0.5;
    double ty = y.y() / mh_ - 0.5;
    int c0 = static_cast<int>(std::floor(tx));
    int r0 = static_cast<int>(std::floor(ty));
    c0 = std::clamp(c0, -1, mcols_ - 1);
    r0 = std::clamp(r0, -1, mrows_ - 1);
    double fx = std::clamp(tx - c0, 0.0, 1.0);
    double fy = std::clamp(ty - r0, 0.0, 1.0);
    const auto& u = f->u;
    double v00 = u(c0 + 1, r0 + 1), v10 = u(c0 + 2, r0 + 1);
    double v01 = u(c0 + 1, r0 + 2), v11 = u(c0 + 2, r0 + 2);
    return (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 +
           (1 - fx) * fy * v01 + fx * fy * v11;
}

// --- Green / Robin evaluations -------------------------------------------------

GreenEval Domain::disk_green(const Vec2& x, const Vec2& y, bool want_value) const {
    GreenEval out;
    double q = disk_q(x, y);
    out.regular_part = -std::log(q) / (2.0 * kTwoPi);
    out.regular_grad_x = -(x * y.squaredNorm() - y) / (kTwoPi * q);
    if (want_value) {
        Vec2 diff = x - y;
        double d2 = diff.squaredNorm();
        out.value = std::log(q / d2) / (2.0 * kTwoPi);
        out.gradient_x = -diff / (kTwoPi * d2) - out.regular_grad_x;
    }
    return out;
}

GreenEval Domain::mask_green(const Vec2& x, const Vec2& y, bool want_value) const {
    GreenEval out;
    auto fx = harmonic_field(x);
    out.regular_part = regular_part_at(fx, y);
    // grad_x h(x,y) = grad_2 h(y,x) by symmetry: differentiate the field of
    // source y at the point x (central differences at the raster scale)
    auto fy = harmonic_field(y);
    double delta = 0.5 * mh_;
    out.regular_grad_x = Vec2(
        (regular_part_at(fy, x + Vec2(delta, 0)) - regular_part_at(fy, x - Vec2(delta, 0))) / (2 * delta),
        (regular_part_at(fy, x + Vec2(0, delta)) - regular_part_at(fy, x - Vec2(0, delta))) / (2 * delta));
    if (want_value) {
        Vec2 diff = x - y;
        double d2 = diff.squaredNorm();
        out.value = -0.5 * std::log(d2) / kTwoPi - out.regular_part;
        out.gradient_x = -diff / (kTwoPi * d2) - out.regular_grad_x;
    }
    return out;
}

RobinEval Domain::disk_robin(const Vec2& x) const {
    RobinEval out;
    double r2 = x.squaredNorm();
    out.value = -std::log(1.0 - r2) / (2.0 * kTwoPi);
    out.gradient = x / (kTwoPi * (1.0 - r2));
    return out;
}

RobinEval Domain::mask_robin(const Vec2& x) const {
    RobinEval out;
    auto f = harmonic_field(x);
    out.value = 0.5 * regular_part_at(f, x);
    double delta = 0.5 * mh_;
    auto H = [&](const Vec2& p) {
        auto fp = harmonic_field(p);
        return 0.5 * regular_part_at(fp, p);
    };
    Vec2 ex(delta, 0), ey(0, delta);
    if (contains(x + ex) && contains(x - ex) && contains(x + ey) && contains(x - ey)) {
        out.gradient = Vec2((H(x + ex) - H(x - ex)) / (2 * delta),
                            (H(x + ey) - H(x - ey)) / (2 * delta));
    } else {
        // one-sided fallback right next to the boundary
        double hx = contains(x + ex) ? (H(x + ex) - out.value) / delta
                                     : (out.value - H(x - ex)) / delta;
        double hy = contains(x + ey) ? (H(x + ey) - out.value) / delta
                                     : (out.value - H(x - ey)) / delta;
        out.gradient = Vec2(hx, hy);
    }
    return out;
}

GreenEval green(const Domain& d, const Vec2& x, const Vec2& y) {
    if (!d.contains(x) || !d.contains(y))
        throw DomainError("domain: green() requires interior points");
    if (x == y)
        throw SingularityError("domain: G(x,x) is singular; use green_regular for h");
    return d.kind() == Domain::Kind::UnitDisk ? d.disk_green(x, y, true)
                                              : d.mask_green(x, y, true);
}

GreenEval green_regular(const Domain& d, const Vec2& x, const Vec2& y) {
    if (!d.contains(x) || !d.contains(y))
        throw DomainError("domain: green_regular() requires interior points");
    return d.kind() == Domain::Kind::UnitDisk ? d.disk_green(x, y, false)
                                              : d.mask_green(x, y, false);
}

RobinEval robin(const Domain& d, const Vec2& x) {
    if (!d.contains(x))
        throw DomainError("domain: robin() requires an interior point");
    return d.kind() == Domain::Kind::UnitDisk ? d.disk_robin(x) : d.mask_robin(x);
}

} // namespace pv
