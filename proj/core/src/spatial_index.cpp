#include "holmes/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace holmes {

double lp_distance(const Point& a, const Point& b, int dim, double p) {
    if (p <= 0.0) {
        double m = 0.0;
        for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(a[i] - b[i]));
        return m;
    }
    if (p == 2.0) {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(s);
    }
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += std::pow(std::abs(a[i] - b[i]), p);
    return std::pow(s, 1.0 / p);
}

CellGrid::CellGrid(int dim, std::span<const Point> points)
    : dim_(dim), points_(points.begin(), points.end()) {
    HOLMES_REQUIRE(dim >= 1 && dim <= 3, InvalidArgument, "CellGrid: dimension must be 1, 2 or 3");
    const std::size_t m = points_.size();
    Point lo = Point::Zero(), hi = Point::Zero();
    if (m > 0) {
        lo = points_.front();
        hi = points_.front();
        for (const auto& x : points_) {
            lo = lo.cwiseMin(x);
            hi = hi.cwiseMax(x);
        }
    }
    double span_max = 0.0;
    double volume = 1.0;
    int spread_axes = 0;
    for (int i = 0; i < dim; ++i) {
        const double s = hi[i] - lo[i];
        span_max = std::max(span_max, s);
        if (s > 0.0) {
            volume *= s;
            ++spread_axes;
        }
    }
    if (m <= 1 || span_max <= 0.0) {
        cell_ = 1.0;
    } else {
        // About two points per cell on a quasi-uniform cloud.
        cell_ = 2.0 * std::pow(volume / static_cast<double>(m), 1.0 / std::max(spread_axes, 1));
        cell_ = std::max(cell_, span_max * 1e-6);
        // Keep the table size O(m).
        for (;;) {
            double cells = 1.0;
            for (int i = 0; i < dim; ++i) cells *= std::floor((hi[i] - lo[i]) / cell_) + 1.0;
            if (cells <= 4.0 * static_cast<double>(m) + 64.0) break;
            cell_ *= 1.5;
        }
    }
    origin_ = lo;
    for (int i = 0; i < 3; ++i)
        extent_[i] = i < dim ? static_cast<std::int64_t>(std::floor((hi[i] - lo[i]) / cell_)) + 1 : 1;

    const std::size_t ncell = static_cast<std::size_t>(extent_[0] * extent_[1] * extent_[2]);
    std::vector<std::size_t> cell_of(m);
    cell_start_.assign(ncell + 1, 0);
    for (std::size_t a = 0; a < m; ++a) {
        std::int64_t c[3] = {0, 0, 0};
        for (int i = 0; i < dim; ++i) c[i] = cell_coord(points_[a][i], i);
        cell_of[a] = flat(c);
        ++cell_start_[cell_of[a] + 1];
    }
    for (std::size_t c = 0; c < ncell; ++c) cell_start_[c + 1] += cell_start_[c];
    order_.resize(m);
    std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t a = 0; a < m; ++a) order_[fill[cell_of[a]]++] = a;
}

std::int64_t CellGrid::cell_coord(double v, int axis) const {
    const auto c = static_cast<std::int64_t>(std::floor((v - origin_[axis]) / cell_));
    return std::clamp<std::int64_t>(c, 0, extent_[axis] - 1);
}

std::size_t CellGrid::flat(const std::int64_t* c) const {
    return static_cast<std::size_t>((c[2] * extent_[1] + c[1]) * extent_[0] + c[0]);
}

std::vector<std::size_t> CellGrid::within(const Point& x, double radius, double p) const {
    std::vector<std::size_t> out;
    if (points_.empty()) return out;
    std::int64_t lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int i = 0; i < dim_; ++i) {
        // An l_p ball of radius r lies inside the l_inf box of half-width r.
        if (x[i] + radius < origin_[i] || x[i] - radius > origin_[i] + extent_[i] * cell_) return out;
        lo[i] = cell_coord(x[i] - radius, i);
        hi[i] = cell_coord(x[i] + radius, i);
    }
    std::int64_t c[3];
    for (c[2] = lo[2]; c[2] <= hi[2]; ++c[2])
        for (c[1] = lo[1]; c[1] <= hi[1]; ++c[1])
            for (c[0] = lo[0]; c[0] <= hi[0]; ++c[0]) {
                const std::size_t f = flat(c);
                for (std::size_t k = cell_start_[f]; k < cell_start_[f + 1]; ++k) {
                    const std::size_t a = order_[k];
                    if (lp_distance(x, points_[a], dim_, p) <= radius) out.push_back(a);
                }
            }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t CellGrid::nearest(const Point& x, std::size_t exclude) const {
    HOLMES_REQUIRE(points_.size() >= 2, InvalidArgument, "CellGrid::nearest needs at least two points");
    std::int64_t home[3] = {0, 0, 0};
    std::int64_t max_ring = 0;
    for (int i = 0; i < dim_; ++i) {
        home[i] = cell_coord(x[i], i);
        max_ring = std::max(max_ring, extent_[i]);
    }
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_index = exclude;
    for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
        std::int64_t lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
        for (int i = 0; i < dim_; ++i) {
            lo[i] = std::max<std::int64_t>(0, home[i] - ring);
            hi[i] = std::min<std::int64_t>(extent_[i] - 1, home[i] + ring);
        }
        std::int64_t c[3];
        for (c[2] = lo[2]; c[2] <= hi[2]; ++c[2])
            for (c[1] = lo[1]; c[1] <= hi[1]; ++c[1])
                for (c[0] = lo[0]; c[0] <= hi[0]; ++c[0]) {
                    std::int64_t cheb = 0;
                    for (int i = 0; i < dim_; ++i) cheb = std::max(cheb, std::abs(c[i] - home[i]));
                    if (cheb != ring) continue;
                    const std::size_t f = flat(c);
                    for (std::size_t k = cell_start_[f]; k < cell_start_[f + 1]; ++k) {
                        const std::size_t a = order_[k];
                        if (a == exclude) continue;
                        const double d = (points_[a] - x).norm();
                        if (d < best || (d == best && a < best_index)) {
                            best = d;
                            best_index = a;
                        }
                    }
                }
        // Anything in ring + 1 or beyond is at least ring * cell away.
        if (best <= static_cast<double>(ring) * cell_) break;
    }
    return best_index;
}

}  // namespace holmes
