#pragma once

#include "holmes/common.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace holmes {

/// Distance |a - b|_p over the first `dim` components. p <= 0 selects the max norm.
double lp_distance(const Point& a, const Point& b, int dim, double p);

/// Uniform bucket grid over a point cloud for fixed-radius and nearest
/// neighbor queries. Holds a copy of the coordinates; immutable after construction.
class CellGrid {
public:
    CellGrid() = default;
    CellGrid(int dim, std::span<const Point> points);

    /// Indices a with |x - x_a|_p <= radius, ascending.
    std::vector<std::size_t> within(const Point& x, double radius, double p) const;

    /// Index of the nearest point other than `exclude` (Euclidean). Requires >= 2 points.
    std::size_t nearest(const Point& x, std::size_t exclude) const;

    double cell_size() const noexcept { return cell_; }

private:
    std::int64_t cell_coord(double v, int axis) const;
    std::size_t flat(const std::int64_t* c) const;

    int dim_ = 0;
    double cell_ = 1.0;
    Point origin_ = Point::Zero();
    std::int64_t extent_[3] = {1, 1, 1};
    std::vector<Point> points_;
    std::vector<std::size_t> cell_start_;  // CSR offsets into order_
    std::vector<std::size_t> order_;
};

}  // namespace holmes
