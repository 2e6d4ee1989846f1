#pragma once

#include "holmes/common.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <filesystem>
#include <vector>

namespace holmes {

using Vec2 = Eigen::Vector2d;

struct CurvePoint {
    Vec2 position;
    Vec2 d1;  // dC/dt
    Vec2 d2;  // d2C/dt2
};

struct BoundarySample {
    Vec2 position;
    Vec2 normal;
    double parameter;
};

/// Closed planar rational B-spline curve.
///
/// Two flavours share one evaluator: `periodic` builds the uniform periodic
/// curve (integer knots, first `degree` control points repeated), `closed`
/// takes an explicit clamped knot vector whose first and last control points
/// coincide. The public parameter t runs over [0, period()) and is wrapped.
///
/// Immutable. A polyline with chord error below 1e-9 and an arc-length table
/// are built at construction.
class NurbsCurve {
public:
    static NurbsCurve periodic(std::vector<Vec2> control_points, std::vector<double> weights, int degree = 3);
    static NurbsCurve closed(std::vector<Vec2> control_points, std::vector<double> weights, int degree,
                             std::vector<double> knots);

    int degree() const noexcept { return degree_; }
    /// Number of distinct control points (periodic wrap not counted).
    std::size_t size() const noexcept { return distinct_; }
    double period() const noexcept { return t_end_ - t_begin_; }
    const std::vector<Vec2>& control_points() const noexcept { return points_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const std::vector<double>& knots() const noexcept { return knots_; }
    bool is_periodic() const noexcept { return periodic_; }

    /// Point and parametric derivatives at t.
    CurvePoint point(double t) const;

    /// Rational basis values over the distinct control points; wrapped copies are folded back.
    std::vector<double> rational_basis(double t) const;

    /// Unit outward normal (tangent rotated by -90 degrees for a counter-clockwise curve).
    Vec2 outward_normal(double t) const;

    /// Strictly inside; points within 1e-9 of the curve count as outside.
    bool contains(const Vec2& x) const;

    /// Distance from x to the curve (polyline approximation, error below 1e-9).
    double distance(const Vec2& x) const;

    /// `count` points at equal arc-length spacing starting at t = 0, with outward normals.
    std::vector<BoundarySample> sample_boundary(std::size_t count) const;

    double arc_length() const noexcept { return arc_table_.back(); }
    /// Arc length from 0 to t (t in [0, period()]).
    double arc_length_to(double t) const;
    /// Inverse of arc_length_to.
    double parameter_at_arc_length(double s) const;

    /// +1 when the control polygon is counter-clockwise, -1 otherwise.
    int orientation() const noexcept { return orientation_; }

    const std::vector<Vec2>& polyline() const noexcept { return polyline_; }

    /// Centroid of the enclosed region, from the polyline.
    Vec2 centroid() const;

    Eigen::AlignedBox2d bounding_box() const noexcept { return box_; }

private:
    NurbsCurve() = default;
    void finalize();
    double wrap(double t) const;
    std::size_t find_span(double u) const;
    void build_polyline();
    void build_arc_table();
    void build_bands();
    double span_arc_length(double a, double b) const;

    int degree_ = 3;
    bool periodic_ = true;
    std::size_t distinct_ = 0;
    std::vector<Vec2> points_;     // distinct control points
    std::vector<double> weights_;  // distinct weights
    std::vector<Vec2> unrolled_;   // evaluator control points (periodic wrap applied)
    std::vector<double> unrolled_w_;
    std::vector<double> knots_;
    double t_begin_ = 0.0;
    double t_end_ = 1.0;
    std::vector<double> breaks_;  // distinct knots inside [t_begin_, t_end_], relative to t_begin_
    int orientation_ = 1;
    std::vector<Vec2> polyline_;  // closed: last point == first point
    std::vector<double> arc_table_;
    Eigen::AlignedBox2d box_;
    // Horizontal bands of polyline segment indices for crossing and distance queries.
    double band_y0_ = 0.0;
    double band_height_ = 1.0;
    std::vector<std::vector<std::size_t>> bands_;
};

/// Star-shaped domain boundary: periodic cubic curve with 20 control points.
NurbsCurve star_curve();

/// Unit circle as an exact rational quadratic (9 control points, clamped knots).
NurbsCurve unit_circle_curve();

/// Reads a curve from CSV with header `x,y,w`; degree 3, periodic uniform knots.
NurbsCurve read_curve_csv(const std::filesystem::path& path);
void write_curve_csv(const NurbsCurve& curve, const std::filesystem::path& path);

}  // namespace holmes
