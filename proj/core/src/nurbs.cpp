#include "holmes/nurbs.hpp"

#include "holmes/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace holmes {

namespace {

constexpr double kChordTolerance = 1e-9;
constexpr double kBoundaryBand = 1e-9;

// Nonzero basis functions and their first two derivatives on span `span`
// (Piegl & Tiller, algorithm A2.3). ders[k][j] is the k-th derivative of N_{span-p+j}.
void basis_derivatives(std::size_t span, double u, int p, const std::vector<double>& U,
                       std::array<std::array<double, 8>, 3>& ders) {
    std::array<std::array<double, 8>, 8> ndu{};
    std::array<double, 8> left{}, right{};
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = u - U[span + 1 - j];
        right[j] = U[span + j] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    for (int j = 0; j <= p; ++j) ders[0][j] = ndu[j][p];
    const int n = std::min(2, p);
    std::array<std::array<double, 8>, 2> a{};
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        for (int k = 1; k <= n; ++k) {
            double d = 0.0;
            const int rk = r - k, pk = p - k;
            if (r >= k) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::swap(s1, s2);
        }
    }
    double fac = p;
    for (int k = 1; k <= n; ++k) {
        for (int j = 0; j <= p; ++j) ders[k][j] *= fac;
        fac *= (p - k);
    }
    for (int k = n + 1; k <= 2; ++k)
        for (int j = 0; j <= p; ++j) ders[k][j] = 0.0;
}

double segment_distance(const Vec2& x, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    double s = len2 > 0.0 ? (x - a).dot(ab) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return (a + s * ab - x).norm();
}

// 7-point Gauss-Legendre on [a, b].
template <class F>
double gauss7(F&& f, double a, double b) {
    static constexpr std::array<double, 7> x = {0.0,
                                                0.4058451513773971669066064,
                                                -0.4058451513773971669066064,
                                                0.7415311855993944398638648,
                                                -0.7415311855993944398638648,
                                                0.9491079123427585245261897,
                                                -0.9491079123427585245261897};
    static constexpr std::array<double, 7> w = {0.4179591836734693877551020, 0.3818300505051189449503698,
                                                0.3818300505051189449503698, 0.2797053914892766679014678,
                                                0.2797053914892766679014678, 0.1294849661688696932706114,
                                                0.1294849661688696932706114};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(c + h * x[i]);
    return s * h;
}

template <class F>
double adaptive_gauss(F&& f, double a, double b, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gauss7(f, a, m), right = gauss7(f, m, b);
    if (depth <= 0 || std::abs(left + right - whole) <= tol) return left + right;
    return adaptive_gauss(f, a, m, left, 0.5 * tol, depth - 1) +
           adaptive_gauss(f, m, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

NurbsCurve NurbsCurve::periodic(std::vector<Vec2> control_points, std::vector<double> weights, int degree) {
    HOLMES_REQUIRE(degree >= 1 && degree <= 7, InvalidArgument, "NurbsCurve: degree must be in [1, 7]");
    HOLMES_REQUIRE(control_points.size() == weights.size(), InvalidArgument,
                   "NurbsCurve: control points and weights differ in length");
    HOLMES_REQUIRE(control_points.size() > static_cast<std::size_t>(degree), InvalidArgument,
                   "NurbsCurve: need more control points than the degree");
    NurbsCurve c;
    c.degree_ = degree;
    c.periodic_ = true;
    c.distinct_ = control_points.size();
    c.points_ = std::move(control_points);
    c.weights_ = std::move(weights);
    c.unrolled_ = c.points_;
    c.unrolled_w_ = c.weights_;
    for (int i = 0; i < degree; ++i) {
        c.unrolled_.push_back(c.points_[i]);
        c.unrolled_w_.push_back(c.weights_[i]);
    }
    const std::size_t m = c.unrolled_.size();
    c.knots_.resize(m + degree + 1);
    for (std::size_t i = 0; i < c.knots_.size(); ++i) c.knots_[i] = static_cast<double>(i);
    c.finalize();
    return c;
}

NurbsCurve NurbsCurve::closed(std::vector<Vec2> control_points, std::vector<double> weights, int degree,
                              std::vector<double> knots) {
    HOLMES_REQUIRE(degree >= 1 && degree <= 7, InvalidArgument, "NurbsCurve: degree must be in [1, 7]");
    HOLMES_REQUIRE(control_points.size() == weights.size(), InvalidArgument,
                   "NurbsCurve: control points and weights differ in length");
    HOLMES_REQUIRE(knots.size() == control_points.size() + degree + 1, InvalidArgument,
                   "NurbsCurve: knot vector length must be control points + degree + 1");
    HOLMES_REQUIRE((control_points.front() - control_points.back()).norm() < 1e-14, InvalidArgument,
                   "NurbsCurve: closed curve needs coincident first and last control points");
    NurbsCurve c;
    c.degree_ = degree;
    c.periodic_ = false;
    c.distinct_ = control_points.size() - 1;
    c.unrolled_ = control_points;
    c.unrolled_w_ = weights;
    c.points_.assign(control_points.begin(), control_points.end() - 1);
    c.weights_.assign(weights.begin(), weights.end() - 1);
    c.knots_ = std::move(knots);
    c.finalize();
    return c;
}

void NurbsCurve::finalize() {
    for (double w : unrolled_w_)
        HOLMES_REQUIRE(w > 0.0 && std::isfinite(w), InvalidArgument, "NurbsCurve: weights must be positive");
    for (std::size_t i = 1; i < knots_.size(); ++i)
        HOLMES_REQUIRE(knots_[i] >= knots_[i - 1], InvalidArgument, "NurbsCurve: knot vector must be non-decreasing");
    const std::size_t m = unrolled_.size();
    t_begin_ = knots_[degree_];
    t_end_ = knots_[m];
    HOLMES_REQUIRE(t_end_ > t_begin_, InvalidArgument, "NurbsCurve: empty parameter domain");
    breaks_.clear();
    for (std::size_t i = degree_; i <= m; ++i) {
        const double b = knots_[i] - t_begin_;
        if (breaks_.empty() || b > breaks_.back()) breaks_.push_back(b);
    }
    double area = 0.0;
    for (std::size_t i = 0; i < distinct_; ++i) {
        const Vec2& a = points_[i];
        const Vec2& b = points_[(i + 1) % distinct_];
        area += a.x() * b.y() - b.x() * a.y();
    }
    orientation_ = area >= 0.0 ? 1 : -1;
    build_polyline();
    build_bands();
    build_arc_table();
}

double NurbsCurve::wrap(double t) const {
    const double T = period();
    if (t >= 0.0 && t <= T) return t;
    double w = std::fmod(t, T);
    if (w < 0.0) w += T;
    return w;
}

std::size_t NurbsCurve::find_span(double u) const {
    const std::size_t m = unrolled_.size();
    if (u >= knots_[m]) {
        std::size_t s = m - 1;
        while (s > static_cast<std::size_t>(degree_) && knots_[s] == knots_[s + 1]) --s;
        return s;
    }
    if (u <= knots_[degree_]) {
        std::size_t s = degree_;
        while (knots_[s + 1] <= u) ++s;
        return s;
    }
    const auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + m + 1, u);
    return static_cast<std::size_t>(it - knots_.begin()) - 1;
}

CurvePoint NurbsCurve::point(double t) const {
    const double u = t_begin_ + wrap(t);
    const std::size_t span = find_span(u);
    std::array<std::array<double, 8>, 3> ders{};
    basis_derivatives(span, u, degree_, knots_, ders);
    Vec2 A[3] = {Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
    double W[3] = {0.0, 0.0, 0.0};
    for (int j = 0; j <= degree_; ++j) {
        const std::size_t i = span - degree_ + j;
        const double w = unrolled_w_[i];
        for (int k = 0; k < 3; ++k) {
            A[k] += ders[k][j] * w * unrolled_[i];
            W[k] += ders[k][j] * w;
        }
    }
    CurvePoint cp;
    cp.position = A[0] / W[0];
    cp.d1 = (A[1] - W[1] * cp.position) / W[0];
    cp.d2 = (A[2] - 2.0 * W[1] * cp.d1 - W[2] * cp.position) / W[0];
    return cp;
}

std::vector<double> NurbsCurve::rational_basis(double t) const {
    const double u = t_begin_ + wrap(t);
    const std::size_t span = find_span(u);
    std::array<std::array<double, 8>, 3> ders{};
    basis_derivatives(span, u, degree_, knots_, ders);
    std::vector<double> r(distinct_, 0.0);
    double W = 0.0;
    for (int j = 0; j <= degree_; ++j) W += ders[0][j] * unrolled_w_[span - degree_ + j];
    for (int j = 0; j <= degree_; ++j) {
        const std::size_t i = span - degree_ + j;
        r[i % distinct_] += ders[0][j] * unrolled_w_[i] / W;
    }
    return r;
}

Vec2 NurbsCurve::outward_normal(double t) const {
    const Vec2 d = point(t).d1;
    const double len = d.norm();
    HOLMES_REQUIRE(len > 1e-12, InvalidArgument, "NurbsCurve::outward_normal: degenerate tangent");
    const Vec2 tangent = d / len;
    return static_cast<double>(orientation_) * Vec2(tangent.y(), -tangent.x());
}

void NurbsCurve::build_polyline() {
    polyline_.clear();
    polyline_.push_back(point(0.0).position);
    auto deviation = [](const Vec2& a, const Vec2& b, const Vec2& x) { return segment_distance(x, a, b); };
    // Recursive refinement; every span is split at least four times so an
    // S-shaped span cannot pass the midpoint test by accident.
    auto refine = [&](auto&& self, double ta, const Vec2& pa, double tb, const Vec2& pb, int depth) -> void {
        const double tm = 0.5 * (ta + tb);
        const Vec2 pm = point(tm).position;
        double dev = deviation(pa, pb, pm);
        dev = std::max(dev, deviation(pa, pb, point(0.75 * ta + 0.25 * tb).position));
        dev = std::max(dev, deviation(pa, pb, point(0.25 * ta + 0.75 * tb).position));
        if (depth >= 2 && (dev < 0.5 * kChordTolerance || depth > 40)) {
            polyline_.push_back(pb);
            return;
        }
        self(self, ta, pa, tm, pm, depth + 1);
        self(self, tm, pm, tb, pb, depth + 1);
    };
    for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
        const double ta = breaks_[k], tb = breaks_[k + 1];
        refine(refine, ta, point(ta).position, tb, point(tb).position, 0);
    }
    polyline_.back() = polyline_.front();
    box_ = Eigen::AlignedBox2d();
    for (const auto& p : polyline_) box_.extend(p);
}

void NurbsCurve::build_bands() {
    const std::size_t segments = polyline_.size() - 1;
    const std::size_t nb = std::clamp<std::size_t>(segments / 8, 16, 4096);
    band_y0_ = box_.min().y();
    band_height_ = std::max(box_.sizes().y(), 1e-300) / static_cast<double>(nb);
    bands_.assign(nb, {});
    auto band_of = [&](double y) {
        const auto b = static_cast<std::int64_t>(std::floor((y - band_y0_) / band_height_));
        return static_cast<std::size_t>(std::clamp<std::int64_t>(b, 0, static_cast<std::int64_t>(nb) - 1));
    };
    for (std::size_t s = 0; s < segments; ++s) {
        const double ylo = std::min(polyline_[s].y(), polyline_[s + 1].y());
        const double yhi = std::max(polyline_[s].y(), polyline_[s + 1].y());
        for (std::size_t b = band_of(ylo); b <= band_of(yhi); ++b) bands_[b].push_back(s);
    }
}

double NurbsCurve::distance(const Vec2& x) const {
    const auto nb = static_cast<std::int64_t>(bands_.size());
    const auto home = std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::floor((x.y() - band_y0_) / band_height_)), 0, nb - 1);
    double best = std::numeric_limits<double>::infinity();
    auto scan = [&](std::int64_t b) {
        for (std::size_t s : bands_[b]) best = std::min(best, segment_distance(x, polyline_[s], polyline_[s + 1]));
    };
    scan(home);
    for (std::int64_t r = 1; r < nb; ++r) {
        const std::int64_t lo = home - r, hi = home + r;
        if (lo < 0 && hi >= nb) break;
        // Vertical gap to a band bounds the distance to every segment in it.
        const double gap_lo = lo >= 0 ? x.y() - (band_y0_ + static_cast<double>(lo + 1) * band_height_)
                                      : std::numeric_limits<double>::infinity();
        const double gap_hi = hi < nb ? (band_y0_ + static_cast<double>(hi) * band_height_) - x.y()
                                      : std::numeric_limits<double>::infinity();
        if (std::min(gap_lo, gap_hi) > best) break;
        if (lo >= 0 && gap_lo <= best) scan(lo);
        if (hi < nb && gap_hi <= best) scan(hi);
    }
    return best;
}

bool NurbsCurve::contains(const Vec2& x) const {
    if (!box_.contains(x)) return false;
    const auto nb = static_cast<std::int64_t>(bands_.size());
    auto band_of = [&](double y) {
        return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((y - band_y0_) / band_height_)), 0,
                                        nb - 1);
    };
    for (std::int64_t b = band_of(x.y() - kBoundaryBand); b <= band_of(x.y() + kBoundaryBand); ++b)
        for (std::size_t s : bands_[b])
            if (segment_distance(x, polyline_[s], polyline_[s + 1]) < kBoundaryBand) return false;
    bool inside = false;
    for (std::size_t s : bands_[band_of(x.y())]) {
        const Vec2& a = polyline_[s];
        const Vec2& b = polyline_[s + 1];
        if ((a.y() > x.y()) != (b.y() > x.y())) {
            const double xc = a.x() + (x.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (x.x() < xc) inside = !inside;
        }
    }
    return inside;
}

double NurbsCurve::span_arc_length(double a, double b) const {
    if (b <= a) return 0.0;
    auto speed = [this](double t) { return point(t).d1.norm(); };
    return adaptive_gauss(speed, a, b, gauss7(speed, a, b), 1e-14, 30);
}

void NurbsCurve::build_arc_table() {
    arc_table_.assign(breaks_.size(), 0.0);
    for (std::size_t k = 0; k + 1 < breaks_.size(); ++k)
        arc_table_[k + 1] = arc_table_[k] + span_arc_length(breaks_[k], breaks_[k + 1]);
}

double NurbsCurve::arc_length_to(double t) const {
    t = std::clamp(t, 0.0, period());
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - breaks_.begin());
    k = std::clamp<std::size_t>(k, 1, breaks_.size() - 1) - 1;
    return arc_table_[k] + span_arc_length(breaks_[k], t);
}

double NurbsCurve::parameter_at_arc_length(double s) const {
    const double total = arc_length();
    s = std::clamp(s, 0.0, total);
    auto it = std::upper_bound(arc_table_.begin(), arc_table_.end(), s);
    std::size_t k = static_cast<std::size_t>(it - arc_table_.begin());
    k = std::clamp<std::size_t>(k, 1, arc_table_.size() - 1) - 1;
    double lo = breaks_[k], hi = breaks_[k + 1];
    double t = lo + (hi - lo) * (s - arc_table_[k]) / std::max(arc_table_[k + 1] - arc_table_[k], 1e-300);
    for (int iter = 0; iter < 60; ++iter) {
        const double f = arc_table_[k] + span_arc_length(breaks_[k], t) - s;
        if (std::abs(f) < 1e-13 * std::max(1.0, total)) break;
        if (f > 0.0)
            hi = t;
        else
            lo = t;
        const double speed = point(t).d1.norm();
        double next = speed > 0.0 ? t - f / speed : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        t = next;
    }
    return t;
}

std::vector<BoundarySample> NurbsCurve::sample_boundary(std::size_t count) const {
    HOLMES_REQUIRE(count >= 1, InvalidArgument, "sample_boundary: count must be positive");
    std::vector<BoundarySample> out;
    out.reserve(count);
    const double step = arc_length() / static_cast<double>(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double t = parameter_at_arc_length(step * static_cast<double>(k));
        out.push_back({point(t).position, outward_normal(t), t});
    }
    return out;
}

Vec2 NurbsCurve::centroid() const {
    double a = 0.0;
    Vec2 c = Vec2::Zero();
    for (std::size_t i = 0; i + 1 < polyline_.size(); ++i) {
        const Vec2& p = polyline_[i];
        const Vec2& q = polyline_[i + 1];
        const double cross = p.x() * q.y() - q.x() * p.y();
        a += cross;
        c += cross * (p + q);
    }
    return c / (3.0 * a);
}

NurbsCurve star_curve() {
    static const double table[20][3] = {
        {-0.315646, -1.085310, 1.515248}, {0.091382, -0.554301, 1.180104},  {0.471145, -0.906028, 1.275062},
        {0.658987, -0.724081, 0.805530},  {0.717332, -0.497103, 1.085006},  {0.612211, -0.207935, 1.204812},
        {1.225410, 0.199055, 1.602287},   {1.317630, 0.653927, 1.287513},   {0.781819, 0.724652, 1.279621},
        {0.308763, 0.447180, 1.146973},   {0.104881, 1.024695, 1.371792},   {-0.139101, 0.885485, 0.747637},
        {-0.328176, 0.819813, 1.104964},  {-0.310237, 0.389074, 1.089473},  {-1.013978, 0.505792, 1.398823},
        {-0.948944, 0.187873, 0.793557},  {-1.055274, -0.025958, 1.393367}, {-0.498210, -0.237582, 1.208597},
        {-0.769951, -0.761041, 1.349239}, {-0.667820, -1.073769, 1.081645},
    };
    std::vector<Vec2> pts;
    std::vector<double> w;
    for (const auto& row : table) {
        pts.emplace_back(row[0], row[1]);
        w.push_back(row[2]);
    }
    return NurbsCurve::periodic(std::move(pts), std::move(w), 3);
}

NurbsCurve unit_circle_curve() {
    const double s = std::sqrt(0.5);
    std::vector<Vec2> pts = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}};
    std::vector<double> w = {1, s, 1, s, 1, s, 1, s, 1};
    std::vector<double> knots = {0, 0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 4};
    return NurbsCurve::closed(std::move(pts), std::move(w), 2, std::move(knots));
}

NurbsCurve read_curve_csv(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    const std::size_t ix = table.column("x"), iy = table.column("y"), iw = table.column("w");
    std::vector<Vec2> pts;
    std::vector<double> w;
    for (const auto& row : table.rows) {
        pts.emplace_back(parse_double(row.at(ix)), parse_double(row.at(iy)));
        w.push_back(parse_double(row.at(iw)));
    }
    return NurbsCurve::periodic(std::move(pts), std::move(w), 3);
}

void write_curve_csv(const NurbsCurve& curve, const std::filesystem::path& path) {
    std::ostringstream os;
    os.precision(17);
    os << "x,y,w\n";
    for (std::size_t i = 0; i < curve.size(); ++i)
        os << curve.control_points()[i].x() << ',' << curve.control_points()[i].y() << ',' << curve.weights()[i]
           << '\n';
    write_file_atomic(path, os.str());
}

}  // namespace holmes
