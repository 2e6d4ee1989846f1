#include "holmes/geometry.hpp"

#include "holmes/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace holmes {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Collects nodes while the generators run.
struct NodeBuilder {
    int dim;
    const BoundaryRule& rule;
    std::vector<Point> coords;
    std::vector<NodeKind> kinds;
    std::vector<Point> normals;

    void interior(const Point& x) {
        coords.push_back(x);
        kinds.push_back(NodeKind::interior);
        normals.push_back(Point::Zero());
    }

    // `outward` lists the normals of every boundary piece the node lies on.
    void boundary(const Point& x, std::initializer_list<Point> outward) {
        bool any_dirichlet = false;
        Point sum = Point::Zero();
        for (const Point& n : outward) {
            if (rule(x, n) == BoundaryCondition::dirichlet) any_dirichlet = true;
            sum += n;
        }
        coords.push_back(x);
        if (any_dirichlet) {
            kinds.push_back(NodeKind::dirichlet);
            normals.push_back(Point::Zero());
        } else {
            kinds.push_back(NodeKind::neumann);
            normals.push_back(sum.normalized());
        }
    }

    NodeSet finish() { return NodeSet(dim, std::move(coords), std::move(kinds), std::move(normals)); }
};

Point p2(double x, double y) { return Point(x, y, 0.0); }

void build_interval(const Interval& d, double h, NodeBuilder& b) {
    const auto n = std::max<long>(1, std::lround((d.b - d.a) / h));
    const double step = (d.b - d.a) / static_cast<double>(n);
    for (long i = 0; i <= n; ++i) {
        const double x = i == n ? d.b : d.a + step * static_cast<double>(i);
        if (i == 0)
            b.boundary(Point(x, 0, 0), {Point(-1, 0, 0)});
        else if (i == n)
            b.boundary(Point(x, 0, 0), {Point(1, 0, 0)});
        else
            b.interior(Point(x, 0, 0));
    }
}

// Concentric rings with per-ring counts matched to the circumference.
void build_disk(const Disk& d, double h, NodeBuilder& b) {
    const auto rings = std::max<long>(1, std::lround(d.radius / h));
    const double dr = d.radius / static_cast<double>(rings);
    b.interior(p2(0, 0));
    for (long k = 1; k <= rings; ++k) {
        const double r = k == rings ? d.radius : dr * static_cast<double>(k);
        const auto count = std::max<long>(6, std::lround(2.0 * std::numbers::pi * r / h));
        const double offset = (k % 2 == 0) ? 0.5 : 0.0;
        for (long j = 0; j < count; ++j) {
            const double t = 2.0 * std::numbers::pi * (static_cast<double>(j) + offset) / static_cast<double>(count);
            const Point x = p2(r * std::cos(t), r * std::sin(t));
            if (k == rings)
                b.boundary(x, {p2(std::cos(t), std::sin(t))});
            else
                b.interior(x);
        }
    }
}

// Concentric shells, each a Fibonacci lattice with count matched to the area.
void build_ball(const Ball& d, double h, NodeBuilder& b) {
    const auto shells = std::max<long>(1, std::lround(d.radius / h));
    const double dr = d.radius / static_cast<double>(shells);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const double cell_area = std::sqrt(3.0) / 2.0 * h * h;
    b.interior(Point::Zero());
    for (long k = 1; k <= shells; ++k) {
        const double r = k == shells ? d.radius : dr * static_cast<double>(k);
        const auto count = std::max<long>(8, std::lround(4.0 * std::numbers::pi * r * r / cell_area));
        const double twist = 0.7 * static_cast<double>(k);
        for (long j = 0; j < count; ++j) {
            const double z = 1.0 - (2.0 * static_cast<double>(j) + 1.0) / static_cast<double>(count);
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double t = golden * static_cast<double>(j) + twist;
            const Point u(rho * std::cos(t), rho * std::sin(t), z);
            if (k == shells)
                b.boundary(r * u, {u});
            else
                b.interior(r * u);
        }
    }
}

void build_quarter_plate(const QuarterPlateWithHole& d, double h, NodeBuilder& b) {
    const double L = d.half_width, R = d.hole_radius;
    const auto n = std::max<long>(2, std::lround(L / h));
    const double s = L / static_cast<double>(n);
    for (long j = 0; j <= n; ++j) {
        for (long i = 0; i <= n; ++i) {
            const double x = i == n ? L : s * static_cast<double>(i);
            const double y = j == n ? L : s * static_cast<double>(j);
            if (std::hypot(x, y) < R + 0.5 * s) continue;
            std::vector<Point> normals;
            if (i == 0) normals.push_back(p2(-1, 0));
            if (j == 0) normals.push_back(p2(0, -1));
            if (i == n) normals.push_back(p2(1, 0));
            if (j == n) normals.push_back(p2(0, 1));
            if (normals.empty())
                b.interior(p2(x, y));
            else if (normals.size() == 1)
                b.boundary(p2(x, y), {normals[0]});
            else
                b.boundary(p2(x, y), {normals[0], normals[1]});
        }
    }
    const auto arc = std::max<long>(2, std::lround(0.5 * std::numbers::pi * R / s));
    for (long j = 0; j <= arc; ++j) {
        const double t = 0.5 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(arc);
        const double c = j == arc ? 0.0 : std::cos(t), sn = j == 0 ? 0.0 : std::sin(t);
        const Point x = p2(R * c, R * sn);
        const Point hole = p2(-c, -sn);
        if (j == 0)
            b.boundary(x, {hole, p2(0, -1)});
        else if (j == arc)
            b.boundary(x, {hole, p2(-1, 0)});
        else
            b.boundary(x, {hole});
    }
}

// Union of three tensor grids on squares of side L, duplicates merged.
void build_l_shape(const LShape& d, double h, NodeBuilder& b) {
    const double L = d.size;
    const auto n = std::max<long>(2, std::lround(L / h));
    for (long j = -n; j <= n; ++j) {
        for (long i = -n; i <= n; ++i) {
            if (i < 0 && j < 0) continue;
            const double x = L * static_cast<double>(i) / static_cast<double>(n);
            const double y = L * static_cast<double>(j) / static_cast<double>(n);
            std::vector<Point> normals;
            if (i == -n) normals.push_back(p2(-1, 0));
            if (i == n) normals.push_back(p2(1, 0));
            if (j == -n) normals.push_back(p2(0, -1));
            if (j == n) normals.push_back(p2(0, 1));
            if (i == 0 && j <= 0) normals.push_back(p2(-1, 0));  // re-entrant edge below the corner
            if (j == 0 && i <= 0) normals.push_back(p2(0, -1));  // re-entrant edge left of the corner
            if (normals.empty())
                b.interior(p2(x, y));
            else if (normals.size() == 1)
                b.boundary(p2(x, y), {normals[0]});
            else
                b.boundary(p2(x, y), {normals[0], normals[1]});
        }
    }
}

void build_nurbs(const NurbsRegion& d, double h, NodeBuilder& b) {
    const NurbsCurve& c = *d.curve;
    const auto count = std::max<std::size_t>(8, static_cast<std::size_t>(std::lround(c.arc_length() / h)));
    for (const auto& s : c.sample_boundary(count))
        b.boundary(p2(s.position.x(), s.position.y()), {p2(s.normal.x(), s.normal.y())});
    const auto box = c.bounding_box();
    const double x0 = std::floor(box.min().x() / h) * h, y0 = std::floor(box.min().y() / h) * h;
    const auto nx = static_cast<long>(std::ceil((box.max().x() - x0) / h)) + 1;
    const auto ny = static_cast<long>(std::ceil((box.max().y() - y0) / h)) + 1;
    for (long j = 0; j < ny; ++j)
        for (long i = 0; i < nx; ++i) {
            const Vec2 x(x0 + h * static_cast<double>(i), y0 + h * static_cast<double>(j));
            if (c.contains(x) && c.distance(x) >= 0.5 * h) b.interior(p2(x.x(), x.y()));
        }
}

}  // namespace

NodeSet::NodeSet(int dim, std::vector<Point> coords, std::vector<NodeKind> kinds, std::vector<Point> normals)
    : dim_(dim), coords_(std::move(coords)), kinds_(std::move(kinds)), normals_(std::move(normals)) {
    HOLMES_REQUIRE(dim >= 1 && dim <= 3, InvalidArgument, "NodeSet: dimension must be 1, 2 or 3");
    HOLMES_REQUIRE(kinds_.size() == coords_.size() && normals_.size() == coords_.size(), InvalidArgument,
                   "NodeSet: coords, kinds and normals differ in length");
    HOLMES_REQUIRE(coords_.size() >= 2, InvalidArgument, "NodeSet: need at least two nodes");
    for (std::size_t a = 0; a < coords_.size(); ++a) {
        for (int i = 0; i < 3; ++i) {
            HOLMES_REQUIRE(std::isfinite(coords_[a][i]), InvalidArgument, "NodeSet: non-finite coordinate");
            if (i >= dim) coords_[a][i] = 0.0;
        }
        if (kinds_[a] == NodeKind::neumann) {
            HOLMES_REQUIRE(std::abs(normals_[a].norm() - 1.0) <= 1e-12, InvalidArgument,
                           "NodeSet: neumann node " + std::to_string(a) + " lacks a unit normal");
        } else {
            normals_[a].setZero();
        }
    }
    index_ = std::make_shared<const CellGrid>(dim_, coords_);
    nn_distance_.resize(coords_.size());
    double sum = 0.0;
    for (std::size_t a = 0; a < coords_.size(); ++a) {
        nn_distance_[a] = (coords_[index_->nearest(coords_[a], a)] - coords_[a]).norm();
        sum += nn_distance_[a];
    }
    h_ = sum / static_cast<double>(coords_.size());
    for (std::size_t a = 0; a < coords_.size(); ++a)
        HOLMES_REQUIRE(nn_distance_[a] > 1e-12 * h_, InvalidArgument,
                       "NodeSet: node " + std::to_string(a) + " coincides with another node");
}

std::size_t NodeSet::count(NodeKind k) const { return static_cast<std::size_t>(std::count(kinds_.begin(), kinds_.end(), k)); }

std::vector<std::size_t> NodeSet::neighbors_within(const Point& x, double radius, double p) const {
    HOLMES_REQUIRE(radius > 0.0, InvalidArgument, "neighbors_within: radius must be positive");
    HOLMES_REQUIRE(p <= 0.0 || p >= 1.0, InvalidArgument, "neighbors_within: p must be >= 1");
    return index_->within(x, radius, p);
}

std::size_t NodeSet::nearest(const Point& x) const {
    return index_->nearest(x, static_cast<std::size_t>(-1));
}

double characteristic_spacing(const NodeSet& ns) { return characteristic_spacing(ns.dim(), ns.coords()); }

double characteristic_spacing(int dim, std::span<const Point> coords) {
    HOLMES_REQUIRE(coords.size() >= 2, InvalidArgument, "characteristic_spacing: need at least two nodes");
    const CellGrid grid(dim, coords);
    double sum = 0.0;
    for (std::size_t a = 0; a < coords.size(); ++a) sum += (coords[grid.nearest(coords[a], a)] - coords[a]).norm();
    return sum / static_cast<double>(coords.size());
}

std::vector<std::size_t> neighbors_brute_force(const NodeSet& ns, const Point& x, double radius, double p) {
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < ns.size(); ++a)
        if (lp_distance(x, ns.coord(a), ns.dim(), p) <= radius) out.push_back(a);
    return out;
}

int domain_dimension(const DomainSpec& spec) {
    return std::visit(overloaded{[](const Interval&) { return 1; }, [](const Ball&) { return 3; },
                                 [](const auto&) { return 2; }},
                      spec);
}

void validate_domain(const DomainSpec& spec) {
    std::visit(overloaded{
                   [](const Interval& d) {
                       HOLMES_REQUIRE(d.b > d.a, InvalidArgument, "interval: need a < b");
                   },
                   [](const Disk& d) { HOLMES_REQUIRE(d.radius > 0, InvalidArgument, "disk: radius must be positive"); },
                   [](const Ball& d) { HOLMES_REQUIRE(d.radius > 0, InvalidArgument, "sphere: radius must be positive"); },
                   [](const QuarterPlateWithHole& d) {
                       HOLMES_REQUIRE(d.half_width > 0 && d.hole_radius > 0, InvalidArgument,
                                      "quarter plate: sizes must be positive");
                       HOLMES_REQUIRE(d.hole_radius < d.half_width, InvalidArgument,
                                      "quarter plate: hole radius must be below the half width");
                   },
                   [](const LShape& d) { HOLMES_REQUIRE(d.size > 0, InvalidArgument, "l-shape: size must be positive"); },
                   [](const NurbsRegion& d) {
                       HOLMES_REQUIRE(d.curve != nullptr, InvalidArgument, "nurbs region: missing curve");
                   },
               },
               spec);
}

bool domain_contains(const DomainSpec& spec, const Point& x, double tol) {
    return std::visit(
        overloaded{
            [&](const Interval& d) { return x[0] >= d.a - tol && x[0] <= d.b + tol; },
            [&](const Disk& d) { return std::hypot(x[0], x[1]) <= d.radius + tol; },
            [&](const Ball& d) { return x.norm() <= d.radius + tol; },
            [&](const QuarterPlateWithHole& d) {
                return x[0] >= -tol && x[1] >= -tol && x[0] <= d.half_width + tol && x[1] <= d.half_width + tol &&
                       std::hypot(x[0], x[1]) >= d.hole_radius - tol;
            },
            [&](const LShape& d) {
                const bool box = std::abs(x[0]) <= d.size + tol && std::abs(x[1]) <= d.size + tol;
                return box && !(x[0] < -tol && x[1] < -tol);
            },
            [&](const NurbsRegion& d) {
                const Vec2 q(x[0], x[1]);
                return d.curve->contains(q) || d.curve->distance(q) <= std::max(tol, 1e-9);
            },
        },
        spec);
}

std::string domain_name(const DomainSpec& spec) {
    return std::visit(overloaded{[](const Interval&) { return std::string("interval"); },
                                 [](const Disk&) { return std::string("disk"); },
                                 [](const Ball&) { return std::string("sphere"); },
                                 [](const QuarterPlateWithHole&) { return std::string("quarter-plate-with-hole"); },
                                 [](const LShape&) { return std::string("l-shape"); },
                                 [](const NurbsRegion&) { return std::string("nurbs"); }},
                      spec);
}

BoundaryRule all_dirichlet() {
    return [](const Point&, const Point&) { return BoundaryCondition::dirichlet; };
}

BoundaryRule all_neumann() {
    return [](const Point&, const Point&) { return BoundaryCondition::neumann; };
}

NodeSet generate_nodes(const DomainSpec& spec, double target_h, const BoundaryRule& rule, std::size_t min_nodes) {
    validate_domain(spec);
    HOLMES_REQUIRE(target_h > 0.0 && std::isfinite(target_h), InvalidArgument,
                   "generate_nodes: target_h must be positive");
    NodeBuilder b{domain_dimension(spec), rule, {}, {}, {}};
    std::visit(overloaded{
                   [&](const Interval& d) { build_interval(d, target_h, b); },
                   [&](const Disk& d) { build_disk(d, target_h, b); },
                   [&](const Ball& d) { build_ball(d, target_h, b); },
                   [&](const QuarterPlateWithHole& d) { build_quarter_plate(d, target_h, b); },
                   [&](const LShape& d) { build_l_shape(d, target_h, b); },
                   [&](const NurbsRegion& d) { build_nurbs(d, target_h, b); },
               },
               spec);
    const std::size_t floor = std::max<std::size_t>(min_nodes, 2);
    HOLMES_REQUIRE(b.coords.size() >= floor, InfeasibleSupport,
                   "generate_nodes: spacing " + format_double(target_h) + " gives " +
                       std::to_string(b.coords.size()) + " nodes on the " + domain_name(spec) + ", need at least " +
                       std::to_string(floor));
    return b.finish();
}

double target_h_for_count(const DomainSpec& spec, std::size_t count) {
    HOLMES_REQUIRE(count >= 2, InvalidArgument, "target_h_for_count: count must be at least 2");
    const auto rule = all_dirichlet();
    auto nodes_at = [&](double h) { return generate_nodes(spec, h, rule).size(); };
    double hi = 0.0;
    std::visit(overloaded{[&](const Interval& d) { hi = d.b - d.a; }, [&](const Disk& d) { hi = d.radius; },
                          [&](const Ball& d) { hi = d.radius; },
                          [&](const QuarterPlateWithHole& d) { hi = d.half_width; },
                          [&](const LShape& d) { hi = d.size; },
                          [&](const NurbsRegion& d) { hi = d.curve->bounding_box().sizes().maxCoeff(); }},
               spec);
    double lo = hi;
    while (nodes_at(lo) < count) lo *= 0.5;
    if (lo == hi) return hi;
    // nodes_at(lo) >= count > nodes_at(2 lo)
    hi = 2.0 * lo;
    for (int iter = 0; iter < 40; ++iter) {
        const double mid = std::sqrt(lo * hi);
        if (nodes_at(mid) >= count)
            lo = mid;
        else
            hi = mid;
    }
    const auto above = static_cast<double>(nodes_at(lo)), below = static_cast<double>(nodes_at(hi));
    return std::abs(above - static_cast<double>(count)) <= std::abs(below - static_cast<double>(count)) ? lo : hi;
}

NodeSet perturb_nodes(const NodeSet& ns, double amplitude, std::uint64_t seed) {
    HOLMES_REQUIRE(amplitude >= 0.0 && amplitude < 0.5, InvalidArgument,
                   "perturb_nodes: amplitude must lie in [0, 0.5)");
    std::vector<Point> coords(ns.coords().begin(), ns.coords().end());
    if (amplitude > 0.0) {
        UniformStream rng(seed);
        const double a = amplitude * ns.h();
        for (std::size_t k = 0; k < coords.size(); ++k) {
            if (ns.kind(k) != NodeKind::interior) continue;
            for (int i = 0; i < ns.dim(); ++i) coords[k][i] += rng.uniform(-a, a);
        }
    }
    return NodeSet(ns.dim(), std::move(coords), std::vector<NodeKind>(ns.kinds().begin(), ns.kinds().end()),
                   std::vector<Point>(ns.normals().begin(), ns.normals().end()));
}

std::string node_set_to_csv(const NodeSet& ns) {
    std::ostringstream os;
    os << "x,y,z,kind,nx,ny,nz\n";
    for (std::size_t a = 0; a < ns.size(); ++a) {
        for (int i = 0; i < 3; ++i) {
            if (i < ns.dim()) os << format_double(ns.coord(a)[i]);
            os << ',';
        }
        os << static_cast<int>(ns.kind(a));
        for (int i = 0; i < 3; ++i) {
            os << ',';
            if (ns.kind(a) == NodeKind::neumann && i < ns.dim()) os << format_double(ns.normal(a)[i]);
        }
        os << '\n';
    }
    return os.str();
}

void write_node_csv(const NodeSet& ns, const std::filesystem::path& path) {
    write_file_atomic(path, node_set_to_csv(ns));
}

NodeSet parse_node_csv(std::string_view text) {
    const CsvTable t = parse_csv(text);
    const std::size_t cx[3] = {t.column("x"), t.column("y"), t.column("z")};
    const std::size_t cn[3] = {t.column("nx"), t.column("ny"), t.column("nz")};
    const std::size_t ck = t.column("kind");
    int dim = 0;
    for (int i = 0; i < 3; ++i)
        for (const auto& row : t.rows)
            if (!row[cx[i]].empty()) dim = std::max(dim, i + 1);
    HOLMES_REQUIRE(dim >= 1, InvalidArgument, "node CSV: no coordinates");
    std::vector<Point> coords, normals;
    std::vector<NodeKind> kinds;
    for (const auto& row : t.rows) {
        Point x = Point::Zero(), n = Point::Zero();
        for (int i = 0; i < dim; ++i) {
            x[i] = parse_double(row[cx[i]]);
            if (!row[cn[i]].empty()) n[i] = parse_double(row[cn[i]]);
        }
        const long long k = parse_int(row[ck]);
        HOLMES_REQUIRE(k >= 0 && k <= 2, InvalidArgument, "node CSV: kind must be 0, 1 or 2");
        coords.push_back(x);
        normals.push_back(n);
        kinds.push_back(static_cast<NodeKind>(k));
    }
    return NodeSet(dim, std::move(coords), std::move(kinds), std::move(normals));
}

NodeSet read_node_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    HOLMES_REQUIRE(in.good(), InvalidArgument, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_node_csv(ss.str());
}

}  // namespace holmes
