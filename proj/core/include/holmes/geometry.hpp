#pragma once

#include "holmes/common.hpp"
#include "holmes/nurbs.hpp"
#include "holmes/spatial_index.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string_view>
#include <span>
#include <variant>
#include <vector>

namespace holmes {

enum class NodeKind : int { interior = 0, dirichlet = 1, neumann = 2 };

/// How h is measured on a node cloud.
enum class SpacingMode { global_mean, per_node };

/// Discretization: node coordinates, boundary tags, outward normals on
/// Neumann nodes and the characteristic spacing h. Immutable; safe to share
/// between threads.
class NodeSet {
public:
    NodeSet() = default;
    /// Validates invariants and computes h as the mean nearest-neighbor distance.
    NodeSet(int dim, std::vector<Point> coords, std::vector<NodeKind> kinds, std::vector<Point> normals);

    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return coords_.size(); }
    const Point& coord(std::size_t a) const { return coords_[a]; }
    NodeKind kind(std::size_t a) const { return kinds_[a]; }
    /// Outward unit normal for Neumann nodes, zero otherwise.
    const Point& normal(std::size_t a) const { return normals_[a]; }
    std::span<const Point> coords() const noexcept { return coords_; }
    std::span<const NodeKind> kinds() const noexcept { return kinds_; }
    std::span<const Point> normals() const noexcept { return normals_; }

    /// Global mean nearest-neighbor distance.
    double h() const noexcept { return h_; }
    /// Nearest-neighbor distance of node a (the per-node spacing variant).
    double node_spacing(std::size_t a) const { return nn_distance_[a]; }

    std::size_t count(NodeKind k) const;

    /// Indices with |x - x_a|_p <= radius, ascending. p <= 0 means the max norm.
    std::vector<std::size_t> neighbors_within(const Point& x, double radius, double p) const;
    /// Nearest node to x (Euclidean).
    std::size_t nearest(const Point& x) const;

private:
    int dim_ = 0;
    std::vector<Point> coords_;
    std::vector<NodeKind> kinds_;
    std::vector<Point> normals_;
    std::vector<double> nn_distance_;
    double h_ = 0.0;
    std::shared_ptr<const CellGrid> index_;
};

/// Mean nearest-neighbor distance; requires at least two nodes.
double characteristic_spacing(const NodeSet& ns);
double characteristic_spacing(int dim, std::span<const Point> coords);

/// Exhaustive O(m) scan; reference for neighbors_within.
std::vector<std::size_t> neighbors_brute_force(const NodeSet& ns, const Point& x, double radius, double p);

// Domain variants. Lengths in the problem's units.
struct Interval {
    double a = -1.0, b = 1.0;
};
struct Disk {
    double radius = 1.0;
};
struct Ball {
    double radius = 1.0;
};
/// First quadrant of [-L, L]^2 with a hole of radius R at the origin.
struct QuarterPlateWithHole {
    double half_width = 4.0;
    double hole_radius = 1.0;
};
/// Three squares of side L: [0,L]^2, [-L,0]x[0,L], [0,L]x[-L,0]; re-entrant corner at the origin.
struct LShape {
    double size = 1.0;
};
/// Region enclosed by a closed NURBS curve.
struct NurbsRegion {
    std::shared_ptr<const NurbsCurve> curve;
};

using DomainSpec = std::variant<Interval, Disk, Ball, QuarterPlateWithHole, LShape, NurbsRegion>;

int domain_dimension(const DomainSpec& spec);
void validate_domain(const DomainSpec& spec);
/// Closed-domain membership with tolerance (boundary points count as inside).
bool domain_contains(const DomainSpec& spec, const Point& x, double tol = 1e-12);
std::string domain_name(const DomainSpec& spec);

enum class BoundaryCondition { dirichlet, neumann };

/// Chooses the condition for a boundary node from its position and outward normal.
using BoundaryRule = std::function<BoundaryCondition(const Point& x, const Point& normal)>;

BoundaryRule all_dirichlet();
BoundaryRule all_neumann();

/// Quasi-uniform node set filling the domain; boundary nodes lie on the
/// boundary. Nodes on two boundary pieces take dirichlet over neumann.
/// Throws InfeasibleSupport when fewer than `min_nodes` nodes result.
NodeSet generate_nodes(const DomainSpec& spec, double target_h, const BoundaryRule& rule,
                       std::size_t min_nodes = 0);

/// Largest target_h whose node set has at least `count` nodes, by bisection on the generator.
double target_h_for_count(const DomainSpec& spec, std::size_t count);

/// Displaces interior nodes by independent uniform components in
/// [-amplitude h, amplitude h]; boundary nodes are copied bit for bit.
NodeSet perturb_nodes(const NodeSet& ns, double amplitude, std::uint64_t seed);

/// CSV with header x,y,z,kind,nx,ny,nz. Unused columns are blank.
std::string node_set_to_csv(const NodeSet& ns);
void write_node_csv(const NodeSet& ns, const std::filesystem::path& path);
/// Dimension is inferred from which coordinate columns are filled.
NodeSet read_node_csv(const std::filesystem::path& path);
NodeSet parse_node_csv(std::string_view text);

/// Deterministic uniform doubles in [0, 1) from a 64-bit seed; identical across platforms.
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
    /// 53 random bits scaled to [0, 1).
    double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace holmes
