#pragma once

#include "holmes/common.hpp"
#include "holmes/geometry.hpp"

#include <Eigen/Core>

#include <array>
#include <span>
#include <vector>

namespace holmes {

using MultiIndex = std::array<int, 3>;

/// All exponent vectors with 0 <= |alpha| <= order in graded order, alpha = 0 first.
struct MultiIndexSet {
    int dim = 0;
    int order = 0;
    std::vector<MultiIndex> indices;

    std::size_t size() const noexcept { return indices.size(); }
    /// Position of alpha in `indices`, or -1.
    int find(const MultiIndex& alpha) const;
};

MultiIndexSet multi_indices(int dim, int order);

inline int total_degree(const MultiIndex& a) { return a[0] + a[1] + a[2]; }

struct HolmesParams {
    int n = 2;           // consistency order
    double p = 2.0;      // locality norm exponent
    double R_hat = 4.0;  // normalized support size
    double eps = 1e-11;  // truncation tolerance
    double gamma = 0.0;  // locality weight, gamma = beta h^2
    double h = 1.0;      // node spacing

    /// Locality weight of the dimensional problem.
    double beta() const { return gamma / (h * h); }
};

/// Builds parameters with gamma = -(ln eps + 1) / R_hat^p. Throws on R_hat < n,
/// eps outside (0, 1/e), n < 1, p < 1 or h <= 0.
HolmesParams holmes_params(int n, double p, double R_hat, double eps, double h = 1.0);

/// Throws InvalidArgument when the fields are inconsistent.
void validate(const HolmesParams& params);

/// r_p = h (-(ln eps + 1) / gamma)^(1/p).
double truncation_radius(const HolmesParams& params);

struct DualOptions {
    double tolerance = 1e-10;
    int max_iterations = 200;
    int max_halvings = 30;
    /// Record the dual objective after every accepted step.
    bool record_objective = false;
};

struct DualState {
    /// Multipliers for the unscaled monomials (x_a - x)^alpha, in MultiIndexSet order.
    Eigen::VectorXd lambda;
    /// Multipliers for the scaled monomials ((x_a - x)/h)^alpha.
    Eigen::VectorXd mu;
    double residual_norm = 0.0;
    int iterations = 0;
    std::vector<double> objective;
};

/// Support and the local quantities the dual needs, for one evaluation point.
struct LocalCloud {
    Point x = Point::Zero();
    int dim = 1;
    std::vector<std::size_t> neighbors;
    std::vector<Point> coords;
};

/// Gathers nodes within the truncation radius of x. Throws InfeasibleSupport
/// when fewer nodes than constraints are found.
LocalCloud gather(const NodeSet& ns, const Point& x, const HolmesParams& params, const MultiIndexSet& mis);

DualState solve_dual(const LocalCloud& cloud, const HolmesParams& params, const MultiIndexSet& mis,
                     const DualOptions& options = {});
DualState solve_dual(const NodeSet& ns, const Point& x, const HolmesParams& params, const MultiIndexSet& mis,
                     const DualOptions& options = {});

struct BasisEval {
    Point x = Point::Zero();
    int dim = 1;
    int deriv_order = 0;
    std::vector<std::size_t> neighbors;
    Eigen::VectorXd phi;
    Eigen::VectorXd phi_plus;
    Eigen::VectorXd phi_minus;
    /// neighbors x dim; row a holds grad phi_a.
    Eigen::MatrixXd grad;
    /// neighbors x dim*dim, row-major per neighbor: entry (a, i*dim + j) = d2 phi_a / dx_i dx_j.
    Eigen::MatrixXd hess;
    DualState dual;

    std::size_t size() const noexcept { return neighbors.size(); }
    double dd(std::size_t a, int i, int j) const { return hess(static_cast<Eigen::Index>(a), i * dim + j); }
    /// Laplacian of phi_a.
    double laplacian(std::size_t a) const;
};

/// phi and derivatives up to deriv_order (0, 1 or 2) at x.
BasisEval evaluate_basis(const NodeSet& ns, const Point& x, const HolmesParams& params, int deriv_order);
BasisEval evaluate_basis(const NodeSet& ns, const Point& x, const HolmesParams& params, int deriv_order,
                         const MultiIndexSet& mis, const DualOptions& options = {});
/// Same, on an explicit cloud (no truncation applied).
BasisEval evaluate_basis(const LocalCloud& cloud, const HolmesParams& params, int deriv_order,
                         const MultiIndexSet& mis, const DualOptions& options = {});

/// Largest constraint violation |sum_a phi_a q_a - q(x)| in scaled monomials.
double constraint_violation(const BasisEval& be, const NodeSet& ns, const HolmesParams& params,
                            const MultiIndexSet& mis);

struct ContinuityReport {
    std::size_t samples = 0;
    /// Largest change of any phi_a between adjacent samples (absent neighbors count as zero).
    double max_jump_phi = 0.0;
    /// Same for the gradient components.
    double max_jump_grad = 0.0;
    /// Largest |sum_a phi_a - 1| over the samples.
    double max_partition_error = 0.0;
};

/// Samples the basis at `samples` equally spaced points of the segment [a, b].
ContinuityReport continuity_probe(const NodeSet& ns, const HolmesParams& params, const Point& a, const Point& b,
                                  std::size_t samples);

}  // namespace holmes
