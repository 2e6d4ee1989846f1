#pragma once

#include "holmes/common.hpp"
#include "holmes/geometry.hpp"
#include "holmes/maxent.hpp"
#include "holmes/problems.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace holmes {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct CollocationOptions {
    int threads = 1;
    /// per_node evaluates row a with h = nearest-neighbor distance of node a (gamma kept).
    SpacingMode spacing = SpacingMode::global_mean;
    DualOptions dual;
    /// Also build the nodal evaluation matrices phi and grad.
    bool nodal_operators = true;
};

/// K d = f with node-major unknown layout (dof consecutive values per node).
struct CollocationSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    std::vector<NodeKind> row_kind;
    int dof = 1;
    int dim = 1;
    std::size_t max_row_nonzeros = 0;
    /// u^h(x_a) = (phi * d) for scalar fields; m x m.
    SparseMatrix phi;
    /// d u^h / d x_i at the nodes; one m x m matrix per direction.
    std::vector<SparseMatrix> grad;
};

CollocationSystem assemble(const ProblemDefinition& prob, const NodeSet& ns, const HolmesParams& params,
                           const CollocationOptions& options = {});

enum class SolverMethod { automatic, direct, iterative };

struct SolveOptions {
    SolverMethod method = SolverMethod::automatic;
    /// Unknown count at which automatic switches to the Krylov path.
    std::size_t direct_limit = 20000;
    double direct_tolerance = 1e-12;
    double iterative_tolerance = 1e-10;
    int max_iterations = 2000;
    int restart = 200;
    /// Incomplete LU parameters.
    double drop_tolerance = 1e-6;
    int fill_factor = 20;
};

struct SolveResult {
    Eigen::VectorXd d;
    /// ||S (K d - f)|| / ||S f|| with S scaling every row of K to unit max-abs
    /// entry (||S f|| replaced by 1 when f = 0). The tolerances apply to this value.
    double relative_residual = 0.0;
    /// ||K d - f|| / ||f|| without row scaling.
    double raw_relative_residual = 0.0;
    std::string method;
    int iterations = 0;
};

/// Solves the row-equilibrated system with up to three refinement steps.
/// Throws SolverError on singular factorization, Krylov stagnation, or when
/// the residual misses the tolerance of the chosen path.
SolveResult solve_system(const SparseMatrix& K, const Eigen::VectorXd& f, const SolveOptions& options = {});
SolveResult solve_system(const CollocationSystem& sys, const SolveOptions& options = {});

struct FieldEvaluation {
    /// points x dof.
    Eigen::MatrixXd value;
    /// points x (dof * dim), component-major: column c * dim + i = d u_c / d x_i.
    Eigen::MatrixXd gradient;
};

/// u^h = sum_a phi_a(x) d_a at arbitrary points.
FieldEvaluation evaluate_solution(const NodeSet& ns, const HolmesParams& params, const Eigen::VectorXd& d, int dof,
                                  std::span<const Point> points, int deriv_order);

/// u^h and grad u^h at the nodes from the assembled evaluation matrices.
FieldEvaluation nodal_solution(const CollocationSystem& sys, const Eigen::VectorXd& d);

/// MatrixMarket coordinate real general.
std::string matrix_market(const SparseMatrix& K);
void write_matrix_market(const SparseMatrix& K, const std::filesystem::path& path);

}  // namespace holmes
