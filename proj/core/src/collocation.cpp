#include "holmes/collocation.hpp"

#include "holmes/io.hpp"
#include "holmes/parallel.hpp"

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <cmath>
#include <limits>
#include <sstream>

namespace holmes {

namespace {

struct RowBlock {
    std::vector<Eigen::Triplet<double>> k, phi;
    std::vector<std::vector<Eigen::Triplet<double>>> grad;
    Eigen::VectorXd rhs;
    std::size_t nonzeros = 0;
};

std::string node_label(const NodeSet& ns, std::size_t a) {
    std::ostringstream os;
    os << "node " << a << " (";
    for (int i = 0; i < ns.dim(); ++i) os << (i ? ", " : "") << format_double(ns.coord(a)[i]);
    os << ")";
    return os.str();
}

SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const std::vector<Eigen::Triplet<double>>& t) {
    SparseMatrix M(rows, cols);
    M.setFromTriplets(t.begin(), t.end());
    M.makeCompressed();
    return M;
}

}  // namespace

CollocationSystem assemble(const ProblemDefinition& prob, const NodeSet& ns, const HolmesParams& params,
                           const CollocationOptions& opt) {
    validate(params);
    HOLMES_REQUIRE(prob.dof >= 1, InvalidArgument, "assemble: dof must be positive");
    HOLMES_REQUIRE(domain_dimension(prob.domain) == ns.dim(), InvalidArgument,
                   "assemble: node set dimension does not match the problem");
    for (const RowOperator* op : {&prob.interior, &prob.dirichlet, &prob.neumann})
        HOLMES_REQUIRE(op->deriv_order >= 0 && op->deriv_order <= 2 && op->apply, InvalidArgument,
                       "assemble: operator needs derivatives of order above 2 or is missing");

    const int dof = prob.dof, dim = ns.dim();
    const std::size_t m = ns.size();
    const MultiIndexSet mis = multi_indices(dim, params.n);
    std::vector<RowBlock> blocks(m);

    parallel_for(m, opt.threads, [&](std::size_t a) {
        const NodeKind kind = ns.kind(a);
        const RowOperator& op =
            kind == NodeKind::interior ? prob.interior : kind == NodeKind::dirichlet ? prob.dirichlet : prob.neumann;
        HolmesParams local = params;
        if (opt.spacing == SpacingMode::per_node) local.h = ns.node_spacing(a);
        const int order = std::max(op.deriv_order, opt.nodal_operators ? 1 : 0);
        BasisEval be;
        try {
            be = evaluate_basis(ns, ns.coord(a), local, order, mis, opt.dual);
        } catch (const DualDivergence& e) {
            throw DualDivergence(node_label(ns, a) + ": " + e.what(), e.residual());
        } catch (const InfeasibleSupport& e) {
            throw InfeasibleSupport(node_label(ns, a) + ": " + e.what());
        }
        const Eigen::MatrixXd row = op.apply(be, ns.normal(a));
        HOLMES_REQUIRE(row.rows() == dof && row.cols() == static_cast<Eigen::Index>(be.size()) * dof, InvalidArgument,
                       "assemble: operator returned a block of the wrong shape");
        Eigen::VectorXd rhs = kind == NodeKind::interior    ? prob.source(ns.coord(a))
                              : kind == NodeKind::dirichlet ? prob.dirichlet_data(ns.coord(a))
                                                            : prob.neumann_data(ns.coord(a), ns.normal(a));
        HOLMES_REQUIRE(rhs.size() == dof, InvalidArgument, "assemble: data function returned the wrong length");

        RowBlock& blk = blocks[a];
        blk.rhs = std::move(rhs);
        blk.k.reserve(static_cast<std::size_t>(row.size()));
        std::size_t nz = 0;
        for (int c = 0; c < dof; ++c) {
            std::size_t row_nz = 0;
            for (std::size_t b = 0; b < be.size(); ++b)
                for (int e = 0; e < dof; ++e) {
                    const double v = row(c, static_cast<Eigen::Index>(b) * dof + e);
                    if (v == 0.0) continue;
                    blk.k.emplace_back(static_cast<int>(a) * dof + c, static_cast<int>(be.neighbors[b]) * dof + e, v);
                    ++row_nz;
                }
            nz = std::max(nz, row_nz);
        }
        blk.nonzeros = nz;
        if (opt.nodal_operators) {
            blk.grad.resize(static_cast<std::size_t>(dim));
            for (std::size_t b = 0; b < be.size(); ++b) {
                const auto i = static_cast<Eigen::Index>(b);
                const int col = static_cast<int>(be.neighbors[b]);
                blk.phi.emplace_back(static_cast<int>(a), col, be.phi[i]);
                for (int d = 0; d < dim; ++d) blk.grad[d].emplace_back(static_cast<int>(a), col, be.grad(i, d));
            }
        }
    });

    CollocationSystem sys;
    sys.dof = dof;
    sys.dim = dim;
    const auto n = static_cast<Eigen::Index>(m) * dof;
    sys.rhs.resize(n);
    sys.row_kind.resize(static_cast<std::size_t>(n));
    std::vector<Eigen::Triplet<double>> kt, pt;
    std::vector<std::vector<Eigen::Triplet<double>>> gt(static_cast<std::size_t>(dim));
    for (std::size_t a = 0; a < m; ++a) {
        RowBlock& blk = blocks[a];
        kt.insert(kt.end(), blk.k.begin(), blk.k.end());
        sys.rhs.segment(static_cast<Eigen::Index>(a) * dof, dof) = blk.rhs;
        for (int c = 0; c < dof; ++c) sys.row_kind[a * dof + c] = ns.kind(a);
        sys.max_row_nonzeros = std::max(sys.max_row_nonzeros, blk.nonzeros);
        if (opt.nodal_operators) {
            pt.insert(pt.end(), blk.phi.begin(), blk.phi.end());
            for (int d = 0; d < dim; ++d) gt[d].insert(gt[d].end(), blk.grad[d].begin(), blk.grad[d].end());
        }
        blk = RowBlock{};
    }
    sys.matrix = from_triplets(n, n, kt);
    for (Eigen::Index r = 0; r < n; ++r)
        HOLMES_REQUIRE(sys.matrix.outerIndexPtr()[r + 1] > sys.matrix.outerIndexPtr()[r], InvalidArgument,
                       "assemble: row " + std::to_string(r) + " is empty");
    if (opt.nodal_operators) {
        const auto mm = static_cast<Eigen::Index>(m);
        sys.phi = from_triplets(mm, mm, pt);
        for (int d = 0; d < dim; ++d) sys.grad.push_back(from_triplets(mm, mm, gt[d]));
    }
    return sys;
}

namespace {

double relative_residual(const SparseMatrix& K, const Eigen::VectorXd& f, const Eigen::VectorXd& d) {
    const double fn = f.norm();
    return (K * d - f).norm() / (fn > 0.0 ? fn : 1.0);
}

// Rows scaled to unit max-abs entry. Interior rows carry 1/h^2 entries with a
// vanishing right-hand side, so the unscaled residual is dominated by rounding there.
struct Equilibrated {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
};

Equilibrated equilibrate(const SparseMatrix& K, const Eigen::VectorXd& f) {
    SparseMatrix S = K;
    Eigen::VectorXd b = f;
    for (Eigen::Index r = 0; r < S.outerSize(); ++r) {
        double mx = 0.0;
        for (SparseMatrix::InnerIterator it(S, r); it; ++it) mx = std::max(mx, std::abs(it.value()));
        if (mx == 0.0) throw SolverError("solve: row " + std::to_string(r) + " is zero", 0.0);
        for (SparseMatrix::InnerIterator it(S, r); it; ++it) it.valueRef() /= mx;
        b[r] /= mx;
    }
    return {Eigen::SparseMatrix<double>(S), b};
}

template <class Solve>
void refine(const Equilibrated& eq, SolveResult& res, double tol, Solve&& solve) {
    res.relative_residual = relative_residual(eq.A, eq.b, res.d);
    for (int step = 0; step < 3 && res.relative_residual > 0.1 * tol && std::isfinite(res.relative_residual); ++step) {
        const Eigen::VectorXd trial = res.d + solve(eq.b - eq.A * res.d);
        const double r = relative_residual(eq.A, eq.b, trial);
        if (!(r < res.relative_residual)) break;
        res.d = trial;
        res.relative_residual = r;
    }
}

SolveResult solve_direct(const Equilibrated& eq, const SolveOptions& opt) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(eq.A);
    lu.factorize(eq.A);
    if (lu.info() != Eigen::Success)
        throw SolverError("direct solve: factorization failed (" + lu.lastErrorMessage() + ")",
                          std::numeric_limits<double>::infinity());
    SolveResult res;
    res.method = "sparse-lu";
    res.d = lu.solve(eq.b);
    refine(eq, res, opt.direct_tolerance, [&](const Eigen::VectorXd& r) { return Eigen::VectorXd(lu.solve(r)); });
    if (!(res.relative_residual <= opt.direct_tolerance)) {
        const double logdet = lu.logAbsDeterminant();
        throw SolverError("direct solve: relative residual " + format_double(res.relative_residual) +
                              " above tolerance " + format_double(opt.direct_tolerance) +
                              " (log|det U| = " + format_double(logdet) + ")",
                          res.relative_residual);
    }
    return res;
}

SolveResult solve_iterative(const Equilibrated& eq, const SolveOptions& opt) {
    Eigen::GMRES<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> gmres;
    gmres.preconditioner().setDroptol(opt.drop_tolerance);
    gmres.preconditioner().setFillfactor(opt.fill_factor);
    gmres.set_restart(opt.restart);
    gmres.setMaxIterations(opt.max_iterations);
    gmres.setTolerance(opt.iterative_tolerance * 0.1);
    gmres.compute(eq.A);
    if (gmres.info() != Eigen::Success)
        throw SolverError("iterative solve: incomplete LU failed", std::numeric_limits<double>::infinity());
    SolveResult res;
    res.method = "gmres-ilut";
    res.d = gmres.solve(eq.b);
    res.iterations = static_cast<int>(gmres.iterations());
    res.relative_residual = relative_residual(eq.A, eq.b, res.d);
    if (!(res.relative_residual <= opt.iterative_tolerance))
        throw SolverError("iterative solve: stagnated at relative residual " + format_double(res.relative_residual) +
                              " after " + std::to_string(res.iterations) + " iterations",
                          res.relative_residual);
    return res;
}

}  // namespace

SolveResult solve_system(const SparseMatrix& K, const Eigen::VectorXd& f, const SolveOptions& opt) {
    HOLMES_REQUIRE(K.rows() == K.cols() && K.rows() == f.size() && K.rows() > 0, InvalidArgument,
                   "solve_system: need a non-empty square system");
    const bool direct = opt.method == SolverMethod::direct ||
                        (opt.method == SolverMethod::automatic && static_cast<std::size_t>(K.rows()) < opt.direct_limit);
    const Equilibrated eq = equilibrate(K, f);
    SolveResult res = direct ? solve_direct(eq, opt) : solve_iterative(eq, opt);
    res.raw_relative_residual = relative_residual(K, f, res.d);
    return res;
}

SolveResult solve_system(const CollocationSystem& sys, const SolveOptions& opt) {
    return solve_system(sys.matrix, sys.rhs, opt);
}

FieldEvaluation evaluate_solution(const NodeSet& ns, const HolmesParams& params, const Eigen::VectorXd& d, int dof,
                                  std::span<const Point> points, int deriv_order) {
    HOLMES_REQUIRE(deriv_order == 0 || deriv_order == 1, InvalidArgument,
                   "evaluate_solution: deriv_order must be 0 or 1");
    HOLMES_REQUIRE(d.size() == static_cast<Eigen::Index>(ns.size()) * dof, InvalidArgument,
                   "evaluate_solution: coefficient vector has the wrong length");
    const MultiIndexSet mis = multi_indices(ns.dim(), params.n);
    const int dim = ns.dim();
    FieldEvaluation out;
    const auto P = static_cast<Eigen::Index>(points.size());
    out.value = Eigen::MatrixXd::Zero(P, dof);
    if (deriv_order == 1) out.gradient = Eigen::MatrixXd::Zero(P, dof * dim);
    for (Eigen::Index p = 0; p < P; ++p) {
        const BasisEval be = evaluate_basis(ns, points[static_cast<std::size_t>(p)], params, deriv_order, mis);
        for (std::size_t b = 0; b < be.size(); ++b) {
            const auto i = static_cast<Eigen::Index>(b);
            for (int c = 0; c < dof; ++c) {
                const double coef = d[static_cast<Eigen::Index>(be.neighbors[b]) * dof + c];
                out.value(p, c) += be.phi[i] * coef;
                if (deriv_order == 1)
                    for (int k = 0; k < dim; ++k) out.gradient(p, c * dim + k) += be.grad(i, k) * coef;
            }
        }
    }
    return out;
}

FieldEvaluation nodal_solution(const CollocationSystem& sys, const Eigen::VectorXd& d) {
    HOLMES_REQUIRE(sys.phi.rows() > 0, InvalidArgument, "nodal_solution: system was assembled without nodal operators");
    const Eigen::Index m = sys.phi.rows();
    HOLMES_REQUIRE(d.size() == m * sys.dof, InvalidArgument, "nodal_solution: coefficient vector has the wrong length");
    FieldEvaluation out;
    out.value.resize(m, sys.dof);
    out.gradient.resize(m, sys.dof * sys.dim);
    for (int c = 0; c < sys.dof; ++c) {
        const Eigen::VectorXd dc = Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<>>(
            d.data() + c, m, Eigen::InnerStride<>(sys.dof));
        out.value.col(c) = sys.phi * dc;
        for (int k = 0; k < sys.dim; ++k) out.gradient.col(c * sys.dim + k) = sys.grad[k] * dc;
    }
    return out;
}

std::string matrix_market(const SparseMatrix& K) {
    std::ostringstream os;
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << K.rows() << ' ' << K.cols() << ' ' << K.nonZeros() << '\n';
    for (Eigen::Index r = 0; r < K.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(K, r); it; ++it)
            os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << format_double(it.value()) << '\n';
    return os.str();
}

void write_matrix_market(const SparseMatrix& K, const std::filesystem::path& path) {
    write_file_atomic(path, matrix_market(K));
}

}  // namespace holmes
