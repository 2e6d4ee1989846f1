#include "oracles.hpp"

#include "holmes/analysis.hpp"
#include "holmes/collocation.hpp"
#include "holmes/polynomial.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace holmes;

namespace {

BoundaryRule right_half_neumann() {
    return [](const Point& x, const Point&) { return x[0] > 0.2 ? BoundaryCondition::neumann : BoundaryCondition::dirichlet; };
}

double max_nodal_error(const ProblemDefinition& prob, int n, double h, double perturbation) {
    StudySettings s;
    s.n = n;
    s.R_hat = n + 2;
    s.perturbation = perturbation;
    s.seed = 4;
    const NodeSet ns = make_grid(prob, h, s);
    const SolveOutcome out = solve_on_nodes(prob, ns, s);
    const double scale = out.exact_value.cwiseAbs().maxCoeff();
    return (out.nodal.value - out.exact_value).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

TEST(Assemble, DirichletRowIsBasisTrace) {
    const ProblemDefinition prob = make_problem("helm1d-essential");
    const NodeSet ns = generate_nodes(prob.domain, 0.1, prob.boundary);
    const auto hp = holmes_params(2, 2, 4, 1e-11, ns.h());
    const CollocationSystem sys = assemble(prob, ns, hp);
    for (std::size_t a = 0; a < ns.size(); ++a) {
        const BasisEval be = evaluate_basis(ns, ns.coord(a), hp, 2);
        const auto r = static_cast<Eigen::Index>(a);
        for (std::size_t b = 0; b < be.size(); ++b) {
            const auto k = static_cast<Eigen::Index>(b);
            const double expect = ns.kind(a) == NodeKind::dirichlet ? be.phi[k] : be.dd(b, 0, 0) + be.phi[k];
            EXPECT_NEAR(sys.matrix.coeff(r, static_cast<Eigen::Index>(be.neighbors[b])), expect,
                        1e-12 * (1 + std::abs(expect)));
        }
        const double x = ns.coord(a)[0];
        EXPECT_NEAR(sys.rhs[r], ns.kind(a) == NodeKind::dirichlet ? helmholtz1d(x).u : helmholtz1d(x).b, 1e-14);
        if (ns.kind(a) == NodeKind::interior) EXPECT_LE(sys.matrix.row(r).nonZeros(), 9);
    }
    // The trace row is not a Kronecker row.
    EXPECT_GT(std::abs(sys.matrix.coeff(0, 1)), 1e-8);
}

TEST(Assemble, NeumannRowIsFluxOperator) {
    const ProblemDefinition prob = make_problem("helm1d-natural");
    const NodeSet ns = generate_nodes(prob.domain, 0.1, prob.boundary);
    const auto hp = holmes_params(2, 2, 4, 1e-11, ns.h());
    const CollocationSystem sys = assemble(prob, ns, hp);
    const std::size_t last = ns.size() - 1;
    ASSERT_EQ(ns.kind(last), NodeKind::neumann);
    const BasisEval be = evaluate_basis(ns, ns.coord(last), hp, 1);
    for (std::size_t b = 0; b < be.size(); ++b)
        EXPECT_NEAR(sys.matrix.coeff(static_cast<Eigen::Index>(last), static_cast<Eigen::Index>(be.neighbors[b])),
                    be.grad(static_cast<Eigen::Index>(b), 0), 1e-12 * (1 + std::abs(be.grad(static_cast<Eigen::Index>(b), 0))));
    EXPECT_NEAR(sys.rhs[static_cast<Eigen::Index>(last)], helmholtz1d(1.0).du, 1e-14);
}

TEST(Assemble, Rejects) {
    ProblemDefinition prob = make_problem("helm1d-essential");
    const NodeSet ns = generate_nodes(prob.domain, 0.1, prob.boundary);
    const auto hp = holmes_params(2, 2, 4, 1e-11, ns.h());
    ProblemDefinition bad = prob;
    bad.interior.deriv_order = 3;
    EXPECT_THROW(assemble(bad, ns, hp), InvalidArgument);
    const NodeSet ns2 = generate_nodes(Disk{1}, 0.3, all_dirichlet());
    EXPECT_THROW(assemble(prob, ns2, hp), InvalidArgument);
    // Support too small for the constraints: the error names the node.
    const auto tiny = holmes_params(2, 2, 2, 1e-11, ns.h() * 0.4);
    try {
        assemble(prob, ns, tiny);
        FAIL();
    } catch (const InfeasibleSupport& e) {
        EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
    }
}

TEST(Solve, Identity) {
    SparseMatrix I(5, 5);
    I.setIdentity();
    Eigen::VectorXd f(5);
    f << 1, -2, 3, 0.5, 7;
    EXPECT_LE((solve_system(I, f).d - f).norm(), 1e-15);
    SparseMatrix Z(2, 2);
    EXPECT_THROW(solve_system(Z, Eigen::VectorXd::Ones(2)), SolverError);
}

TEST(Solve, DirectAndIterativeAgree) {
    const ProblemDefinition prob = make_problem("helm1d-essential");
    const NodeSet ns = generate_nodes(prob.domain, 2.0 / 40, prob.boundary);
    ASSERT_EQ(ns.size(), 41u);
    const auto hp = holmes_params(2, 2, 4, 1e-11, ns.h());
    const CollocationSystem sys = assemble(prob, ns, hp);
    SolveOptions direct;
    direct.method = SolverMethod::direct;
    const SolveResult a = solve_system(sys, direct);
    EXPECT_LE(a.relative_residual, 1e-12);
    EXPECT_EQ(a.method, "sparse-lu");
    SolveOptions it;
    it.method = SolverMethod::iterative;
    const SolveResult b = solve_system(sys, it);
    EXPECT_EQ(b.method, "gmres-ilut");
    EXPECT_LE((a.d - b.d).norm() / a.d.norm(), 1e-8);
}

TEST(Solve, TwoDimensionalResidual) {
    const ProblemDefinition prob = make_problem("helm2d-circle");
    const NodeSet ns = generate_nodes(prob.domain, 0.2, prob.boundary);
    const auto hp = holmes_params(2, 2, 4, 1e-11, ns.h());
    EXPECT_LE(solve_system(assemble(prob, ns, hp)).relative_residual, 1e-10);
}

TEST(Evaluate, PartitionAndReproduction) {
    const NodeSet ns = generate_nodes(Disk{1}, 0.1, all_dirichlet());
    for (int n : {2, 3}) {
        const auto hp = holmes_params(n, 2, n + 2, 1e-11, ns.h());
        const Polynomial q = Polynomial::random(2, n, 12);
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(ns.size())), d(ones.size());
        for (std::size_t a = 0; a < ns.size(); ++a) d[static_cast<Eigen::Index>(a)] = q.value(ns.coord(a));
        std::vector<Point> pts = {Point(0.1, 0.2, 0), Point(-0.5, 0.3, 0), Point(0.0, -0.77, 0)};
        const FieldEvaluation e1 = evaluate_solution(ns, hp, ones, 1, pts, 1);
        const FieldEvaluation eq = evaluate_solution(ns, hp, d, 1, pts, 1);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            EXPECT_NEAR(e1.value(r, 0), 1.0, 1e-9);
            EXPECT_NEAR(e1.gradient.row(r).norm(), 0.0, 1e-7);
            EXPECT_NEAR(eq.value(r, 0), q.value(pts[i]), 1e-8);
            EXPECT_NEAR((eq.gradient.row(r).transpose() - q.gradient(pts[i])).norm(), 0.0, 1e-7);
        }
    }
}

TEST(Evaluate, NodalGradientsMatchFiniteDifferences) {
    const ProblemDefinition prob = make_problem("helm2d-circle");
    StudySettings s;
    const NodeSet ns = make_grid(prob, 0.15, s);
    const SolveOutcome out = solve_on_nodes(prob, ns, s);
    const double scale = out.nodal.gradient.cwiseAbs().maxCoeff();
    for (std::size_t a = 0; a < ns.size(); a += 17) {
        if (ns.kind(a) != NodeKind::interior) continue;
        const Point x = ns.coord(a);
        auto uh = [&](const Point& y) {
            const std::vector<Point> p{y};
            return Eigen::VectorXd(evaluate_solution(ns, out.params, out.solution.d, 1, p, 0).value.row(0).transpose());
        };
        for (int i = 0; i < 2; ++i) {
            const double fd = oracle::central_difference(uh, x, i, 1e-5 * ns.h())[0];
            EXPECT_NEAR(fd, out.nodal.gradient(static_cast<Eigen::Index>(a), i), 1e-4 * scale);
        }
    }
}

class Patch : public ::testing::TestWithParam<std::tuple<PatchOperator, int>> {};

TEST_P(Patch, ReproducesPolynomialSolutions) {
    const auto [op, n] = GetParam();
    if (op == PatchOperator::plane_stress) {
        const auto prob = polynomial_problem(op, Disk{1}, {Polynomial::random(2, n, 1), Polynomial::random(2, n, 2)},
                                             right_half_neumann());
        EXPECT_LE(max_nodal_error(prob, n, 0.15, 0.2), 1e-8);
        return;
    }
    const auto p1 = polynomial_problem(op, Interval{-1, 1}, {Polynomial::random(1, n, 3)}, right_half_neumann());
    EXPECT_LE(max_nodal_error(p1, n, 0.05, 0.2), 1e-8);
    const auto p2 = polynomial_problem(op, Disk{1}, {Polynomial::random(2, n, 4)}, right_half_neumann());
    EXPECT_LE(max_nodal_error(p2, n, 0.15, 0.2), 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Operators, Patch,
                         ::testing::Combine(::testing::Values(PatchOperator::poisson, PatchOperator::helmholtz,
                                                              PatchOperator::plane_stress),
                                            ::testing::Values(2, 3, 4)));

TEST(Patch, ThreeDimensionalPoisson) {
    const auto prob = polynomial_problem(PatchOperator::poisson, Ball{1}, {Polynomial::random(3, 2, 6)}, all_dirichlet());
    EXPECT_LE(max_nodal_error(prob, 2, 0.3, 0.0), 1e-8);
}

TEST(MatrixMarket, Format) {
    SparseMatrix K(2, 2);
    K.insert(0, 0) = 1.5;
    K.insert(1, 0) = -2;
    K.makeCompressed();
    EXPECT_EQ(matrix_market(K), "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.5\n2 1 -2\n");
}
