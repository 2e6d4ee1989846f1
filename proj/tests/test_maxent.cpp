#include "oracles.hpp"

#include "holmes/geometry.hpp"
#include "holmes/maxent.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace holmes;

namespace {

NodeSet uniform_1d(int m, double a = -1.0, double b = 1.0) {
    std::vector<Point> x;
    std::vector<NodeKind> k;
    for (int i = 0; i < m; ++i) {
        x.emplace_back(a + (b - a) * i / (m - 1), 0.0, 0.0);
        k.push_back(i == 0 || i == m - 1 ? NodeKind::dirichlet : NodeKind::interior);
    }
    return NodeSet(1, x, k, std::vector<Point>(x.size(), Point::Zero()));
}

NodeSet unit_square(int per_side, double perturbation = 0.0) {
    std::vector<Point> x;
    std::vector<NodeKind> k;
    for (int j = 0; j < per_side; ++j)
        for (int i = 0; i < per_side; ++i) {
            x.emplace_back(double(i) / (per_side - 1), double(j) / (per_side - 1), 0.0);
            const bool edge = i == 0 || j == 0 || i == per_side - 1 || j == per_side - 1;
            k.push_back(edge ? NodeKind::dirichlet : NodeKind::interior);
        }
    NodeSet ns(2, x, k, std::vector<Point>(x.size(), Point::Zero()));
    return perturbation > 0 ? perturb_nodes(ns, perturbation, 7) : ns;
}

LocalCloud make_cloud(int dim, std::vector<Point> nodes, const Point& x) {
    LocalCloud c;
    c.x = x;
    c.dim = dim;
    c.coords = std::move(nodes);
    for (std::size_t a = 0; a < c.coords.size(); ++a) c.neighbors.push_back(a);
    return c;
}

double monomial(const Point& v, const MultiIndex& al) {
    return std::pow(v[0], al[0]) * std::pow(v[1], al[1]) * std::pow(v[2], al[2]);
}

}  // namespace

TEST(MultiIndex, Counts) {
    const auto s = multi_indices(2, 2);
    ASSERT_EQ(s.size(), 6u);
    const std::vector<MultiIndex> expect = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {2, 0, 0}, {1, 1, 0}, {0, 2, 0}};
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(total_degree(s.indices[i]), total_degree(expect[i]));
    for (const auto& e : expect) EXPECT_GE(s.find(e), 0);
    EXPECT_EQ(multi_indices(3, 2).size(), 10u);
    EXPECT_EQ(multi_indices(1, 6).size(), 7u);
    EXPECT_EQ(s.find({3, 0, 0}), -1);
}

TEST(HolmesParams, GammaValues) {
    EXPECT_NEAR(holmes_params(2, 2, 4, 1e-11).gamma, 1.521, 5e-4);
    EXPECT_NEAR(holmes_params(2, 2, 6, 1e-11).gamma, 0.676, 5e-4);
    EXPECT_NEAR(holmes_params(2, 4, 4, 1e-11).gamma, 0.095, 5e-4);
}

TEST(HolmesParams, TruncationRadius) {
    EXPECT_NEAR(truncation_radius(holmes_params(2, 2, 4, 1e-11, 0.1)), 0.4, 1e-12);
    HolmesParams hp = holmes_params(2, 2, 4, 1e-11);
    hp.gamma = 1.521;
    EXPECT_NEAR(truncation_radius(hp), 4.0, 1e-3);
    HolmesParams smaller = hp;
    smaller.eps = 1e-13;
    EXPECT_GT(truncation_radius(smaller), truncation_radius(hp));
}

TEST(HolmesParams, Rejects) {
    EXPECT_THROW(holmes_params(4, 2, 3, 1e-11), InvalidArgument);
    EXPECT_THROW(holmes_params(2, 2, 4, 0.5), InvalidArgument);
    EXPECT_THROW(holmes_params(0, 2, 4, 1e-11), InvalidArgument);
    EXPECT_THROW(holmes_params(2, 2, 4, 1e-11, -1.0), InvalidArgument);
}

TEST(Dual, ThreeNodeSymmetric) {
    const double h = 0.3;
    const auto cloud = make_cloud(1, {Point(-h, 0, 0), Point(0, 0, 0), Point(h, 0, 0)}, Point::Zero());
    const auto hp = holmes_params(2, 2, 4, 1e-11, h);
    const auto mis = multi_indices(1, 2);
    const BasisEval be = evaluate_basis(cloud, hp, 0, mis);
    EXPECT_NEAR(be.phi[0], 0.0, 1e-9);
    EXPECT_NEAR(be.phi[1], 1.0, 1e-9);
    EXPECT_NEAR(be.phi[2], 0.0, 1e-9);
    EXPECT_NEAR(be.dual.lambda[1], 0.0, 1e-9);
}

TEST(Dual, SymmetricOddMultipliersVanish) {
    std::vector<Point> nodes;
    for (int j = -2; j <= 2; ++j)
        for (int i = -2; i <= 2; ++i) nodes.emplace_back(0.5 * i, 0.5 * j, 0.0);
    const auto cloud = make_cloud(2, nodes, Point::Zero());
    const auto hp = holmes_params(3, 2, 5, 1e-11, 0.5);
    const auto mis = multi_indices(2, 3);
    const DualState ds = solve_dual(cloud, hp, mis);
    for (std::size_t j = 0; j < mis.size(); ++j)
        if (total_degree(mis.indices[j]) % 2 == 1) EXPECT_NEAR(ds.lambda[static_cast<Eigen::Index>(j)], 0.0, 1e-9);
}

TEST(Dual, MatchesHighPrecisionOracle) {
    const double h = 1.0;
    std::vector<Point> nodes;
    for (int i = 0; i <= 6; ++i) nodes.emplace_back(i * h, 0.0, 0.0);
    const Point x(2.4 * h, 0, 0);
    auto hp = holmes_params(2, 2, 4, 1e-11, h);
    hp.gamma = 1.521;
    const BasisEval be = evaluate_basis(make_cloud(1, nodes, x), hp, 0, multi_indices(1, 2));
    const auto ref = oracle::max_ent_dual(1, 2, nodes, x, hp.beta(), 2.0);
    ASSERT_LT(ref.feasibility, 1e-13);
    for (std::size_t a = 0; a < nodes.size(); ++a) EXPECT_NEAR(be.phi[static_cast<Eigen::Index>(a)], ref.phi[a], 1e-8);
}

TEST(Dual, InfeasibleSupport) {
    const NodeSet ns = uniform_1d(11);
    const auto hp = holmes_params(2, 2, 2.2, 1e-11, ns.h());
    // Three constraints need at least three neighbors.
    EXPECT_NO_THROW(evaluate_basis(ns, Point(0.05, 0, 0), hp, 0));
    const auto tight = holmes_params(2, 2, 2.0, 1e-11, ns.h() * 0.45);
    EXPECT_THROW(evaluate_basis(ns, Point(0.05, 0, 0), tight, 0), InfeasibleSupport);
}

TEST(Dual, ObjectiveDecreases) {
    const NodeSet ns = unit_square(9, 0.2);
    const auto hp = holmes_params(3, 2, 5, 1e-11, ns.h());
    DualOptions opt;
    opt.record_objective = true;
    const DualState ds = solve_dual(ns, Point(0.41, 0.33, 0), hp, multi_indices(2, 3), opt);
    ASSERT_GE(ds.objective.size(), 2u);
    for (std::size_t i = 1; i < ds.objective.size(); ++i) EXPECT_LE(ds.objective[i], ds.objective[i - 1] + 1e-12);
    EXPECT_LT(ds.residual_norm, 1e-10);
}

class Consistency : public ::testing::TestWithParam<std::tuple<int, int, double>> {};

TEST_P(Consistency, ReproducesPolynomials) {
    const auto [dim, n, pert] = GetParam();
    const NodeSet ns = dim == 1 ? perturb_nodes(uniform_1d(201), pert, 3) : unit_square(15, pert);
    const auto hp = holmes_params(n, 2, n + 2, 1e-11, ns.h());
    const auto mis = multi_indices(dim, n);
    UniformStream rng(11);
    for (int s = 0; s < 100; ++s) {
        Point x = Point::Zero();
        for (int i = 0; i < dim; ++i) x[i] = rng.uniform(0.0, 1.0);
        const BasisEval be = evaluate_basis(ns, x, hp, 0, mis);
        EXPECT_LE(constraint_violation(be, ns, hp, mis), 1e-9);
        EXPECT_NEAR(be.phi.sum(), 1.0, 1e-9);
        for (const auto& al : mis.indices) {
            double v = 0.0;
            for (std::size_t a = 0; a < be.size(); ++a)
                v += be.phi[static_cast<Eigen::Index>(a)] * monomial(ns.coord(be.neighbors[a]), al);
            EXPECT_NEAR(v, monomial(x, al), 1e-8);
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Clouds, Consistency,
                         ::testing::Combine(::testing::Values(1, 2), ::testing::Values(2, 3, 4),
                                            ::testing::Values(0.0, 0.2)));

class Derivatives : public ::testing::TestWithParam<std::tuple<int, int>> {};

TEST_P(Derivatives, MatchFiniteDifferences) {
    const auto [dim, n] = GetParam();
    const NodeSet ns = dim == 1 ? uniform_1d(41, 0.0, 1.0) : unit_square(12, 0.2);
    const auto hp = holmes_params(n, 2, n + 2, 1e-11, ns.h());
    const auto mis = multi_indices(dim, n);
    UniformStream rng(5);
    const double h = ns.h();
    for (int s = 0; s < 50; ++s) {
        Point x = Point::Zero();
        for (int i = 0; i < dim; ++i) x[i] = rng.uniform(0.2, 0.8);
        const BasisEval be = evaluate_basis(ns, x, hp, 2, mis);
        // Evaluate on the frozen neighbor list so FD does not see truncation changes.
        LocalCloud cloud;
        cloud.dim = dim;
        cloud.neighbors = be.neighbors;
        for (std::size_t b : be.neighbors) cloud.coords.push_back(ns.coord(b));
        auto phi_at = [&](const Point& y) {
            cloud.x = y;
            return Eigen::VectorXd(evaluate_basis(cloud, hp, 0, mis).phi);
        };
        auto grad_at = [&](const Point& y, int i) {
            cloud.x = y;
            return Eigen::VectorXd(evaluate_basis(cloud, hp, 1, mis).grad.col(i));
        };
        const double gscale = be.grad.cwiseAbs().maxCoeff();
        const double hscale = be.hess.cwiseAbs().maxCoeff();
        for (int i = 0; i < dim; ++i) {
            const Eigen::VectorXd fd = oracle::central_difference(phi_at, x, i, 1e-5 * h);
            EXPECT_LE((fd - be.grad.col(i)).cwiseAbs().maxCoeff(), 1e-4 * gscale);
            for (int j = 0; j < dim; ++j) {
                const Eigen::VectorXd fd2 =
                    oracle::central_difference([&](const Point& y) { return grad_at(y, i); }, x, j, 1e-4 * h);
                Eigen::VectorXd an(static_cast<Eigen::Index>(be.size()));
                for (std::size_t a = 0; a < be.size(); ++a) an[static_cast<Eigen::Index>(a)] = be.dd(a, i, j);
                EXPECT_LE((fd2 - an).cwiseAbs().maxCoeff(), 1e-3 * hscale);
            }
        }
        EXPECT_LE(be.grad.colwise().sum().cwiseAbs().maxCoeff(), 1e-7 * gscale);
        EXPECT_LE(be.hess.colwise().sum().cwiseAbs().maxCoeff(), 1e-7 * hscale);
    }
}

TEST_P(Derivatives, DifferentiatedConstraints) {
    const auto [dim, n] = GetParam();
    const NodeSet ns = dim == 1 ? uniform_1d(41, 0.0, 1.0) : unit_square(12, 0.2);
    const auto hp = holmes_params(n, 2, n + 2, 1e-11, ns.h());
    const auto mis = multi_indices(dim, n);
    const Point x = dim == 1 ? Point(0.43, 0, 0) : Point(0.43, 0.58, 0);
    const BasisEval be = evaluate_basis(ns, x, hp, 1, mis);
    // sum_a phi_a(x) (x_a - x)_i = 0 differentiated in x_j: sum_a dphi_a/dx_j (x_a - x)_i = delta_ij.
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            double s = 0.0;
            for (std::size_t a = 0; a < be.size(); ++a)
                s += be.grad(static_cast<Eigen::Index>(a), j) * (ns.coord(be.neighbors[a])[i] - x[i]);
            EXPECT_NEAR(s, i == j ? 1.0 : 0.0, 1e-7);
        }
}

INSTANTIATE_TEST_SUITE_P(Orders, Derivatives,
                         ::testing::Combine(::testing::Values(1, 2), ::testing::Values(2, 3, 4)));

TEST(Derivatives, ThreeDimensionalCloud) {
    std::vector<Point> x;
    for (int k = 0; k < 7; ++k)
        for (int j = 0; j < 7; ++j)
            for (int i = 0; i < 7; ++i) x.emplace_back(i / 6.0, j / 6.0, k / 6.0);
    NodeSet ns(3, x, std::vector<NodeKind>(x.size(), NodeKind::interior), std::vector<Point>(x.size(), Point::Zero()));
    ns = perturb_nodes(ns, 0.2, 9);
    const auto hp = holmes_params(2, 2, 4, 1e-11, ns.h());
    const auto mis = multi_indices(3, 2);
    const Point p(0.47, 0.52, 0.44);
    const BasisEval be = evaluate_basis(ns, p, hp, 2, mis);
    EXPECT_LE(constraint_violation(be, ns, hp, mis), 1e-9);
    LocalCloud cloud;
    cloud.dim = 3;
    cloud.neighbors = be.neighbors;
    for (std::size_t b : be.neighbors) cloud.coords.push_back(ns.coord(b));
    auto phi_at = [&](const Point& y) {
        cloud.x = y;
        return Eigen::VectorXd(evaluate_basis(cloud, hp, 0, mis).phi);
    };
    const double gscale = be.grad.cwiseAbs().maxCoeff();
    for (int i = 0; i < 3; ++i) {
        const Eigen::VectorXd fd = oracle::central_difference(phi_at, p, i, 1e-5 * ns.h());
        EXPECT_LE((fd - be.grad.col(i)).cwiseAbs().maxCoeff(), 1e-4 * gscale);
    }
    EXPECT_LE(be.hess.colwise().sum().cwiseAbs().maxCoeff(), 1e-7 * be.hess.cwiseAbs().maxCoeff());
}

TEST(Continuity, RefinementShrinksJumps) {
    const NodeSet ns = uniform_1d(41);
    const auto hp = holmes_params(2, 2, 4, 1e-11, ns.h());
    const auto coarse = continuity_probe(ns, hp, Point(-0.5, 0, 0), Point(0.5, 0, 0), 200);
    const auto fine = continuity_probe(ns, hp, Point(-0.5, 0, 0), Point(0.5, 0, 0), 400);
    EXPECT_LT(fine.max_jump_grad, coarse.max_jump_grad);
    EXPECT_LT(fine.max_jump_phi, coarse.max_jump_phi);
    EXPECT_LE(fine.max_partition_error, 1e-9);
}

TEST(Continuity, TruncationJumpIsSmall) {
    const NodeSet ns = uniform_1d(41);
    const auto hp = holmes_params(2, 2, 4, 1e-11, ns.h());
    const auto mis = multi_indices(1, 2);
    // Just inside and just outside the truncation radius of node 30 seen from x.
    // The support estimate ignores the multiplier factor, so the dropped values
    // are well above eps; the jump is bounded by what truncation neglects.
    const double r = truncation_radius(hp);
    const double xa = ns.coord(30)[0];
    for (double off : {-1e-9, 1e-9}) {
        const Point x(xa - r + off, 0, 0);
        const BasisEval trunc = evaluate_basis(ns, x, hp, 0, mis);
        const BasisEval full = evaluate_basis(make_cloud(1, {ns.coords().begin(), ns.coords().end()}, x), hp, 0, mis);
        double worst = 0.0, neglected = 0.0;
        for (std::size_t a = 0; a < ns.size(); ++a) {
            double t = 0.0;
            bool kept = false;
            for (std::size_t b = 0; b < trunc.size(); ++b)
                if (trunc.neighbors[b] == a) {
                    t = trunc.phi[static_cast<Eigen::Index>(b)];
                    kept = true;
                }
            const double f = full.phi[static_cast<Eigen::Index>(a)];
            worst = std::max(worst, std::abs(t - f));
            if (!kept) neglected = std::max(neglected, std::abs(f));
        }
        EXPECT_LE(worst, 10 * neglected);
        EXPECT_LE(worst, 1e-4);
    }
}
