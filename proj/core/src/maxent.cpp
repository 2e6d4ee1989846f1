#include "holmes/maxent.hpp"

#include "holmes/io.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace holmes {

int MultiIndexSet::find(const MultiIndex& alpha) const {
    for (std::size_t k = 0; k < indices.size(); ++k)
        if (indices[k] == alpha) return static_cast<int>(k);
    return -1;
}

MultiIndexSet multi_indices(int dim, int order) {
    HOLMES_REQUIRE(dim >= 1 && dim <= 3, InvalidArgument, "multi_indices: dimension must be 1, 2 or 3");
    HOLMES_REQUIRE(order >= 0, InvalidArgument, "multi_indices: order must be non-negative");
    MultiIndexSet s{dim, order, {}};
    for (int deg = 0; deg <= order; ++deg) {
        // Lexicographically decreasing in the leading exponent: (2,0), (1,1), (0,2).
        for (int a0 = deg; a0 >= 0; --a0) {
            if (dim == 1) {
                if (a0 == deg) s.indices.push_back({a0, 0, 0});
                continue;
            }
            for (int a1 = deg - a0; a1 >= 0; --a1) {
                const int a2 = deg - a0 - a1;
                if (dim == 2 && a2 != 0) continue;
                s.indices.push_back({a0, a1, a2});
            }
        }
    }
    return s;
}

void validate(const HolmesParams& q) {
    HOLMES_REQUIRE(q.n >= 1, InvalidArgument, "consistency order n must be at least 1");
    HOLMES_REQUIRE(q.p >= 1.0 && std::isfinite(q.p), InvalidArgument, "locality exponent p must be at least 1");
    HOLMES_REQUIRE(q.eps > 0.0 && std::log(q.eps) + 1.0 < 0.0, InvalidArgument,
                   "eps must lie in (0, 1/e) so that gamma is positive");
    HOLMES_REQUIRE(q.R_hat >= q.n, InvalidArgument,
                   "R_hat = " + format_double(q.R_hat) + " is below n = " + std::to_string(q.n) +
                       "; boundary nodes would lack support");
    HOLMES_REQUIRE(q.gamma > 0.0 && std::isfinite(q.gamma), InvalidArgument, "gamma must be positive");
    HOLMES_REQUIRE(q.h > 0.0 && std::isfinite(q.h), InvalidArgument, "spacing h must be positive");
}

HolmesParams holmes_params(int n, double p, double R_hat, double eps, double h) {
    HolmesParams q;
    q.n = n;
    q.p = p;
    q.R_hat = R_hat;
    q.eps = eps;
    q.h = h;
    q.gamma = eps > 0.0 && R_hat > 0.0 ? -(std::log(eps) + 1.0) / std::pow(R_hat, p) : 0.0;
    validate(q);
    return q;
}

double truncation_radius(const HolmesParams& q) {
    validate(q);
    return q.h * std::pow(-(std::log(q.eps) + 1.0) / q.gamma, 1.0 / q.p);
}

namespace {

// Scaled monomials of the neighbors around x, one column per neighbor.
Eigen::MatrixXd monomials(const LocalCloud& cloud, double h, const MultiIndexSet& mis) {
    const auto N = static_cast<Eigen::Index>(cloud.coords.size());
    const auto K = static_cast<Eigen::Index>(mis.size());
    Eigen::MatrixXd Q(K, N);
    std::array<std::vector<double>, 3> pw;
    for (auto& v : pw) v.assign(static_cast<std::size_t>(mis.order) + 1, 1.0);
    for (Eigen::Index a = 0; a < N; ++a) {
        const Point d = (cloud.coords[static_cast<std::size_t>(a)] - cloud.x) / h;
        for (int i = 0; i < cloud.dim; ++i)
            for (int e = 1; e <= mis.order; ++e) pw[i][e] = pw[i][e - 1] * d[i];
        for (Eigen::Index k = 0; k < K; ++k) {
            const MultiIndex& al = mis.indices[static_cast<std::size_t>(k)];
            double v = 1.0;
            for (int i = 0; i < cloud.dim; ++i) v *= pw[i][al[i]];
            Q(k, a) = v;
        }
    }
    return Q;
}

Eigen::VectorXd locality(const LocalCloud& cloud, const HolmesParams& q) {
    const double scale = q.gamma / std::pow(q.h, q.p);
    Eigen::VectorXd c(static_cast<Eigen::Index>(cloud.coords.size()));
    for (std::size_t a = 0; a < cloud.coords.size(); ++a) {
        double s = 0.0;
        for (int i = 0; i < cloud.dim; ++i) s += std::pow(std::abs(cloud.x[i] - cloud.coords[a][i]), q.p);
        c[static_cast<Eigen::Index>(a)] = scale * s;
    }
    return c;
}

struct Parts {
    Eigen::VectorXd plus, minus, phi, psi;
    double objective = 0.0;
};

// signed = false gives the LME functional (no negative part).
Parts evaluate_parts(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c, const Eigen::VectorXd& mu, bool signed_basis) {
    const Eigen::VectorXd s = Q.transpose() * mu;
    Parts P;
    P.plus = (s - c).array().exp() * std::exp(-1.0);
    if (signed_basis)
        P.minus = (-s - c).array().exp() * std::exp(-1.0);
    else
        P.minus = Eigen::VectorXd::Zero(s.size());
    P.phi = P.plus - P.minus;
    P.psi = P.plus + P.minus;
    // Target of the constraints at z = x is e_0, so mu . b = mu_0.
    P.objective = P.psi.sum() - mu[0];
    return P;
}

Eigen::VectorXd residual(const Eigen::MatrixXd& Q, const Parts& P) {
    Eigen::VectorXd r = Q * P.phi;
    r[0] -= 1.0;
    return r;
}

// Factorization of the dual Hessian with the pivot-underflow regularization.
Eigen::LDLT<Eigen::MatrixXd> factor_hessian(Eigen::MatrixXd J) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(J);
    const auto D = ldlt.vectorD();
    const double dmax = D.cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(D.minCoeff() > 1e-15 * dmax)) {
        const double shift = 1e-12 * J.trace() / static_cast<double>(J.rows());
        J.diagonal().array() += shift;
        ldlt.compute(J);
    }
    return ldlt;
}

Eigen::VectorXd unscale(const Eigen::VectorXd& mu, const MultiIndexSet& mis, double h) {
    Eigen::VectorXd lambda(mu.size());
    for (Eigen::Index k = 0; k < mu.size(); ++k)
        lambda[k] = mu[k] / std::pow(h, total_degree(mis.indices[static_cast<std::size_t>(k)]));
    return lambda;
}

}  // namespace

LocalCloud gather(const NodeSet& ns, const Point& x, const HolmesParams& params, const MultiIndexSet& mis) {
    LocalCloud cloud;
    cloud.x = x;
    cloud.dim = ns.dim();
    // Small slack so nodes sitting exactly on the truncation sphere are kept deterministically.
    const double r = truncation_radius(params) * (1.0 + 1e-12);
    cloud.neighbors = ns.neighbors_within(x, r, params.p);
    HOLMES_REQUIRE(cloud.neighbors.size() >= mis.size(), InfeasibleSupport,
                   "infeasible support: " + std::to_string(cloud.neighbors.size()) + " nodes within r_p = " +
                       format_double(r) + ", need " + std::to_string(mis.size()));
    cloud.coords.reserve(cloud.neighbors.size());
    for (std::size_t a : cloud.neighbors) cloud.coords.push_back(ns.coord(a));
    return cloud;
}

DualState solve_dual(const LocalCloud& cloud, const HolmesParams& params, const MultiIndexSet& mis,
                     const DualOptions& opt) {
    validate(params);
    HOLMES_REQUIRE(mis.dim == cloud.dim, InvalidArgument, "solve_dual: multi-index dimension mismatch");
    HOLMES_REQUIRE(cloud.coords.size() >= mis.size(), InfeasibleSupport,
                   "infeasible support: " + std::to_string(cloud.coords.size()) + " nodes for " +
                       std::to_string(mis.size()) + " constraints");
    const bool signed_basis = params.n >= 2;
    const Eigen::MatrixXd Q = monomials(cloud, params.h, mis);
    const Eigen::VectorXd c = locality(cloud, params);
    const auto K = static_cast<Eigen::Index>(mis.size());

    DualState st;
    st.mu = Eigen::VectorXd::Zero(K);
    Parts P = evaluate_parts(Q, c, st.mu, signed_basis);
    Eigen::VectorXd r = residual(Q, P);
    st.residual_norm = r.norm();
    if (opt.record_objective) st.objective.push_back(P.objective);

    // Damped Newton on the convex dual objective.
    while (st.residual_norm > opt.tolerance) {
        if (st.iterations >= opt.max_iterations)
            throw DualDivergence("dual divergence: residual " + format_double(st.residual_norm) + " after " +
                                     std::to_string(st.iterations) + " Newton iterations",
                                 st.residual_norm);
        const Eigen::MatrixXd J = Q * P.psi.asDiagonal() * Q.transpose();
        const auto ldlt = factor_hessian(J);
        const Eigen::VectorXd step = ldlt.solve(-r);
        const double slope = r.dot(step);
        const double slack = 1e-14 * (std::abs(P.objective) + 1.0);
        double t = 1.0;
        bool accepted = false;
        for (int k = 0; k <= opt.max_halvings; ++k, t *= 0.5) {
            const Eigen::VectorXd trial = st.mu + t * step;
            Parts T = evaluate_parts(Q, c, trial, signed_basis);
            if (!std::isfinite(T.objective)) continue;
            if (T.objective <= P.objective + 1e-4 * t * slope + slack) {
                st.mu = trial;
                P = std::move(T);
                accepted = true;
                break;
            }
        }
        ++st.iterations;
        if (!accepted)
            throw DualDivergence("dual divergence: line search failed at residual " + format_double(st.residual_norm),
                                 st.residual_norm);
        r = residual(Q, P);
        st.residual_norm = r.norm();
        if (opt.record_objective) st.objective.push_back(P.objective);
    }
    st.lambda = unscale(st.mu, mis, params.h);
    return st;
}

DualState solve_dual(const NodeSet& ns, const Point& x, const HolmesParams& params, const MultiIndexSet& mis,
                     const DualOptions& options) {
    return solve_dual(gather(ns, x, params, mis), params, mis, options);
}

double BasisEval::laplacian(std::size_t a) const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += dd(a, i, i);
    return s;
}

BasisEval evaluate_basis(const LocalCloud& cloud, const HolmesParams& params, int deriv_order,
                         const MultiIndexSet& mis, const DualOptions& options) {
    HOLMES_REQUIRE(deriv_order >= 0 && deriv_order <= 2, InvalidArgument, "deriv_order must be 0, 1 or 2");
    BasisEval be;
    be.x = cloud.x;
    be.dim = cloud.dim;
    be.deriv_order = deriv_order;
    be.neighbors = cloud.neighbors;
    be.dual = solve_dual(cloud, params, mis, options);

    const bool signed_basis = params.n >= 2;
    const Eigen::MatrixXd Q = monomials(cloud, params.h, mis);
    const Eigen::VectorXd c = locality(cloud, params);
    const Parts P = evaluate_parts(Q, c, be.dual.mu, signed_basis);
    be.phi = P.phi;
    be.phi_plus = P.plus;
    be.phi_minus = P.minus;
    if (deriv_order == 0) return be;

    const int d = cloud.dim;
    const auto N = static_cast<Eigen::Index>(cloud.coords.size());
    const double h = params.h;
    const double scale = params.gamma / std::pow(h, params.p);
    const double p = params.p;

    // dc(a, i) = d c_a / d x_i; ddc(a, i) = d2 c_a / d x_i^2 (c_a is separable).
    Eigen::MatrixXd dc(N, d), ddc(N, d);
    for (Eigen::Index a = 0; a < N; ++a) {
        for (int i = 0; i < d; ++i) {
            const double t = cloud.x[i] - cloud.coords[static_cast<std::size_t>(a)][i];
            const double at = std::abs(t);
            dc(a, i) = at == 0.0 ? 0.0 : scale * p * std::pow(at, p - 1.0) * (t > 0 ? 1.0 : -1.0);
            ddc(a, i) = p == 2.0 ? 2.0 * scale : (at == 0.0 && p < 2.0 ? 0.0 : scale * p * (p - 1.0) * std::pow(at, p - 2.0));
        }
    }

    const Eigen::MatrixXd J = Q * P.psi.asDiagonal() * Q.transpose();
    const auto ldlt = factor_hessian(J);

    // Derivatives of the constraint targets ((x - z)/h)^alpha at z = x.
    Eigen::MatrixXd D1 = Eigen::MatrixXd::Zero(Q.rows(), d);
    for (int i = 0; i < d; ++i) {
        MultiIndex e{0, 0, 0};
        e[i] = 1;
        D1(mis.find(e), i) = 1.0 / h;
    }
    const Eigen::MatrixXd B1 = Q * (dc.array().colwise() * P.phi.array()).matrix() + D1;
    const Eigen::MatrixXd dmu = ldlt.solve(B1);
    const Eigen::MatrixXd U = Q.transpose() * dmu;
    const Eigen::MatrixXd dphi =
        (U.array().colwise() * P.psi.array() - dc.array().colwise() * P.phi.array()).matrix();
    const Eigen::MatrixXd dpsi =
        (U.array().colwise() * P.phi.array() - dc.array().colwise() * P.psi.array()).matrix();
    be.grad = dphi;
    if (deriv_order == 1) return be;

    const int pairs = d * (d + 1) / 2;
    Eigen::MatrixXd W(N, pairs), rhs = Eigen::MatrixXd::Zero(Q.rows(), pairs);
    int col = 0;
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j, ++col) {
            W.col(col) = dpsi.col(j).cwiseProduct(U.col(i)) - dphi.col(j).cwiseProduct(dc.col(i));
            if (i == j) W.col(col) -= P.phi.cwiseProduct(ddc.col(i));
            MultiIndex e{0, 0, 0};
            ++e[i];
            ++e[j];
            // Order-1 sets carry no second moments, so their targets have no second derivatives.
            if (const int k = mis.find(e); k >= 0) rhs(k, col) = (i == j ? 2.0 : 1.0) / (h * h);
        }
    }
    rhs -= Q * W;
    const Eigen::MatrixXd d2mu = ldlt.solve(rhs);
    const Eigen::MatrixXd H = W + (Q.transpose() * d2mu).cwiseProduct(P.psi.replicate(1, pairs));
    be.hess.resize(N, d * d);
    col = 0;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j, ++col) {
            be.hess.col(i * d + j) = H.col(col);
            be.hess.col(j * d + i) = H.col(col);
        }
    return be;
}

BasisEval evaluate_basis(const NodeSet& ns, const Point& x, const HolmesParams& params, int deriv_order,
                         const MultiIndexSet& mis, const DualOptions& options) {
    return evaluate_basis(gather(ns, x, params, mis), params, deriv_order, mis, options);
}

BasisEval evaluate_basis(const NodeSet& ns, const Point& x, const HolmesParams& params, int deriv_order) {
    return evaluate_basis(ns, x, params, deriv_order, multi_indices(ns.dim(), params.n));
}

double constraint_violation(const BasisEval& be, const NodeSet& ns, const HolmesParams& params,
                            const MultiIndexSet& mis) {
    LocalCloud cloud;
    cloud.x = be.x;
    cloud.dim = be.dim;
    for (std::size_t a : be.neighbors) cloud.coords.push_back(ns.coord(a));
    Eigen::VectorXd r = monomials(cloud, params.h, mis) * be.phi;
    r[0] -= 1.0;
    return r.cwiseAbs().maxCoeff();
}

ContinuityReport continuity_probe(const NodeSet& ns, const HolmesParams& params, const Point& a, const Point& b,
                                  std::size_t samples) {
    HOLMES_REQUIRE(samples >= 2, InvalidArgument, "continuity_probe: need at least two samples");
    const MultiIndexSet mis = multi_indices(ns.dim(), params.n);
    const int d = ns.dim();
    ContinuityReport rep;
    rep.samples = samples;
    std::vector<double> prev_phi(ns.size(), 0.0), cur_phi(ns.size(), 0.0);
    std::vector<double> prev_grad(ns.size() * static_cast<std::size_t>(d), 0.0), cur_grad(prev_grad.size(), 0.0);
    std::vector<std::size_t> prev_nb, cur_nb;
    for (std::size_t s = 0; s < samples; ++s) {
        const double t = static_cast<double>(s) / static_cast<double>(samples - 1);
        const BasisEval be = evaluate_basis(ns, a + t * (b - a), params, 1, mis);
        for (std::size_t k : cur_nb) {
            cur_phi[k] = 0.0;
            for (int i = 0; i < d; ++i) cur_grad[k * d + i] = 0.0;
        }
        cur_nb = be.neighbors;
        for (std::size_t k = 0; k < be.size(); ++k) {
            const std::size_t g = be.neighbors[k];
            cur_phi[g] = be.phi[static_cast<Eigen::Index>(k)];
            for (int i = 0; i < d; ++i) cur_grad[g * d + i] = be.grad(static_cast<Eigen::Index>(k), i);
        }
        rep.max_partition_error = std::max(rep.max_partition_error, std::abs(be.phi.sum() - 1.0));
        if (s > 0) {
            auto compare = [&](std::size_t g) {
                rep.max_jump_phi = std::max(rep.max_jump_phi, std::abs(cur_phi[g] - prev_phi[g]));
                for (int i = 0; i < d; ++i)
                    rep.max_jump_grad =
                        std::max(rep.max_jump_grad, std::abs(cur_grad[g * d + i] - prev_grad[g * d + i]));
            };
            for (std::size_t g : cur_nb) compare(g);
            for (std::size_t g : prev_nb) compare(g);
        }
        std::swap(prev_phi, cur_phi);
        std::swap(prev_grad, cur_grad);
        std::swap(prev_nb, cur_nb);
        // cur_* now hold the sample before last; clear its entries.
        for (std::size_t k : cur_nb) {
            cur_phi[k] = 0.0;
            for (int i = 0; i < d; ++i) cur_grad[k * d + i] = 0.0;
        }
        cur_nb.clear();
    }
    return rep;
}

}  // namespace holmes
