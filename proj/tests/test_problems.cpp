#include "oracles.hpp"

#include "holmes/problems.hpp"
#include "holmes/special_functions.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

using namespace holmes;

namespace {

const double pi = std::numbers::pi;

Eigen::VectorXd stress(const ElasticFields& f) {
    Eigen::VectorXd v(3);
    v << f.sx, f.sy, f.txy;
    return v;
}

Eigen::VectorXd disp(const ElasticFields& f) {
    Eigen::VectorXd v(2);
    v << f.u, f.v;
    return v;
}

// Divergence of the stress field at x by central differences.
template <class F>
Eigen::Vector2d stress_divergence(const F& fields, const Point& x, double s) {
    auto sig = [&](const Point& y) { return stress(fields(y)); };
    const Eigen::VectorXd dx = oracle::central_difference(sig, x, 0, s);
    const Eigen::VectorXd dy = oracle::central_difference(sig, x, 1, s);
    return {dx[0] + dy[2], dx[2] + dy[1]};
}

// Stress from displacement gradients by central differences (plane stress).
template <class F>
Eigen::VectorXd stress_from_displacement(const F& fields, const Point& x, const ElasticityParams& ep, double s) {
    auto u = [&](const Point& y) { return disp(fields(y)); };
    const Eigen::VectorXd dx = oracle::central_difference(u, x, 0, s);
    const Eigen::VectorXd dy = oracle::central_difference(u, x, 1, s);
    Eigen::VectorXd out(3);
    out << ep.C11() * dx[0] + ep.C12() * dy[1], ep.C12() * dx[0] + ep.C11() * dy[1], ep.G() * (dy[0] + dx[1]);
    return out;
}

}  // namespace

TEST(Bessel, Values) {
    EXPECT_EQ(bessel_j0(0.0), 1.0);
    EXPECT_EQ(bessel_j1(0.0), 0.0);
    EXPECT_NEAR(bessel_j0(2.404825557695773), 0.0, 1e-9);
    EXPECT_NEAR(oracle::bessel_j0_first_zero(), 2.404825557695773, 1e-12);
    EXPECT_NEAR(bessel_j1(-3.0), -bessel_j1(3.0), 1e-16);
    EXPECT_THROW(bessel_j(2, 1.0), InvalidArgument);
    EXPECT_THROW(bessel_j0(50.5), InvalidArgument);
}

TEST(Bessel, MatchesSeries) {
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double x = 50.0 * i / 1000.0;
        for (int order : {0, 1}) worst = std::max(worst, std::abs(bessel_j(order, x) - oracle::bessel_series(order, x)));
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(Helmholtz1d, ClosedForm) {
    EXPECT_DOUBLE_EQ(helmholtz1d(0).u, 1.0);
    EXPECT_NEAR(helmholtz1d(0).du, 4.0, 1e-15);
    for (int i = 0; i < 100; ++i) {
        const double x = -1.0 + 2.0 * (i + 0.5) / 100.0;
        const auto s = helmholtz1d(x);
        EXPECT_NEAR(s.b - (s.d2u + s.u), 0.0, 1e-12);
        const double e = 1e-4;
        const double fd2 = (helmholtz1d(x + e).u - 2 * s.u + helmholtz1d(x - e).u) / (e * e);
        EXPECT_NEAR(fd2, s.d2u, 1e-5 * (1 + std::abs(s.d2u)));
        EXPECT_NEAR((helmholtz1d(x + e).u - helmholtz1d(x - e).u) / (2 * e), s.du, 1e-6 * (1 + std::abs(s.du)));
    }
}

TEST(Acoustic, Parameters) {
    const auto ap = AcousticParams::from_wavelength(1.21, 343, 2.5, 1, 1);
    EXPECT_NEAR(ap.omega, 862.05, 0.01);
    EXPECT_NEAR(ap.k, 2 * pi / 2.5, 1e-6);
}

TEST(Acoustic, CircleNeumannIdentity) {
    const auto ap = AcousticParams::from_wavelength(1.21, 343, 2.5, 1, 1);
    const double e = 1e-5;
    // One-sided second-order difference at the wall.
    const double fd = (3 * circle_pressure(ap.R, ap).p - 4 * circle_pressure(ap.R - e, ap).p +
                       circle_pressure(ap.R - 2 * e, ap).p) /
                      (2 * e);
    // Real form of (j / (rho0 omega)) dp/dr = vbar with p = j pt.
    EXPECT_NEAR(-fd / (ap.rho0 * ap.omega), ap.vbar, 1e-9);
    EXPECT_NEAR(-circle_pressure(ap.R, ap).dp / (ap.rho0 * ap.omega), ap.vbar, 1e-12);
    // Helmholtz residual of the radial profile.
    for (double r : {0.2, 0.5, 0.9}) {
        const auto s = circle_pressure(r, ap);
        const double d2 = (circle_pressure(r + e, ap).p - 2 * s.p + circle_pressure(r - e, ap).p) / (e * e);
        EXPECT_NEAR(d2 + s.dp / r + ap.k * ap.k * s.p, 0.0, 1e-4 * std::abs(s.p));
    }
}

TEST(Acoustic, SphereAgainstComplexForm) {
    const auto ap = AcousticParams::from_wavelength(1.21, 343, 2.5, 1, 1);
    using C = std::complex<double>;
    const C j(0, 1);
    const double k = ap.k, w = ap.omega, rho = ap.rho0;
    auto p = [&](double r) {
        return -j * ap.vbar * rho * w * std::exp(-j * k * (r - 1.0)) * (std::exp(2.0 * j * k * r) - 1.0) /
               ((std::exp(2.0 * j * k) * (j * k - 1.0) + j * k + 1.0) * r);
    };
    for (double r : {0.1, 0.37, 0.8, 1.0}) {
        const C ref = p(r);
        EXPECT_NEAR(std::abs(ref.real()), 0.0, 1e-9 * std::abs(ref));
        EXPECT_NEAR(sphere_pressure(r, ap).p, ref.imag(), 1e-9 * std::abs(ref));
    }
    const double e = 1e-6;
    const C dp = (p(1 + e) - p(1 - e)) / (2 * e);
    EXPECT_NEAR(std::abs(j / (rho * w) * dp - ap.vbar), 0.0, 1e-8);
    EXPECT_NEAR(-sphere_pressure(1.0, ap).dp / (rho * w), ap.vbar, 1e-10);
    const double a = sphere_pressure(1e-8, ap).p, b = sphere_pressure(1e-6, ap).p;
    EXPECT_TRUE(std::isfinite(sphere_pressure(0.0, ap).p));
    EXPECT_LE(std::abs(a - b) / std::abs(b), 1e-4);
}

TEST(Kirsch, Values) {
    const ElasticityParams ep;
    EXPECT_NEAR(kirsch_fields(1.0, pi / 2, ep, 1.0).sx, 3.0, 1e-12);
    const auto far = kirsch_fields(1e5, 0.3, ep, 1.0);
    EXPECT_NEAR(far.sx, 1.0, 1e-9);
    EXPECT_NEAR(far.sy, 0.0, 1e-9);
    EXPECT_NEAR(far.txy, 0.0, 1e-9);
    EXPECT_THROW(kirsch_fields(0.5, 0.0, ep, 1.0), InvalidArgument);
    // Traction-free hole: sigma . n = 0 at r = R.
    for (double th : {0.1, 0.7, 1.3}) {
        const auto f = kirsch_fields(1.0, th, ep, 1.0);
        EXPECT_NEAR(f.sx * std::cos(th) + f.txy * std::sin(th), 0.0, 1e-12);
        EXPECT_NEAR(f.txy * std::cos(th) + f.sy * std::sin(th), 0.0, 1e-12);
    }
}

TEST(Kirsch, EquilibriumAndCompatibility) {
    const ElasticityParams ep;
    auto fields = [&](const Point& x) { return kirsch_fields(x.head<2>().norm(), std::atan2(x[1], x[0]), ep, 1.0); };
    UniformStream rng(31);
    for (int i = 0; i < 100; ++i) {
        const double r = rng.uniform(1.1, 4.0), th = rng.uniform(0, pi / 2);
        const Point x(r * std::cos(th), r * std::sin(th), 0);
        EXPECT_LE(stress_divergence(fields, x, 1e-4).norm(), 1e-6);
        EXPECT_LE((stress_from_displacement(fields, x, ep, 1e-5) - stress(fields(x))).norm(), 1e-6);
    }
}

TEST(Williams, ScalingAndEquilibrium) {
    const ElasticityParams ep;
    const WilliamsParams wp;
    for (double th : {-2.0, -0.6, 0.0, 0.9, 2.2}) {
        const auto z = williams_fields(0.0, th, wp, ep);
        EXPECT_EQ(z.u, 0.0);
        EXPECT_EQ(z.v, 0.0);
        const auto a = williams_fields(0.3, th, wp, ep), b = williams_fields(0.6, th, wp, ep);
        for (auto [x, y] : {std::pair{a.sx, b.sx}, {a.sy, b.sy}, {a.txy, b.txy}})
            if (std::abs(x) > 1e-12) EXPECT_NEAR(y / x, std::pow(2.0, wp.lambda1 - 1), 1e-10);
    }
    EXPECT_FALSE(std::isfinite(williams_fields(0.0, 0.5, wp, ep).sx));
    auto fields = [&](const Point& x) { return l_shape_fields(x, wp, ep); };
    UniformStream rng(3);
    for (int i = 0; i < 60; ++i) {
        const double r = rng.uniform(0.1, 1.0), th = rng.uniform(-pi / 2 + 0.05, pi - 0.05);
        const Point x(r * std::cos(th), r * std::sin(th), 0);
        EXPECT_LE(stress_divergence(fields, x, 1e-5).norm(), 1e-6);
        EXPECT_LE((stress_from_displacement(fields, x, ep, 1e-6) - stress(fields(x))).norm(), 1e-5);
    }
    // Traction-free faces of the re-entrant corner; lambda1 and Q carry nine digits.
    for (double r : {0.2, 0.7}) {
        const auto f1 = l_shape_fields(Point(-r, 0, 0), wp, ep);  // face y = 0, x < 0, normal -y
        EXPECT_NEAR(f1.sy, 0.0, 1e-8);
        EXPECT_NEAR(f1.txy, 0.0, 1e-8);
        const auto f2 = l_shape_fields(Point(0, -r, 0), wp, ep);  // face x = 0, y < 0, normal -x
        EXPECT_NEAR(f2.sx, 0.0, 1e-8);
        EXPECT_NEAR(f2.txy, 0.0, 1e-8);
    }
}

TEST(PoissonStar, ClosedForms) {
    EXPECT_DOUBLE_EQ(poisson_star(2, 0, 0).u, 1.0);
    UniformStream rng(8);
    for (int i = 0; i < 100; ++i) {
        const double x = rng.uniform(-1, 1), y = rng.uniform(-1, 1);
        EXPECT_EQ(poisson_star(1, x, y).b, 0.0);
        for (int which : {1, 2}) {
            const double e = 1e-4;
            auto u = [&](double a, double b) { return poisson_star(which, a, b).u; };
            const double lap =
                (u(x + e, y) + u(x - e, y) + u(x, y + e) + u(x, y - e) - 4 * u(x, y)) / (e * e);
            const auto s = poisson_star(which, x, y);
            EXPECT_NEAR(lap, s.b, 1e-6 * std::max(1.0, std::abs(s.b)));
            EXPECT_NEAR((u(x + 1e-6, y) - u(x - 1e-6, y)) / 2e-6, s.grad.x(), 1e-7 * (1 + std::abs(s.u)));
        }
    }
}

TEST(Registry, Benchmarks) {
    EXPECT_EQ(benchmark_names().size(), 8u);
    const auto plate = make_problem("plate-hole");
    EXPECT_EQ(plate.dof, 2);
    ASSERT_TRUE(std::holds_alternative<QuarterPlateWithHole>(plate.domain));
    EXPECT_EQ(std::get<QuarterPlateWithHole>(plate.domain).half_width, 4.0);
    EXPECT_EQ(plate.boundary(Point(4, 1, 0), Point(1, 0, 0)), BoundaryCondition::dirichlet);
    EXPECT_EQ(plate.reference->flux_name, "stress");
    const auto l = make_problem("l-shape");
    EXPECT_EQ(l.dof, 2);
    EXPECT_EQ(l.boundary(Point(1, 0.5, 0), Point(1, 0, 0)), BoundaryCondition::dirichlet);
    const auto c = make_problem("helm2d-circle");
    EXPECT_EQ(c.dof, 1);
    EXPECT_EQ(c.boundary(Point(1, 0, 0), Point(1, 0, 0)), BoundaryCondition::neumann);
    EXPECT_EQ(make_problem("helm1d-natural").boundary(Point(1, 0, 0), Point(1, 0, 0)), BoundaryCondition::neumann);
    EXPECT_THROW(make_problem("no-such"), InvalidArgument);
    for (const auto& name : benchmark_names()) EXPECT_TRUE(make_problem(name).reference.has_value()) << name;
}

TEST(Registry, BoundaryDataConsistentWithReference) {
    for (const auto& name : benchmark_names()) {
        const auto prob = make_problem(name);
        const NodeSet ns = generate_nodes(prob.domain, name == "helm3d-sphere" ? 0.3 : 0.25, prob.boundary);
        for (std::size_t a = 0; a < ns.size(); ++a) {
            const Point& x = ns.coord(a);
            const Eigen::VectorXd u = prob.reference->value(x);
            if (!u.allFinite()) continue;
            if (ns.kind(a) == NodeKind::dirichlet) EXPECT_LE((prob.dirichlet_data(x) - u).norm(), 1e-12 * (1 + u.norm())) << name;
        }
    }
}
