#include "holmes/problems.hpp"

#include "holmes/nurbs.hpp"
#include "holmes/special_functions.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace holmes {

AcousticParams AcousticParams::from_wavelength(double rho0, double c, double wavelength, double vbar, double R) {
    HOLMES_REQUIRE(rho0 > 0 && c > 0 && wavelength > 0 && R > 0, InvalidArgument,
                   "acoustic parameters must be positive");
    AcousticParams ap;
    ap.rho0 = rho0;
    ap.c = c;
    ap.wavelength = wavelength;
    ap.omega = 2.0 * std::numbers::pi * c / wavelength;
    ap.k = ap.omega / c;
    ap.vbar = vbar;
    ap.R = R;
    return ap;
}

Helmholtz1dSample helmholtz1d(double x) {
    const double ex = std::exp(x), s3 = std::sin(3 * x), c3 = std::cos(3 * x);
    const double q = 1.0 + x * x;
    Helmholtz1dSample s;
    s.u = s3 * ex + std::atan(x) + std::cosh(x);
    s.du = ex * (3 * c3 + s3) + 1.0 / q + std::sinh(x);
    s.d2u = ex * (6 * c3 - 8 * s3) - 2 * x / (q * q) + std::cosh(x);
    s.b = s.d2u + s.u;
    return s;
}

RadialSample circle_pressure(double r, const AcousticParams& ap) {
    HOLMES_REQUIRE(r >= 0.0 && r <= ap.R * (1 + 1e-12), InvalidArgument, "circle_pressure: r outside [0, R]");
    const double j1R = bessel_j1(ap.k * ap.R);
    HOLMES_REQUIRE(std::abs(j1R) > 1e-12, InvalidArgument, "circle_pressure: resonant wavenumber (J1(kR) = 0)");
    const double a = ap.vbar * ap.rho0 * ap.omega;
    return {a * bessel_j0(ap.k * r) / (ap.k * j1R), -a * bessel_j1(ap.k * r) / j1R};
}

RadialSample sphere_pressure(double r, const AcousticParams& ap) {
    HOLMES_REQUIRE(r >= 0.0 && r <= ap.R * (1 + 1e-12), InvalidArgument, "sphere_pressure: r outside [0, R]");
    const double kR = ap.k * ap.R;
    const double den = kR * std::cos(kR) - std::sin(kR);
    HOLMES_REQUIRE(std::abs(den) > 1e-12, InvalidArgument, "sphere_pressure: resonant wavenumber");
    const double A = -ap.vbar * ap.rho0 * ap.omega * ap.R * ap.R / den;
    const double kr = ap.k * r;
    if (kr < 1e-4) {
        // sin(kr)/r and its derivative from their Taylor series.
        const double k = ap.k;
        return {A * k * (1.0 - kr * kr / 6.0 + kr * kr * kr * kr / 120.0),
                A * k * k * (-kr / 3.0 + kr * kr * kr / 30.0)};
    }
    return {A * std::sin(kr) / r, A * (kr * std::cos(kr) - std::sin(kr)) / (r * r)};
}

ElasticFields kirsch_fields(double r, double theta, const ElasticityParams& ep, double R) {
    HOLMES_REQUIRE(R > 0 && r >= R * (1 - 1e-12), InvalidArgument, "kirsch_fields: r must be at least R");
    const double T = ep.T, G = ep.G(), kap = ep.kappa();
    const double c = std::cos(theta), s = std::sin(theta);
    const double c2 = std::cos(2 * theta), s2 = std::sin(2 * theta);
    const double c3 = std::cos(3 * theta), s3 = std::sin(3 * theta);
    const double c4 = std::cos(4 * theta), s4 = std::sin(4 * theta);
    const double a = R / r, a2 = a * a, a4 = a2 * a2;
    const double pre = T * R / (8 * G);
    ElasticFields f;
    f.u = pre * ((r / R) * (kap + 1) * c + 2 * a * ((1 + kap) * c + c3) - 2 * a * a2 * c3);
    f.v = pre * ((r / R) * (kap - 3) * s + 2 * a * ((1 - kap) * s + s3) - 2 * a * a2 * s3);
    f.sx = T * (1 - a2 * (1.5 * c2 + c4) + 1.5 * a4 * c4);
    f.sy = T * (-a2 * (0.5 * c2 - c4) - 1.5 * a4 * c4);
    f.txy = T * (-a2 * (0.5 * s2 + s4) + 1.5 * a4 * s4);
    return f;
}

ElasticFields williams_fields(double r, double theta, const WilliamsParams& wp, const ElasticityParams& ep) {
    HOLMES_REQUIRE(r >= 0.0, InvalidArgument, "williams_fields: r must be non-negative");
    const double l = wp.lambda1, Q = wp.Q, G = ep.G(), kap = ep.kappa();
    ElasticFields f;
    const double rl = std::pow(r, l);
    f.u = rl / (2 * G) * ((kap - Q * (l + 1)) * std::cos(l * theta) - l * std::cos((l - 2) * theta));
    f.v = rl / (2 * G) * ((kap + Q * (l + 1)) * std::sin(l * theta) + l * std::sin((l - 2) * theta));
    if (r == 0.0) {
        const double inf = std::numeric_limits<double>::infinity();
        f.sx = f.sy = f.txy = inf;
        return f;
    }
    const double pre = l * std::pow(r, l - 1);
    const double c1 = std::cos((l - 1) * theta), c3 = std::cos((l - 3) * theta);
    const double s1 = std::sin((l - 1) * theta), s3 = std::sin((l - 3) * theta);
    f.sx = pre * ((2 - Q * (l + 1)) * c1 - (l - 1) * c3);
    f.sy = pre * ((2 + Q * (l + 1)) * c1 + (l - 1) * c3);
    f.txy = pre * (Q * (l + 1) * s1 + (l - 1) * s3);
    return f;
}

ElasticFields l_shape_fields(const Point& x, const WilliamsParams& wp, const ElasticityParams& ep) {
    constexpr double rot = std::numbers::pi / 4;
    const double r = std::hypot(x[0], x[1]);
    double th = std::atan2(x[1], x[0]) - rot;
    if (th <= -std::numbers::pi) th += 2 * std::numbers::pi;
    if (th > std::numbers::pi) th -= 2 * std::numbers::pi;
    const ElasticFields w = williams_fields(r, th, wp, ep);
    const double c = std::cos(rot), s = std::sin(rot);
    ElasticFields g;
    g.u = c * w.u - s * w.v;
    g.v = s * w.u + c * w.v;
    if (r == 0.0) {
        g.sx = g.sy = g.txy = w.sx;
        return g;
    }
    // sigma = R sigma_w R^T
    g.sx = c * c * w.sx - 2 * c * s * w.txy + s * s * w.sy;
    g.sy = s * s * w.sx + 2 * c * s * w.txy + c * c * w.sy;
    g.txy = c * s * (w.sx - w.sy) + (c * c - s * s) * w.txy;
    return g;
}

PoissonSample poisson_star(int which, double x, double y) {
    HOLMES_REQUIRE(which == 1 || which == 2, InvalidArgument, "poisson_star: which must be 1 or 2");
    PoissonSample s;
    if (which == 1) {
        s.u = std::sinh(x) * std::cos(y);
        s.grad = {std::cosh(x) * std::cos(y), -std::sinh(x) * std::sin(y)};
        s.b = 0.0;
        return s;
    }
    const double e = std::exp(x * x + y * y);
    s.u = e + std::sinh(x) * std::cos(2 * y);
    s.grad = {2 * x * e + std::cosh(x) * std::cos(2 * y), 2 * y * e - 2 * std::sinh(x) * std::sin(2 * y)};
    s.b = 4 * (1 + x * x + y * y) * e - 3 * std::sinh(x) * std::cos(2 * y);
    return s;
}

RowOperator scalar_operator(double lap, double val) {
    return {lap != 0.0 ? 2 : 0, [lap, val](const BasisEval& be, const Point&) {
                Eigen::MatrixXd row(1, static_cast<Eigen::Index>(be.size()));
                for (std::size_t b = 0; b < be.size(); ++b) {
                    const auto i = static_cast<Eigen::Index>(b);
                    row(0, i) = val * be.phi[i] + (lap != 0.0 ? lap * be.laplacian(b) : 0.0);
                }
                return row;
            }};
}

RowOperator trace_operator(int dof) {
    return {0, [dof](const BasisEval& be, const Point&) {
                const auto k = static_cast<Eigen::Index>(be.size());
                Eigen::MatrixXd row = Eigen::MatrixXd::Zero(dof, k * dof);
                for (Eigen::Index b = 0; b < k; ++b)
                    for (int c = 0; c < dof; ++c) row(c, b * dof + c) = be.phi[b];
                return row;
            }};
}

RowOperator normal_derivative_operator(double coefficient) {
    return {1, [coefficient](const BasisEval& be, const Point& n) {
                Eigen::MatrixXd row(1, static_cast<Eigen::Index>(be.size()));
                for (Eigen::Index b = 0; b < row.cols(); ++b) {
                    double s = 0.0;
                    for (int i = 0; i < be.dim; ++i) s += be.grad(b, i) * n[i];
                    row(0, b) = coefficient * s;
                }
                return row;
            }};
}

RowOperator navier_operator(const ElasticityParams& ep) {
    const double C11 = ep.C11(), C12 = ep.C12(), G = ep.G();
    return {2, [=](const BasisEval& be, const Point&) {
                HOLMES_REQUIRE(be.dim == 2, InvalidArgument, "plane-stress operator needs a 2D node set");
                const auto k = static_cast<Eigen::Index>(be.size());
                Eigen::MatrixXd row(2, 2 * k);
                for (Eigen::Index b = 0; b < k; ++b) {
                    const double xx = be.hess(b, 0), xy = be.hess(b, 1), yy = be.hess(b, 3);
                    row(0, 2 * b) = C11 * xx + G * yy;
                    row(0, 2 * b + 1) = (C12 + G) * xy;
                    row(1, 2 * b) = (C12 + G) * xy;
                    row(1, 2 * b + 1) = G * xx + C11 * yy;
                }
                return row;
            }};
}

RowOperator traction_operator(const ElasticityParams& ep) {
    const double C11 = ep.C11(), C12 = ep.C12(), G = ep.G();
    return {1, [=](const BasisEval& be, const Point& n) {
                HOLMES_REQUIRE(be.dim == 2, InvalidArgument, "traction operator needs a 2D node set");
                const auto k = static_cast<Eigen::Index>(be.size());
                Eigen::MatrixXd row(2, 2 * k);
                for (Eigen::Index b = 0; b < k; ++b) {
                    const double px = be.grad(b, 0), py = be.grad(b, 1);
                    row(0, 2 * b) = C11 * px * n[0] + G * py * n[1];
                    row(0, 2 * b + 1) = C12 * py * n[0] + G * px * n[1];
                    row(1, 2 * b) = G * py * n[0] + C12 * px * n[1];
                    row(1, 2 * b + 1) = G * px * n[0] + C11 * py * n[1];
                }
                return row;
            }};
}

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

std::function<Eigen::VectorXd(const Point&)> zero_source(int dof) {
    return [dof](const Point&) { return Eigen::VectorXd::Zero(dof).eval(); };
}

// Gradient as the secondary field: flattens a 1 x dim matrix.
std::function<Eigen::VectorXd(const Eigen::MatrixXd&)> gradient_flux() {
    return [](const Eigen::MatrixXd& g) { return Eigen::VectorXd(g.row(0).transpose()); };
}

std::function<Eigen::VectorXd(const Eigen::MatrixXd&)> stress_flux(const ElasticityParams& ep) {
    const double C11 = ep.C11(), C12 = ep.C12(), G = ep.G();
    return [=](const Eigen::MatrixXd& g) {
        const double ux = g(0, 0), uy = g(0, 1), vx = g(1, 0), vy = g(1, 1);
        return vec({C11 * ux + C12 * vy, C12 * ux + C11 * vy, G * (uy + vx)});
    };
}

ProblemDefinition helm1d(bool natural) {
    ProblemDefinition p;
    p.name = natural ? "helm1d-natural" : "helm1d-essential";
    p.dof = 1;
    p.domain = Interval{-1.0, 1.0};
    p.boundary = natural ? all_neumann() : all_dirichlet();
    p.interior = scalar_operator(1.0, 1.0);
    p.dirichlet = trace_operator(1);
    p.neumann = normal_derivative_operator(1.0);
    p.source = [](const Point& x) { return vec({helmholtz1d(x[0]).b}); };
    p.dirichlet_data = [](const Point& x) { return vec({helmholtz1d(x[0]).u}); };
    p.neumann_data = [](const Point& x, const Point& n) { return vec({helmholtz1d(x[0]).du * n[0]}); };
    p.reference = ReferenceSolution{[](const Point& x) { return vec({helmholtz1d(x[0]).u}); },
                                    [](const Point& x) { return vec({helmholtz1d(x[0]).du}); }, gradient_flux(),
                                    "gradient"};
    return p;
}

ProblemDefinition acoustic(bool sphere, const AcousticParams& ap) {
    ProblemDefinition p;
    p.name = sphere ? "helm3d-sphere" : "helm2d-circle";
    p.dof = 1;
    if (sphere)
        p.domain = Ball{ap.R};
    else
        p.domain = Disk{ap.R};
    const int dim = sphere ? 3 : 2;
    auto profile = [sphere, ap](double r) { return sphere ? sphere_pressure(r, ap) : circle_pressure(r, ap); };
    auto radius = [dim](const Point& x) { return x.head(dim).norm(); };
    p.boundary = all_neumann();
    p.interior = scalar_operator(1.0, ap.k * ap.k);
    p.dirichlet = trace_operator(1);
    p.neumann = normal_derivative_operator(-1.0 / (ap.rho0 * ap.omega));
    p.source = zero_source(1);
    p.dirichlet_data = [=](const Point& x) { return vec({profile(std::min(radius(x), ap.R)).p}); };
    p.neumann_data = [ap](const Point&, const Point&) { return vec({ap.vbar}); };
    p.reference = ReferenceSolution{
        [=](const Point& x) { return vec({profile(std::min(radius(x), ap.R)).p}); },
        [=](const Point& x) {
            const double r = radius(x);
            Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
            if (r > 0.0) g = profile(std::min(r, ap.R)).dp / r * x.head(dim);
            return g;
        },
        gradient_flux(), "gradient"};
    return p;
}

ProblemDefinition elastic(const std::string& name, const DomainSpec& domain,
                          std::function<ElasticFields(const Point&)> fields, const ElasticityParams& ep) {
    ProblemDefinition p;
    p.name = name;
    p.dof = 2;
    p.domain = domain;
    p.boundary = all_dirichlet();
    p.interior = navier_operator(ep);
    p.dirichlet = trace_operator(2);
    p.neumann = traction_operator(ep);
    p.source = zero_source(2);
    p.dirichlet_data = [fields](const Point& x) {
        const auto f = fields(x);
        return vec({f.u, f.v});
    };
    p.neumann_data = [fields](const Point& x, const Point& n) {
        const auto f = fields(x);
        return vec({f.sx * n[0] + f.txy * n[1], f.txy * n[0] + f.sy * n[1]});
    };
    p.reference = ReferenceSolution{[fields](const Point& x) {
                                        const auto f = fields(x);
                                        return vec({f.u, f.v});
                                    },
                                    [fields](const Point& x) {
                                        const auto f = fields(x);
                                        return vec({f.sx, f.sy, f.txy});
                                    },
                                    stress_flux(ep), "stress"};
    return p;
}

ProblemDefinition star(int which) {
    static const auto curve = std::make_shared<const NurbsCurve>(star_curve());
    ProblemDefinition p;
    p.name = which == 1 ? "star-poisson-u1" : "star-poisson-u2";
    p.dof = 1;
    p.domain = NurbsRegion{curve};
    p.boundary = all_dirichlet();
    p.interior = scalar_operator(1.0, 0.0);
    p.dirichlet = trace_operator(1);
    p.neumann = normal_derivative_operator(1.0);
    p.source = [which](const Point& x) { return vec({poisson_star(which, x[0], x[1]).b}); };
    p.dirichlet_data = [which](const Point& x) { return vec({poisson_star(which, x[0], x[1]).u}); };
    p.neumann_data = [which](const Point& x, const Point& n) {
        return vec({poisson_star(which, x[0], x[1]).grad.dot(n.head<2>())});
    };
    p.reference = ReferenceSolution{[which](const Point& x) { return vec({poisson_star(which, x[0], x[1]).u}); },
                                    [which](const Point& x) {
                                        return Eigen::VectorXd(poisson_star(which, x[0], x[1]).grad);
                                    },
                                    gradient_flux(), "gradient"};
    return p;
}

}  // namespace

std::vector<std::string> benchmark_names() {
    return {"helm1d-essential", "helm1d-natural", "helm2d-circle",   "helm3d-sphere",
            "plate-hole",       "l-shape",        "star-poisson-u1", "star-poisson-u2"};
}

bool is_benchmark(const std::string& name) {
    for (const auto& n : benchmark_names())
        if (n == name) return true;
    return false;
}

ProblemDefinition make_problem(const std::string& name, const BenchmarkParams& bp) {
    if (name == "helm1d-essential") return helm1d(false);
    if (name == "helm1d-natural") return helm1d(true);
    if (name == "helm2d-circle") return acoustic(false, bp.acoustic);
    if (name == "helm3d-sphere") return acoustic(true, bp.acoustic);
    if (name == "plate-hole") {
        const auto ep = bp.elasticity;
        const double R = bp.hole_radius;
        return elastic(
            name, QuarterPlateWithHole{bp.plate_half_width, R},
            [ep, R](const Point& x) { return kirsch_fields(std::hypot(x[0], x[1]), std::atan2(x[1], x[0]), ep, R); },
            ep);
    }
    if (name == "l-shape") {
        const auto ep = bp.elasticity;
        const auto wp = bp.williams;
        return elastic(name, LShape{bp.l_size}, [ep, wp](const Point& x) { return l_shape_fields(x, wp, ep); }, ep);
    }
    if (name == "star-poisson-u1") return star(1);
    if (name == "star-poisson-u2") return star(2);
    throw InvalidArgument("unknown benchmark '" + name + "'");
}

ProblemDefinition polynomial_problem(PatchOperator op, const DomainSpec& domain, std::vector<Polynomial> sol,
                                     const BoundaryRule& rule, const ElasticityParams& ep) {
    const int dim = domain_dimension(domain);
    const int dof = op == PatchOperator::plane_stress ? 2 : 1;
    HOLMES_REQUIRE(static_cast<int>(sol.size()) == dof, InvalidArgument,
                   "polynomial_problem: need one polynomial per component");
    HOLMES_REQUIRE(op != PatchOperator::plane_stress || dim == 2, InvalidArgument,
                   "polynomial_problem: plane stress needs a 2D domain");
    for (const auto& q : sol)
        HOLMES_REQUIRE(q.dim() == dim, InvalidArgument, "polynomial_problem: polynomial dimension mismatch");

    ProblemDefinition p;
    p.name = op == PatchOperator::poisson ? "patch-poisson" : op == PatchOperator::helmholtz ? "patch-helmholtz"
                                                                                              : "patch-plane-stress";
    p.dof = dof;
    p.domain = domain;
    p.boundary = rule;
    p.dirichlet = trace_operator(dof);
    auto values = [sol](const Point& x) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(sol.size()));
        for (std::size_t c = 0; c < sol.size(); ++c) v[static_cast<Eigen::Index>(c)] = sol[c].value(x);
        return v;
    };
    auto grad = [sol, dim](const Point& x) {
        Eigen::MatrixXd g(static_cast<Eigen::Index>(sol.size()), dim);
        for (std::size_t c = 0; c < sol.size(); ++c) g.row(static_cast<Eigen::Index>(c)) = sol[c].gradient(x).transpose();
        return g;
    };
    p.dirichlet_data = values;
    ReferenceSolution ref;
    ref.value = values;
    if (op == PatchOperator::plane_stress) {
        const double C11 = ep.C11(), C12 = ep.C12(), G = ep.G();
        p.interior = navier_operator(ep);
        p.neumann = traction_operator(ep);
        p.source = [sol, C11, C12, G](const Point& x) {
            const Eigen::MatrixXd hu = sol[0].hessian(x), hv = sol[1].hessian(x);
            return vec({C11 * hu(0, 0) + G * hu(1, 1) + (C12 + G) * hv(0, 1),
                        (C12 + G) * hu(0, 1) + G * hv(0, 0) + C11 * hv(1, 1)});
        };
        auto flux = stress_flux(ep);
        p.neumann_data = [grad, flux](const Point& x, const Point& n) {
            const Eigen::VectorXd s = flux(grad(x));
            return vec({s[0] * n[0] + s[2] * n[1], s[2] * n[0] + s[1] * n[1]});
        };
        ref.flux = [grad, flux](const Point& x) { return flux(grad(x)); };
        ref.flux_from_gradient = flux;
        ref.flux_name = "stress";
    } else {
        const double val = op == PatchOperator::helmholtz ? 1.0 : 0.0;
        p.interior = scalar_operator(1.0, val);
        p.neumann = normal_derivative_operator(1.0);
        p.source = [sol, val](const Point& x) { return vec({sol[0].hessian(x).trace() + val * sol[0].value(x)}); };
        p.neumann_data = [sol, dim](const Point& x, const Point& n) {
            return vec({sol[0].gradient(x).dot(n.head(dim))});
        };
        ref.flux = [sol](const Point& x) { return sol[0].gradient(x); };
        ref.flux_from_gradient = gradient_flux();
    }
    p.reference = ref;
    return p;
}

}  // namespace holmes
