#pragma once

#include "holmes/common.hpp"
#include "holmes/geometry.hpp"
#include "holmes/maxent.hpp"
#include "holmes/polynomial.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace holmes {

struct AcousticParams {
    double rho0 = 1.21;        // kg/m^3
    double c = 343.0;          // m/s
    double wavelength = 2.5;   // m
    double omega = 0.0;        // rad/s
    double k = 0.0;            // 1/m
    double vbar = 1.0;         // m/s, wall normal velocity
    double R = 1.0;            // m

    /// omega = 2 pi c / wavelength, k = omega / c.
    static AcousticParams from_wavelength(double rho0, double c, double wavelength, double vbar, double R);
};

/// Plane-stress isotropic material with remote traction T.
struct ElasticityParams {
    double E = 1.0;
    double nu = 0.3;
    double T = 1.0;

    double G() const { return E / (2.0 * (1.0 + nu)); }
    double kappa() const { return (3.0 - nu) / (1.0 + nu); }
    double C11() const { return E / (1.0 - nu * nu); }
    double C12() const { return nu * E / (1.0 - nu * nu); }
};

/// Mode I corner field for a right-angle re-entrant corner.
struct WilliamsParams {
    double lambda1 = 0.544483737;
    double Q = 0.543075579;
    double alpha = 1.5707963267948966;  // corner angle pi/2 (material spans 3 pi/2)
};

struct ElasticFields {
    double u = 0, v = 0, sx = 0, sy = 0, txy = 0;
};

struct Helmholtz1dSample {
    double u, du, d2u, b;
};

/// u = sin(3x) e^x + atan(x) + cosh(x) with b = u'' + u.
Helmholtz1dSample helmholtz1d(double x);

/// Real profile pt with p = j pt and its radial derivative.
struct RadialSample {
    double p, dp;
};
RadialSample circle_pressure(double r, const AcousticParams& ap);
RadialSample sphere_pressure(double r, const AcousticParams& ap);

/// Kirsch infinite plate with a hole of radius R under uniaxial tension T along x; r >= R.
ElasticFields kirsch_fields(double r, double theta, const ElasticityParams& ep, double R);

/// Mode I field in the corner frame: theta measured from the bisector, faces at +-3 pi / 4. r > 0 for stresses.
ElasticFields williams_fields(double r, double theta, const WilliamsParams& wp, const ElasticityParams& ep);

/// Williams field for the L-shaped domain with the re-entrant corner at the origin (bisector at pi / 4).
ElasticFields l_shape_fields(const Point& x, const WilliamsParams& wp, const ElasticityParams& ep);

struct PoissonSample {
    double u;
    Eigen::Vector2d grad;
    double b;
};
/// which = 1: u = sinh x cos y; which = 2: u = e^{x^2+y^2} + sinh x cos 2y. b = Laplacian of u.
PoissonSample poisson_star(int which, double x, double y);

/// Row block produced by an operator at one collocation point: dof rows,
/// neighbors * dof columns in node-major order (column b * dof + c).
struct RowOperator {
    int deriv_order = 0;
    std::function<Eigen::MatrixXd(const BasisEval& be, const Point& normal)> apply;
};

struct ReferenceSolution {
    /// Field components, length dof.
    std::function<Eigen::VectorXd(const Point&)> value;
    /// Secondary field for the H1-type error: the gradient (scalar problems) or
    /// the stress (sx, sy, txy) for elasticity. Non-finite entries mark singular points.
    std::function<Eigen::VectorXd(const Point&)> flux;
    /// Maps a dof x dim gradient of the discrete field to the same secondary field.
    std::function<Eigen::VectorXd(const Eigen::MatrixXd& gradient)> flux_from_gradient;
    std::string flux_name = "gradient";
};

struct ProblemDefinition {
    std::string name;
    int dof = 1;
    DomainSpec domain;
    BoundaryRule boundary;
    RowOperator interior;
    RowOperator dirichlet;
    RowOperator neumann;
    /// Right-hand side f of interior rows L u = f.
    std::function<Eigen::VectorXd(const Point&)> source;
    std::function<Eigen::VectorXd(const Point&)> dirichlet_data;
    std::function<Eigen::VectorXd(const Point& x, const Point& normal)> neumann_data;
    std::optional<ReferenceSolution> reference;
};

/// Row operators shared by the benchmarks.
RowOperator scalar_operator(double laplacian_coefficient, double value_coefficient);
RowOperator trace_operator(int dof);
RowOperator normal_derivative_operator(double coefficient);
RowOperator navier_operator(const ElasticityParams& ep);
RowOperator traction_operator(const ElasticityParams& ep);

/// Parameters the benchmark registry reads.
struct BenchmarkParams {
    AcousticParams acoustic = AcousticParams::from_wavelength(1.21, 343.0, 2.5, 1.0, 1.0);
    ElasticityParams elasticity;
    WilliamsParams williams;
    double plate_half_width = 4.0;
    double hole_radius = 1.0;
    double l_size = 1.0;
};

std::vector<std::string> benchmark_names();
bool is_benchmark(const std::string& name);

/// Throws InvalidArgument for unknown names.
ProblemDefinition make_problem(const std::string& name, const BenchmarkParams& params = {});

enum class PatchOperator { poisson, helmholtz, plane_stress };

/// Problem whose exact solution is the given polynomial (one per component).
/// Boundary nodes use `rule`; data and sources are derived from the polynomials.
ProblemDefinition polynomial_problem(PatchOperator op, const DomainSpec& domain, std::vector<Polynomial> solution,
                                     const BoundaryRule& rule, const ElasticityParams& ep = {});

}  // namespace holmes
