#include "holmes/analysis.hpp"

#include "holmes/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace holmes {

double relative_error(const Eigen::MatrixXd& exact, const Eigen::MatrixXd& approx) {
    HOLMES_REQUIRE(exact.rows() == approx.rows() && exact.cols() == approx.cols(), InvalidArgument,
                   "relative_error: shape mismatch");
    double num = 0.0, den = 0.0;
    for (Eigen::Index r = 0; r < exact.rows(); ++r) {
        if (!exact.row(r).allFinite()) continue;
        num += (exact.row(r) - approx.row(r)).squaredNorm();
        den += exact.row(r).squaredNorm();
    }
    HOLMES_REQUIRE(den > 0.0, InvalidArgument, "relative_error: exact field is zero");
    return std::sqrt(num / den);
}

double fit_rate(std::span<const double> m, std::span<const double> error, int dim, std::size_t tail) {
    HOLMES_REQUIRE(m.size() == error.size(), InvalidArgument, "fit_rate: length mismatch");
    HOLMES_REQUIRE(dim >= 1, InvalidArgument, "fit_rate: dimension must be positive");
    const std::size_t begin = tail > 0 && tail < m.size() ? m.size() - tail : 0;
    HOLMES_REQUIRE(m.size() - begin >= 3, InvalidArgument, "fit_rate: need at least 3 rows");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(m.size() - begin);
    for (std::size_t i = begin; i < m.size(); ++i) {
        HOLMES_REQUIRE(error[i] > 0.0 && std::isfinite(error[i]) && m[i] > 0.0, InvalidArgument,
                       "fit_rate: errors and node counts must be positive");
        const double x = std::log(m[i]) / dim, y = std::log(error[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    HOLMES_REQUIRE(den > 0.0, InvalidArgument, "fit_rate: node counts must differ");
    return -(n * sxy - sx * sy) / den;
}

NodeSet make_grid(const ProblemDefinition& prob, double target_h, const StudySettings& s) {
    const int dim = domain_dimension(prob.domain);
    const auto floor = static_cast<std::size_t>(binomial(static_cast<std::size_t>(s.n + dim), static_cast<std::size_t>(dim)));
    NodeSet ns = generate_nodes(prob.domain, target_h, prob.boundary, floor);
    if (s.perturbation > 0.0) ns = perturb_nodes(ns, s.perturbation, s.seed);
    return ns;
}

SolveOutcome solve_on_nodes(const ProblemDefinition& prob, const NodeSet& ns, const StudySettings& s) {
    SolveOutcome out;
    out.params = holmes_params(s.n, s.p, s.R_hat, s.eps, ns.h());
    CollocationOptions co = s.collocation;
    co.nodal_operators = true;
    const CollocationSystem sys = assemble(prob, ns, out.params, co);
    out.max_row_nonzeros = sys.max_row_nonzeros;
    out.solution = solve_system(sys, s.solver);
    out.nodal = nodal_solution(sys, out.solution.d);
    if (!prob.reference) return out;

    const ReferenceSolution& ref = *prob.reference;
    const auto m = static_cast<Eigen::Index>(ns.size());
    const int dim = ns.dim();
    out.exact_value.resize(m, prob.dof);
    for (Eigen::Index a = 0; a < m; ++a)
        out.exact_value.row(a) = ref.value(ns.coord(static_cast<std::size_t>(a))).transpose();
    out.E_L2 = relative_error(out.exact_value, out.nodal.value);
    if (ref.flux && ref.flux_from_gradient) {
        for (Eigen::Index a = 0; a < m; ++a) {
            const Eigen::VectorXd ex = ref.flux(ns.coord(static_cast<std::size_t>(a)));
            Eigen::MatrixXd g(prob.dof, dim);
            for (int c = 0; c < prob.dof; ++c)
                for (int k = 0; k < dim; ++k) g(c, k) = out.nodal.gradient(a, c * dim + k);
            const Eigen::VectorXd ap = ref.flux_from_gradient(g);
            if (a == 0) {
                out.exact_flux.resize(m, ex.size());
                out.approx_flux.resize(m, ap.size());
            }
            out.exact_flux.row(a) = ex.transpose();
            out.approx_flux.row(a) = ap.transpose();
        }
        out.E_H1 = relative_error(out.exact_flux, out.approx_flux);
    }
    return out;
}

ConvergenceReport run_convergence(const ProblemDefinition& prob, std::span<const double> grids,
                                  const StudySettings& s) {
    HOLMES_REQUIRE(grids.size() >= 3, InvalidArgument, "run_convergence: need at least 3 grids");
    HOLMES_REQUIRE(prob.reference.has_value(), InvalidArgument, "run_convergence: problem has no reference solution");
    ConvergenceReport rep;
    rep.benchmark = prob.name;
    rep.dim = domain_dimension(prob.domain);
    rep.flux_name = prob.reference->flux_name;
    rep.settings = s;
    for (double h : grids) {
        ConvergenceRow row;
        try {
            const NodeSet ns = make_grid(prob, h, s);
            row.m = ns.size();
            row.h = ns.h();
            const SolveOutcome out = solve_on_nodes(prob, ns, s);
            row.E_L2 = out.E_L2;
            row.E_H1 = out.E_H1;
            row.residual = out.solution.relative_residual;
        } catch (const Error& e) {
            row.ok = false;
            row.error = e.what();
            row.E_L2 = row.E_H1 = std::numeric_limits<double>::quiet_NaN();
        }
        rep.rows.push_back(std::move(row));
    }
    std::stable_sort(rep.rows.begin(), rep.rows.end(),
                     [](const ConvergenceRow& a, const ConvergenceRow& b) { return a.m < b.m; });
    fit_report(rep);
    return rep;
}

void fit_report(ConvergenceReport& rep, std::size_t tail) {
    std::vector<double> m, e2, e1;
    for (const auto& r : rep.rows)
        if (r.ok) {
            m.push_back(static_cast<double>(r.m));
            e2.push_back(r.E_L2);
            e1.push_back(r.E_H1);
        }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto fit = [&](const std::vector<double>& e) {
        try {
            return fit_rate(m, e, rep.dim, tail);
        } catch (const InvalidArgument&) {
            return nan;
        }
    };
    rep.rate_L2 = fit(e2);
    rep.rate_H1 = fit(e1);
}

std::string report_csv(const ConvergenceReport& rep) {
    std::ostringstream os;
    os << "m,E_L2,E_H1\n";
    for (const auto& r : rep.rows) os << r.m << ',' << format_double(r.E_L2) << ',' << format_double(r.E_H1) << '\n';
    return os.str();
}

std::string report_meta(const ConvergenceReport& rep) {
    std::ostringstream os;
    const auto& s = rep.settings;
    os << "benchmark = " << rep.benchmark << '\n'
       << "dim = " << rep.dim << '\n'
       << "n = " << s.n << '\n'
       << "p = " << format_double(s.p) << '\n'
       << "R_hat = " << format_double(s.R_hat) << '\n'
       << "eps = " << format_double(s.eps) << '\n'
       << "perturbation = " << format_double(s.perturbation) << '\n'
       << "seed = " << s.seed << '\n'
       << "h1_field = " << rep.flux_name << '\n'
       << "fitted_rate_L2 = " << format_double(rep.rate_L2) << '\n'
       << "fitted_rate_H1 = " << format_double(rep.rate_H1) << '\n';
    std::size_t failed = 0;
    for (std::size_t i = 0; i < rep.rows.size(); ++i)
        if (!rep.rows[i].ok) {
            ++failed;
            std::string msg = rep.rows[i].error;
            std::replace_if(msg.begin(), msg.end(), [](char c) { return c == '"' || c == '#' || c == '\n'; }, ' ');
            os << "row_" << i << "_error = \"" << msg << "\"\n";
        }
    os << "failed_rows = " << failed << '\n';
    return os.str();
}

}  // namespace holmes
