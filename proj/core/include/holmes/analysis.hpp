#pragma once

#include "holmes/collocation.hpp"
#include "holmes/geometry.hpp"
#include "holmes/maxent.hpp"
#include "holmes/problems.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace holmes {

/// E = sqrt(sum |v - v^h|^2 / sum |v|^2) over rows (points) and columns
/// (components). Rows whose exact value is not finite are skipped.
/// Throws InvalidArgument when the exact field is zero.
double relative_error(const Eigen::MatrixXd& exact, const Eigen::MatrixXd& approx);

/// Least-squares slope of log E against log m^(1/dim), negated so convergence is positive.
/// `tail` > 0 restricts the fit to the last `tail` entries. Needs >= 3 entries with E > 0.
double fit_rate(std::span<const double> m, std::span<const double> error, int dim, std::size_t tail = 0);

struct StudySettings {
    int n = 2;
    double p = 2.0;
    double R_hat = 4.0;
    double eps = 1e-11;
    double perturbation = 0.0;
    std::uint64_t seed = 1;
    CollocationOptions collocation;
    SolveOptions solver;
};

/// Generates the benchmark's nodes at target_h and applies the perturbation.
NodeSet make_grid(const ProblemDefinition& prob, double target_h, const StudySettings& settings);

struct SolveOutcome {
    HolmesParams params;
    SolveResult solution;
    FieldEvaluation nodal;
    Eigen::MatrixXd exact_value;
    Eigen::MatrixXd exact_flux;
    Eigen::MatrixXd approx_flux;
    double E_L2 = 0.0;
    double E_H1 = 0.0;
    std::size_t max_row_nonzeros = 0;
};

/// Assembles, solves and (when the problem has a reference) measures nodal errors.
SolveOutcome solve_on_nodes(const ProblemDefinition& prob, const NodeSet& ns, const StudySettings& settings);

struct ConvergenceRow {
    std::size_t m = 0;
    double h = 0.0;
    double E_L2 = 0.0;
    double E_H1 = 0.0;
    double residual = 0.0;
    bool ok = true;
    std::string error;
};

struct ConvergenceReport {
    std::string benchmark;
    int dim = 1;
    std::string flux_name;
    StudySettings settings;
    std::vector<ConvergenceRow> rows;  // ascending m
    double rate_L2 = 0.0;              // NaN when fewer than 3 rows succeeded
    double rate_H1 = 0.0;
};

/// One row per target spacing. Stage failures are recorded in the row.
ConvergenceReport run_convergence(const ProblemDefinition& prob, std::span<const double> grids,
                                  const StudySettings& settings);

/// Fits both rates over the successful rows.
void fit_report(ConvergenceReport& report, std::size_t tail = 0);

/// CSV `m,E_L2,E_H1`; failed rows carry nan.
std::string report_csv(const ConvergenceReport& report);
/// key = value sidecar: benchmark, settings, fitted rates, failures.
std::string report_meta(const ConvergenceReport& report);

}  // namespace holmes
