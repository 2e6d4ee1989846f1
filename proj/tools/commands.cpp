#include "commands.hpp"

#include "holmes/analysis.hpp"
#include "holmes/collocation.hpp"
#include "holmes/io.hpp"
#include "holmes/maxent.hpp"
#include "holmes/problems.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace holmes::cli {

namespace fs = std::filesystem;

namespace {

std::string indexed(const std::string& stem, std::size_t i, const std::string& ext) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "_%03zu", i);
    return stem + buf + ext;
}

void echo_config(const RunConfig& cfg, const fs::path& out) { write_file_atomic(out / "config.txt", to_text(cfg)); }

BoundaryRule config_rule(const RunConfig& cfg) {
    return cfg.domain.empty() ? make_problem(cfg.benchmark).boundary : all_dirichlet();
}

NodeSet config_nodes(const RunConfig& cfg, const DomainSpec& domain, double h) {
    NodeSet ns = generate_nodes(domain, h, config_rule(cfg),
                                binomial(static_cast<std::size_t>(cfg.n + domain_dimension(domain)),
                                         static_cast<std::size_t>(domain_dimension(domain))));
    if (cfg.perturbation > 0.0) ns = perturb_nodes(ns, cfg.perturbation, cfg.seed);
    return ns;
}

const char* axis_name(int i) { return i == 0 ? "x" : i == 1 ? "y" : "z"; }

}  // namespace

int cmd_nodes(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const DomainSpec domain = config_domain(cfg);
    const auto spacings = config_spacings(cfg, domain);
    for (std::size_t i = 0; i < spacings.size(); ++i) {
        const NodeSet ns = config_nodes(cfg, domain, spacings[i]);
        const fs::path file = out / indexed("nodes", i, ".csv");
        write_node_csv(ns, file);
        log << file.string() << ": " << ns.size() << " nodes, h = " << format_double(ns.h()) << '\n';
    }
    echo_config(cfg, out);
    return 0;
}

int cmd_basis(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const DomainSpec domain = config_domain(cfg);
    const int dim = domain_dimension(domain);
    HOLMES_REQUIRE(dim <= 2, InvalidArgument, "basis: only 1D and 2D domains are supported");
    const auto spacings = config_spacings(cfg, domain);
    const NodeSet ns = config_nodes(cfg, domain, spacings.front());
    const HolmesParams params = holmes_params(cfg.n, cfg.p, cfg.support(), cfg.eps, ns.h());
    const MultiIndexSet mis = multi_indices(dim, cfg.n);

    std::vector<Point> points;
    if (dim == 1) {
        const auto& iv = std::get<Interval>(domain);
        for (std::size_t s = 0; s < cfg.samples; ++s)
            points.emplace_back(iv.a + (iv.b - iv.a) * static_cast<double>(s) / static_cast<double>(cfg.samples - 1),
                                0.0, 0.0);
    } else {
        Eigen::Vector2d lo = ns.coords()[0].head<2>(), hi = lo;
        for (const Point& x : ns.coords()) {
            lo = lo.cwiseMin(x.head<2>());
            hi = hi.cwiseMax(x.head<2>());
        }
        for (std::size_t j = 0; j < cfg.samples; ++j)
            for (std::size_t i = 0; i < cfg.samples; ++i) {
                const double tx = static_cast<double>(i) / static_cast<double>(cfg.samples - 1);
                const double ty = static_cast<double>(j) / static_cast<double>(cfg.samples - 1);
                const Point x(lo.x() + tx * (hi.x() - lo.x()), lo.y() + ty * (hi.y() - lo.y()), 0.0);
                if (domain_contains(domain, x)) points.push_back(x);
            }
    }

    std::ostringstream csv, summary;
    for (int i = 0; i < dim; ++i) csv << axis_name(i) << ',';
    csv << "node_index,phi";
    for (int i = 0; i < dim; ++i) csv << ",dphi_d" << axis_name(i);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) csv << ",d2phi_d" << axis_name(i) << axis_name(j);
    csv << '\n';
    for (int i = 0; i < dim; ++i) summary << axis_name(i) << ',';
    summary << "sum_phi,neighbors\n";

    double worst = 0.0;
    for (const Point& x : points) {
        const BasisEval be = evaluate_basis(ns, x, params, 2, mis);
        std::string coords;
        for (int i = 0; i < dim; ++i) coords += format_double(x[i]) + ',';
        for (std::size_t b = 0; b < be.size(); ++b) {
            const auto k = static_cast<Eigen::Index>(b);
            csv << coords << be.neighbors[b] << ',' << format_double(be.phi[k]);
            for (int i = 0; i < dim; ++i) csv << ',' << format_double(be.grad(k, i));
            for (int i = 0; i < dim; ++i)
                for (int j = i; j < dim; ++j) csv << ',' << format_double(be.dd(b, i, j));
            csv << '\n';
        }
        const double sum = be.phi.sum();
        worst = std::max(worst, std::abs(sum - 1.0));
        summary << coords << format_double(sum) << ',' << be.size() << '\n';
    }
    write_file_atomic(out / "basis.csv", csv.str());
    write_file_atomic(out / "basis_summary.csv", summary.str());
    write_node_csv(ns, out / "nodes.csv");
    std::ostringstream meta;
    meta << "n = " << params.n << "\np = " << format_double(params.p) << "\nR_hat = " << format_double(params.R_hat)
         << "\neps = " << format_double(params.eps) << "\ngamma = " << format_double(params.gamma)
         << "\nh = " << format_double(params.h) << "\nr_p = " << format_double(truncation_radius(params))
         << "\nnodes = " << ns.size() << "\nsamples = " << points.size()
         << "\nmax_partition_error = " << format_double(worst) << '\n';
    write_file_atomic(out / "basis.meta", meta.str());
    echo_config(cfg, out);
    log << "basis: " << points.size() << " samples, gamma = " << std::setprecision(4) << params.gamma << '\n';
    return 0;
}

int cmd_solve(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const ProblemDefinition prob = make_problem(cfg.benchmark);
    const StudySettings settings = study_settings(cfg);
    const auto spacings = config_spacings(cfg, prob.domain);
    const NodeSet ns = make_grid(prob, spacings.front(), settings);
    const SolveOutcome res = solve_on_nodes(prob, ns, settings);
    const int dim = ns.dim();

    std::ostringstream csv;
    for (int i = 0; i < dim; ++i) csv << axis_name(i) << ',';
    csv << "kind";
    for (int c = 0; c < prob.dof; ++c) csv << ",d" << c << ",uh" << c << ",u" << c;
    csv << '\n';
    for (std::size_t a = 0; a < ns.size(); ++a) {
        const auto r = static_cast<Eigen::Index>(a);
        for (int i = 0; i < dim; ++i) csv << format_double(ns.coord(a)[i]) << ',';
        csv << static_cast<int>(ns.kind(a));
        for (int c = 0; c < prob.dof; ++c)
            csv << ',' << format_double(res.solution.d[r * prob.dof + c]) << ','
                << format_double(res.nodal.value(r, c)) << ',' << format_double(res.exact_value(r, c));
        csv << '\n';
    }
    write_file_atomic(out / "solution.csv", csv.str());

    std::ostringstream summary;
    summary << "benchmark = " << prob.name << "\nm = " << ns.size() << "\nh = " << format_double(ns.h())
            << "\ngamma = " << format_double(res.params.gamma) << "\nE_L2 = " << format_double(res.E_L2)
            << "\nE_H1 = " << format_double(res.E_H1) << "\nh1_field = " << prob.reference->flux_name
            << "\nsolver = " << res.solution.method << "\nrelative_residual = "
            << format_double(res.solution.relative_residual)
            << "\nraw_relative_residual = " << format_double(res.solution.raw_relative_residual)
            << "\nmax_row_nonzeros = " << res.max_row_nonzeros << '\n';
    write_file_atomic(out / "summary.txt", summary.str());
    if (cfg.dump_matrix) {
        CollocationOptions co = settings.collocation;
        co.nodal_operators = false;
        write_matrix_market(assemble(prob, ns, res.params, co).matrix, out / "matrix.mtx");
    }
    echo_config(cfg, out);
    log << prob.name << ": m = " << ns.size() << ", E_L2 = " << res.E_L2 << ", E_H1 = " << res.E_H1
        << ", residual = " << res.solution.relative_residual << '\n';
    return 0;
}

int cmd_converge(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const ProblemDefinition prob = make_problem(cfg.benchmark);
    const auto spacings = config_spacings(cfg, prob.domain);
    const ConvergenceReport rep = run_convergence(prob, spacings, study_settings(cfg));
    write_file_atomic(out / "report.csv", report_csv(rep));
    write_file_atomic(out / "report.meta", report_meta(rep));
    echo_config(cfg, out);
    std::size_t ok = 0;
    for (const auto& r : rep.rows) {
        log << "m = " << r.m << "  E_L2 = " << r.E_L2 << "  E_H1 = " << r.E_H1;
        if (!r.ok) log << "  FAILED: " << r.error;
        log << '\n';
        ok += r.ok;
    }
    log << "fitted_rate_L2 = " << rep.rate_L2 << ", fitted_rate_H1 = " << rep.rate_H1 << '\n';
    return ok == 0 ? 1 : 0;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"HOLMES meshfree collocation solver"};
    app.require_subcommand(1);
    std::string config_path, out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    app.add_option("--config", config_path, "flat key = value configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "perturbation seed (overrides the config)");
    app.add_option("--threads", threads, "worker threads (overrides the config)");
    auto* nodes = app.add_subcommand("nodes", "write node sets");
    auto* basis = app.add_subcommand("basis", "dump basis functions and derivatives");
    auto* solve = app.add_subcommand("solve", "solve one benchmark on one grid");
    auto* converge = app.add_subcommand("converge", "run a convergence study");
    for (auto* sub : {nodes, basis, solve, converge}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = parse_run_config(read_key_values(config_path));
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        validate(cfg);
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    }

    try {
        const fs::path dir(out_dir);
        if (nodes->parsed()) return cmd_nodes(cfg, dir, out);
        if (basis->parsed()) return cmd_basis(cfg, dir, out);
        if (solve->parsed()) return cmd_solve(cfg, dir, out);
        return cmd_converge(cfg, dir, out);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace holmes::cli
