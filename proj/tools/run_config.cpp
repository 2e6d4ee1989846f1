#include "run_config.hpp"

#include "holmes/io.hpp"
#include "holmes/nurbs.hpp"
#include "holmes/problems.hpp"

#include <cmath>
#include <memory>
#include <set>
#include <sstream>

namespace holmes::cli {

namespace {

const std::set<std::string> kKeys = {
    "benchmark", "domain",  "n",           "p",          "R_hat",         "eps",     "grids",
    "node_counts", "perturbation", "seed", "threads",    "solver",        "solver_tol",
    "iterative_tol", "spacing", "samples", "dump_matrix"};

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw InvalidArgument(key + ": expected true or false, got '" + v + "'");
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    try {
        if constexpr (std::is_floating_point_v<T>)
            return static_cast<T>(parse_double(v));
        else
            return static_cast<T>(parse_int(v));
    } catch (const InvalidArgument&) {
        throw InvalidArgument(key + ": not a valid number: '" + v + "'");
    }
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& v) {
    std::vector<T> out;
    if (trim(v).empty()) return out;
    for (const auto& item : split(v, ',')) out.push_back(parse_number<T>(key, item));
    return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ',';
        if constexpr (std::is_floating_point_v<T>)
            os << format_double(v[i]);
        else
            os << v[i];
    }
    return os.str();
}

}  // namespace

RunConfig parse_run_config(const std::map<std::string, std::string>& kv) {
    RunConfig c;
    for (const auto& [key, v] : kv) {
        if (!kKeys.count(key)) throw InvalidArgument("unknown config key '" + key + "'");
        if (key == "benchmark") c.benchmark = v;
        else if (key == "domain") c.domain = v;
        else if (key == "n") c.n = parse_number<int>(key, v);
        else if (key == "p") c.p = parse_number<double>(key, v);
        else if (key == "R_hat") c.R_hat = trim(v).empty() ? std::nullopt : std::optional(parse_number<double>(key, v));
        else if (key == "eps") c.eps = parse_number<double>(key, v);
        else if (key == "grids") c.grids = parse_list<double>(key, v);
        else if (key == "node_counts") c.node_counts = parse_list<std::size_t>(key, v);
        else if (key == "perturbation") c.perturbation = parse_number<double>(key, v);
        else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
        else if (key == "threads") c.threads = parse_number<int>(key, v);
        else if (key == "solver") c.solver = v;
        else if (key == "solver_tol") c.solver_tol = parse_number<double>(key, v);
        else if (key == "iterative_tol") c.iterative_tol = parse_number<double>(key, v);
        else if (key == "spacing") c.spacing = v;
        else if (key == "samples") c.samples = parse_number<std::size_t>(key, v);
        else if (key == "dump_matrix") c.dump_matrix = parse_bool(key, v);
    }
    return c;
}

RunConfig parse_run_config_text(std::string_view text) { return parse_run_config(parse_key_values(text)); }

void validate(const RunConfig& c) {
    HOLMES_REQUIRE(is_benchmark(c.benchmark), InvalidArgument, "unknown benchmark '" + c.benchmark + "'");
    static const std::set<std::string> domains = {"", "interval", "disk", "sphere", "quarter-plate", "l-shape", "star"};
    HOLMES_REQUIRE(domains.count(c.domain), InvalidArgument, "unknown domain '" + c.domain + "'");
    holmes_params(c.n, c.p, c.support(), c.eps);
    HOLMES_REQUIRE(c.perturbation >= 0.0 && c.perturbation < 0.5, InvalidArgument,
                   "perturbation must lie in [0, 0.5)");
    HOLMES_REQUIRE(c.threads >= 1, InvalidArgument, "threads must be at least 1");
    HOLMES_REQUIRE(c.solver == "auto" || c.solver == "direct" || c.solver == "iterative", InvalidArgument,
                   "solver must be auto, direct or iterative");
    HOLMES_REQUIRE(c.spacing == "global" || c.spacing == "per-node", InvalidArgument,
                   "spacing must be global or per-node");
    HOLMES_REQUIRE(c.solver_tol > 0 && c.iterative_tol > 0, InvalidArgument, "solver tolerances must be positive");
    HOLMES_REQUIRE(c.samples >= 2, InvalidArgument, "samples must be at least 2");
    HOLMES_REQUIRE(c.grids.empty() || c.node_counts.empty(), InvalidArgument,
                   "give either grids or node_counts, not both");
    for (double h : c.grids) HOLMES_REQUIRE(h > 0.0, InvalidArgument, "grid spacings must be positive");
    for (std::size_t m : c.node_counts) HOLMES_REQUIRE(m >= 2, InvalidArgument, "node counts must be at least 2");
}

std::string to_text(const RunConfig& c) {
    std::ostringstream os;
    os << "benchmark = " << c.benchmark << '\n'
       << "domain = \"" << c.domain << "\"\n"
       << "n = " << c.n << '\n'
       << "p = " << format_double(c.p) << '\n'
       << "R_hat = " << (c.R_hat ? format_double(*c.R_hat) : std::string("\"\"")) << '\n'
       << "eps = " << format_double(c.eps) << '\n'
       << "grids = \"" << join(c.grids) << "\"\n"
       << "node_counts = \"" << join(c.node_counts) << "\"\n"
       << "perturbation = " << format_double(c.perturbation) << '\n'
       << "seed = " << c.seed << '\n'
       << "threads = " << c.threads << '\n'
       << "solver = " << c.solver << '\n'
       << "solver_tol = " << format_double(c.solver_tol) << '\n'
       << "iterative_tol = " << format_double(c.iterative_tol) << '\n'
       << "spacing = " << c.spacing << '\n'
       << "samples = " << c.samples << '\n'
       << "dump_matrix = " << (c.dump_matrix ? "true" : "false") << '\n';
    return os.str();
}

StudySettings study_settings(const RunConfig& c) {
    StudySettings s;
    s.n = c.n;
    s.p = c.p;
    s.R_hat = c.support();
    s.eps = c.eps;
    s.perturbation = c.perturbation;
    s.seed = c.seed;
    s.collocation.threads = c.threads;
    s.collocation.spacing = c.spacing == "per-node" ? SpacingMode::per_node : SpacingMode::global_mean;
    s.solver.method = c.solver == "direct"      ? SolverMethod::direct
                      : c.solver == "iterative" ? SolverMethod::iterative
                                                : SolverMethod::automatic;
    s.solver.direct_tolerance = c.solver_tol;
    s.solver.iterative_tolerance = c.iterative_tol;
    return s;
}

DomainSpec config_domain(const RunConfig& c) {
    if (c.domain.empty()) return make_problem(c.benchmark).domain;
    if (c.domain == "interval") return Interval{-1.0, 1.0};
    if (c.domain == "disk") return Disk{1.0};
    if (c.domain == "sphere") return Ball{1.0};
    if (c.domain == "quarter-plate") return QuarterPlateWithHole{4.0, 1.0};
    if (c.domain == "l-shape") return LShape{1.0};
    if (c.domain == "star") return NurbsRegion{std::make_shared<const NurbsCurve>(star_curve())};
    throw InvalidArgument("unknown domain '" + c.domain + "'");
}

std::vector<double> config_spacings(const RunConfig& c, const DomainSpec& domain) {
    if (!c.grids.empty()) return c.grids;
    HOLMES_REQUIRE(!c.node_counts.empty(), InvalidArgument, "config needs grids or node_counts");
    std::vector<double> out;
    for (std::size_t m : c.node_counts) out.push_back(target_h_for_count(domain, m));
    return out;
}

}  // namespace holmes::cli
