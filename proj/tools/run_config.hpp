#pragma once

#include "holmes/analysis.hpp"
#include "holmes/geometry.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace holmes::cli {

/// Configuration shared by every subcommand. Read from a flat `key = value`
/// file; unknown keys are rejected.
struct RunConfig {
    std::string benchmark = "helm1d-essential";
    /// Node-set domain override for `nodes` and `basis`: interval, disk, sphere,
    /// quarter-plate, l-shape, star. Empty means the benchmark's domain.
    std::string domain;
    int n = 2;
    double p = 2.0;
    std::optional<double> R_hat;  // defaults to n + 2
    double eps = 1e-11;
    std::vector<double> grids;             // target spacings
    std::vector<std::size_t> node_counts;  // alternative to grids
    double perturbation = 0.0;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string solver = "auto";  // auto, direct, iterative
    double solver_tol = 1e-12;
    double iterative_tol = 1e-10;
    std::string spacing = "global";  // global, per-node
    std::size_t samples = 201;       // basis: samples along the line (per axis in 2D)
    bool dump_matrix = false;

    double support() const { return R_hat ? *R_hat : n + 2.0; }
    bool operator==(const RunConfig&) const = default;
};

/// Throws InvalidArgument on unknown keys, malformed values or invalid combinations.
RunConfig parse_run_config(const std::map<std::string, std::string>& kv);
RunConfig parse_run_config_text(std::string_view text);
/// Checks ranges and the HOLMES parameter invariants.
void validate(const RunConfig& cfg);
/// Every key, one per line; parses back to an equal RunConfig.
std::string to_text(const RunConfig& cfg);

StudySettings study_settings(const RunConfig& cfg);
DomainSpec config_domain(const RunConfig& cfg);
/// Target spacings from `grids`, or from `node_counts` through the generator.
std::vector<double> config_spacings(const RunConfig& cfg, const DomainSpec& domain);

}  // namespace holmes::cli
