#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>

#include "owb/bootstrap.hpp"
#include "owb/simulator.hpp"
#include "owb/variance.hpp"

namespace owb::cli {

/// `key = value` lines; '#' starts a comment. Keys are unique.
struct KeyValueEntry {
    std::string value;
    std::size_t line = 0;
};
using KeyValueMap = std::map<std::string, KeyValueEntry>;

KeyValueMap parse_key_values(std::istream& in);
KeyValueMap parse_key_values(const std::filesystem::path& path);

struct RunConfig {
    PoolingConfig pooling{};
    BootstrapConfig bootstrap{};
    bool validate_min_data = true;
    /// Weight-regularity threshold delta on N * min w; unset means 1/N.
    std::optional<double> regularity_delta;
};

/// Keys: prior_strength_persona, prior_strength_cluster, variance_floor,
/// replicates, ci_level, seed, validate_min_data, regularity_delta.
/// Unknown keys are a ParseError.
void apply_run_config(const KeyValueMap& kv, RunConfig& cfg);

struct ScenarioConfig {
    SimulationParams params;
    RunConfig run;
    std::size_t n_sims = 200;
    std::size_t threads = 1;
    std::optional<double> regularity_threshold;   // default 1/N
};

/// Scenario keys: n_personas, n_petals, rounds (single value or comma list
/// cycled over personas), mu (list), sigma_alpha2, sigma_gamma2, sigma2,
/// n_clusters, missing_rate, petal_scale (list), seed, n_sims, threads,
/// regularity_threshold, plus every run-config key. Unset scenario keys take
/// SimulationParams::defaults.
ScenarioConfig parse_scenario(const KeyValueMap& kv);

}  // namespace owb::cli
