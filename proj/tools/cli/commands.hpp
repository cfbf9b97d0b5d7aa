#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "config.hpp"
#include "owb/errors.hpp"

namespace owb::cli {

/// Process exit codes.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,           // bad flags, unreadable or malformed input files
    exit_data_violation = 2,  // a petal (or the whole panel) without finite data
    exit_invariant = 3,       // internal invariant failure, e.g. NaN in an output
};

int exit_code_for(ErrorCode code) noexcept;

/// Settings shared by the data commands; unset overrides keep the config
/// file (or built-in default) value.
struct CommonOptions {
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicates;
    std::optional<double> ci_level;
    std::optional<double> prior_strength_persona;
    std::optional<double> prior_strength_cluster;
    std::optional<double> variance_floor;
    std::optional<double> regularity_delta;
    bool no_validate = false;
    bool verbose = false;
};

RunConfig resolve_run_config(const CommonOptions& opts);

struct ValidateArgs {
    std::filesystem::path votes;
};

struct EstimateArgs {
    std::filesystem::path votes;
    std::filesystem::path output;
    std::string method = "owb";   // owb | uniform
    CommonOptions common;
};

struct BootstrapCiArgs {
    std::filesystem::path votes;
    std::filesystem::path output;
    std::optional<std::filesystem::path> replicates_csv;
    CommonOptions common;
};

struct ImputeArgs {
    std::filesystem::path votes;
    std::filesystem::path output;
    std::filesystem::path report;
    std::size_t multiple = 1;
    CommonOptions common;
};

struct SimulateArgs {
    std::filesystem::path scenario;
    std::filesystem::path output;
    std::optional<std::filesystem::path> truth;
    std::optional<std::uint64_t> seed;
};

struct BenchArgs {
    std::filesystem::path scenario;
    std::string experiment = "mse";   // mse | coverage | shrinkage | regularity
    std::filesystem::path output;
    std::optional<std::filesystem::path> csv;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_sims;
};

// Every command returns its exit code and reports failures on `err` as
// "error[CODE]: message" lines.
int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err);
int cmd_estimate(const EstimateArgs& args, std::ostream& out, std::ostream& err);
int cmd_bootstrap_ci(const BootstrapCiArgs& args, std::ostream& out, std::ostream& err);
int cmd_impute(const ImputeArgs& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);

/// Path with "_m<k>" inserted before the extension (multiple imputation).
std::filesystem::path indexed_path(const std::filesystem::path& base, std::size_t k);

}  // namespace owb::cli
