#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cli/commands.hpp"

namespace {

void add_common(CLI::App* cmd, owb::cli::CommonOptions& o) {
    cmd->add_option("--config", o.config, "Run config file (key = value)");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--replicates", o.replicates, "Bootstrap replicates B")->check(CLI::PositiveNumber);
    cmd->add_option("--ci-level", o.ci_level, "Confidence level in (0,1)");
    cmd->add_option("--prior-strength-persona", o.prior_strength_persona, "Persona shrinkage pseudo-df m0");
    cmd->add_option("--prior-strength-cluster", o.prior_strength_cluster, "Cluster shrinkage pseudo-df m1");
    cmd->add_option("--variance-floor", o.variance_floor, "Floor on effective variances");
    cmd->add_option("--regularity-delta", o.regularity_delta, "Threshold on N*min(w); default 1/N");
    cmd->add_flag("--no-validate", o.no_validate, "Skip the up-front per-petal data check");
    cmd->add_flag("-v,--verbose", o.verbose, "Dump the audit log as JSON on stderr");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace owb::cli;
    CLI::App app{"owb: precision-weighted archetype estimation, weighted bootstrap and NaN-free imputation"};
    app.require_subcommand(1);

    ValidateArgs validate;
    auto* c_validate = app.add_subcommand("validate", "Check that every petal has a finite observation");
    c_validate->add_option("votes", validate.votes, "Votes CSV")->required();

    EstimateArgs estimate;
    auto* c_estimate = app.add_subcommand("estimate", "Feasible OWB archetype estimate");
    c_estimate->add_option("votes", estimate.votes, "Votes CSV")->required();
    c_estimate->add_option("-o,--output", estimate.output, "Archetype JSON")->required();
    c_estimate->add_option("--method", estimate.method, "owb | uniform")->check(CLI::IsMember({"owb", "uniform"}));
    add_common(c_estimate, estimate.common);

    BootstrapCiArgs boot;
    auto* c_boot = app.add_subcommand("bootstrap-ci", "Estimate plus weighted-bootstrap percentile intervals");
    c_boot->add_option("votes", boot.votes, "Votes CSV")->required();
    c_boot->add_option("-o,--output", boot.output, "Archetype JSON with CI fields")->required();
    c_boot->add_option("--replicates-csv", boot.replicates_csv, "Write the B x P replicate matrix");
    add_common(c_boot, boot.common);

    ImputeArgs imp;
    auto* c_impute = app.add_subcommand("impute", "Fill missing cells via the donor fallback chain");
    c_impute->add_option("votes", imp.votes, "Votes CSV")->required();
    c_impute->add_option("-o,--output", imp.output, "Completed votes CSV")->required();
    c_impute->add_option("--report", imp.report, "Imputation report JSON")->required();
    c_impute->add_option("--multiple", imp.multiple, "Number of completed datasets (seeds seed..seed+M-1)")
        ->check(CLI::PositiveNumber);
    add_common(c_impute, imp.common);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Generate a synthetic panel from a scenario file");
    c_sim->add_option("--scenario", sim.scenario, "Scenario file (key = value)")->required();
    c_sim->add_option("-o,--output", sim.output, "Votes CSV")->required();
    c_sim->add_option("--truth", sim.truth, "Ground-truth JSON");
    c_sim->add_option("--seed", sim.seed, "Override the scenario seed");

    BenchArgs bench;
    auto* c_bench = app.add_subcommand("bench", "Run a Monte Carlo experiment");
    c_bench->add_option("--scenario", bench.scenario, "Scenario file (key = value)")->required();
    c_bench->add_option("--experiment", bench.experiment, "mse | coverage | shrinkage | regularity")
        ->check(CLI::IsMember({"mse", "coverage", "shrinkage", "regularity"}));
    c_bench->add_option("-o,--output", bench.output, "Report JSON")->required();
    c_bench->add_option("--csv", bench.csv, "Report CSV");
    c_bench->add_option("--seed", bench.seed, "Override the scenario seed");
    c_bench->add_option("--n-sims", bench.n_sims, "Override the scenario simulation count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    if (c_validate->parsed()) return cmd_validate(validate, std::cout, std::cerr);
    if (c_estimate->parsed()) return cmd_estimate(estimate, std::cout, std::cerr);
    if (c_boot->parsed()) return cmd_bootstrap_ci(boot, std::cout, std::cerr);
    if (c_impute->parsed()) return cmd_impute(imp, std::cout, std::cerr);
    if (c_sim->parsed()) return cmd_simulate(sim, std::cout, std::cerr);
    if (c_bench->parsed()) return cmd_bench(bench, std::cout, std::cerr);
    return exit_usage;
}
