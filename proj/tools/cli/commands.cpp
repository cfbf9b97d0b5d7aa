#include "commands.hpp"

#include <exception>
#include <filesystem>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "owb/bootstrap.hpp"
#include "owb/diagnostics.hpp"
#include "owb/estimator.hpp"
#include "owb/imputer.hpp"
#include "owb/simulator.hpp"
#include "owb/variance.hpp"
#include "owb/weights.hpp"
#include "votes_io.hpp"

namespace owb::cli {

using json = nlohmann::ordered_json;

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::empty_petal:
        case ErrorCode::no_data_anywhere:
            return exit_data_violation;
        case ErrorCode::invariant_failure:
        case ErrorCode::non_positive_variance:
            return exit_invariant;
        case ErrorCode::invalid_argument:
        case ErrorCode::parse_error:
        case ErrorCode::duplicate_key:
        case ErrorCode::inconsistent_cluster:
            return exit_usage;
    }
    return exit_invariant;
}

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        err << "error[" << error_code_name(e.code()) << "]: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error[IO]: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error[INTERNAL]: " << e.what() << '\n';
        return exit_invariant;
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json optional_array(const std::vector<std::optional<double>>& xs) {
    json arr = json::array();
    for (const auto& x : xs) arr.push_back(x ? json(*x) : json(nullptr));
    return arr;
}

json audit_json(const AuditLog& audit) {
    const auto snap = audit.snapshot();
    json j;
    j["sampling_calls"] = snap.sampling_calls;
    j["explicit_probability_calls"] = snap.explicit_probability_calls;
    json scans = json::object();
    for (const auto& [name, count] : snap.nan_scan_results) scans[name] = count;
    j["nan_scan_results"] = scans;
    j["weight_regularity"] = snap.weight_regularity ? json(*snap.weight_regularity) : json(nullptr);
    return j;
}

// Lists every petal without a finite value; throws the matching error.
void require_minimal_data(const IngestedPanel& panel) {
    const auto counts = panel.tensor.petal_observation_counts();
    std::vector<std::string> empty;
    for (std::size_t j = 0; j < counts.size(); ++j)
        if (counts[j] == 0) empty.push_back(panel.ids.petals[j]);
    if (empty.empty()) return;
    std::string list;
    for (const auto& id : empty) list += (list.empty() ? "" : ", ") + id;
    if (panel.tensor.observed_count() == 0)
        throw Error(ErrorCode::no_data_anywhere, "panel contains no finite value; empty petals: " + list);
    throw Error(ErrorCode::empty_petal, "petals without finite observations: " + list);
}

struct Pipeline {
    PersonaSummary summary;
    PooledVariances pooled;
    WeightVector weights;
    WeightRegularityReport regularity;
};

Pipeline run_pipeline(const IngestedPanel& panel, const RunConfig& cfg, bool uniform, AuditLog& audit) {
    Pipeline pl;
    pl.summary = summarize(panel.tensor);
    pl.pooled = pool_variances(pl.summary, panel.clusters, cfg.pooling);
    pl.weights = uniform ? WeightVector::uniform(panel.tensor.n_personas())
                         : precision_weights(pl.pooled.v_eff, WeightKind::feasible);
    const double delta = cfg.regularity_delta.value_or(1.0 / static_cast<double>(panel.tensor.n_personas()));
    pl.regularity = check_weight_regularity(pl.weights, delta);
    audit.record_weight_regularity(pl.regularity.value);
    return pl;
}

json ids_json(const std::vector<std::string>& ids) { return json(ids); }

json estimate_json(const IngestedPanel& panel, const Pipeline& pl, const ArchetypeEstimate& est) {
    json j;
    j["method"] = std::string(estimate_method_name(est.method));
    j["n_personas"] = panel.tensor.n_personas();
    j["n_petals"] = panel.tensor.n_petals();
    j["petals"] = ids_json(panel.ids.petals);
    j["personas"] = ids_json(panel.ids.personas);
    j["mu_hat"] = est.mu_hat;
    j["weights"] = est.weights_used.w;
    j["weight_kind"] = std::string(weight_kind_name(est.weights_used.kind));
    j["lambda_persona"] = pl.pooled.lambda_persona;
    j["v_eff"] = pl.pooled.v_eff;
    j["raw_trace_var"] = optional_array(pl.summary.raw_trace_var);
    j["df"] = pl.summary.df;
    j["v_cluster"] = optional_array(pl.pooled.v_cluster);
    j["v_cluster_shrunk"] = pl.pooled.v_cluster_shrunk;
    j["lambda_cluster"] = pl.pooled.lambda_cluster;
    j["v_global"] = pl.pooled.v_global ? json(*pl.pooled.v_global) : json(nullptr);
    json contributors = json::array();
    for (const auto& s : est.per_petal_personas) contributors.push_back(s.size());
    j["contributors_per_petal"] = contributors;
    j["diagnostics"] = {
        {"degenerate_variance", pl.pooled.degenerate},
        {"weight_regularity",
         {{"n_min_weight", pl.regularity.value},
          {"threshold", pl.regularity.threshold},
          {"passed", pl.regularity.passed}}},
    };
    return j;
}

IngestedPanel load_checked(const std::filesystem::path& votes, const RunConfig& cfg) {
    auto panel = ingest(votes);
    if (cfg.validate_min_data) require_minimal_data(panel);
    return panel;
}

void finalize_audit(AuditLog& audit, json& j, bool verbose, std::ostream& err) {
    audit.require_nan_free();
    j["diagnostics"]["nan_scan"] = audit_json(audit)["nan_scan_results"];
    if (verbose) err << audit_json(audit).dump(2) << '\n';
}

SimulationParams params_with_seed(SimulationParams p, std::optional<std::uint64_t> seed) {
    if (seed) p.seed = *seed;
    return p;
}

json params_json(const SimulationParams& p) {
    return {
        {"n_personas", p.n_personas()},
        {"n_petals", p.n_petals()},
        {"mu", p.mu},
        {"sigma_alpha2", p.sigma_alpha2},
        {"sigma_gamma2", p.sigma_gamma2},
        {"sigma2", p.sigma2},
        {"n_per_persona", p.n_per_persona},
        {"n_clusters", p.clusters.n_clusters()},
        {"missing_rate", p.missing_rate},
        {"petal_scale", p.petal_scale},
        {"seed", p.seed},
    };
}

}  // namespace

RunConfig resolve_run_config(const CommonOptions& opts) {
    RunConfig cfg;
    if (opts.config) apply_run_config(parse_key_values(*opts.config), cfg);
    if (opts.seed) cfg.bootstrap.seed = *opts.seed;
    if (opts.replicates) cfg.bootstrap.replicates = *opts.replicates;
    if (opts.ci_level) cfg.bootstrap.ci_level = *opts.ci_level;
    if (opts.prior_strength_persona) cfg.pooling.prior_strength_persona = *opts.prior_strength_persona;
    if (opts.prior_strength_cluster) cfg.pooling.prior_strength_cluster = *opts.prior_strength_cluster;
    if (opts.variance_floor) cfg.pooling.variance_floor = *opts.variance_floor;
    if (opts.regularity_delta) cfg.regularity_delta = *opts.regularity_delta;
    if (opts.no_validate) cfg.validate_min_data = false;
    cfg.pooling.validate();
    cfg.bootstrap.validate();
    return cfg;
}

std::filesystem::path indexed_path(const std::filesystem::path& base, std::size_t k) {
    auto out = base.parent_path() / (base.stem().string() + "_m" + std::to_string(k) + base.extension().string());
    return out;
}

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto panel = ingest(args.votes);
        const auto counts = panel.tensor.petal_observation_counts();
        out << "petal_id,finite_count\n";
        for (std::size_t j = 0; j < counts.size(); ++j) out << panel.ids.petals[j] << ',' << counts[j] << '\n';
        require_minimal_data(panel);
        out << "ok: every petal has at least one finite observation\n";
        return int{exit_ok};
    });
}

int cmd_estimate(const EstimateArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (args.method != "owb" && args.method != "uniform")
            throw Error(ErrorCode::invalid_argument, "method must be 'owb' or 'uniform'");
        const RunConfig cfg = resolve_run_config(args.common);
        const auto panel = load_checked(args.votes, cfg);
        AuditLog audit;
        const auto pl = run_pipeline(panel, cfg, args.method == "uniform", audit);
        const auto est = estimate_archetype(pl.summary, pl.weights);
        audit.record_nan_scan("mu_hat", scan_nan(est.mu_hat));
        audit.record_nan_scan("weights", scan_nan(est.weights_used.w));
        audit.record_nan_scan("v_eff", scan_nan(pl.pooled.v_eff));
        json j = estimate_json(panel, pl, est);
        finalize_audit(audit, j, args.common.verbose, err);
        write_file_atomic(args.output, dump(j));
        out << "wrote " << args.output.string() << '\n';
        return int{exit_ok};
    });
}

int cmd_bootstrap_ci(const BootstrapCiArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = resolve_run_config(args.common);
        const auto panel = load_checked(args.votes, cfg);
        AuditLog audit;
        const auto pl = run_pipeline(panel, cfg, false, audit);
        auto est = estimate_archetype(pl.summary, pl.weights);
        const auto boot = weighted_bootstrap(pl.summary, pl.weights, cfg.bootstrap, &audit);
        est.ci = boot.ci;

        audit.record_nan_scan("mu_hat", scan_nan(est.mu_hat));
        audit.record_nan_scan("weights", scan_nan(est.weights_used.w));
        audit.record_nan_scan("replicates", scan_nan(boot.replicate_mu));
        audit.record_nan_scan("se", scan_nan(boot.se));

        json j = estimate_json(panel, pl, est);
        json ci = json::array();
        for (const auto& [lo, hi] : boot.ci) ci.push_back({lo, hi});
        j["ci"] = ci;
        j["se"] = boot.se;
        j["ci_level"] = cfg.bootstrap.ci_level;
        j["replicates"] = cfg.bootstrap.replicates;
        j["seed"] = cfg.bootstrap.seed;
        j["ci_method"] = "percentile";
        j["diagnostics"]["bootstrap_fallback_cells"] = boot.fallback_cells;
        finalize_audit(audit, j, args.common.verbose, err);

        if (args.replicates_csv) {
            std::ostringstream csv;
            csv << "replicate";
            for (const auto& id : panel.ids.petals) csv << ',' << id;
            csv << '\n';
            for (std::size_t b = 0; b < boot.replicates; ++b) {
                csv << b;
                for (double x : boot.replicate(b)) csv << ',' << format_double(x);
                csv << '\n';
            }
            write_file_atomic(*args.replicates_csv, csv.str());
        }
        write_file_atomic(args.output, dump(j));
        out << "wrote " << args.output.string() << '\n';
        return int{exit_ok};
    });
}

int cmd_impute(const ImputeArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (args.multiple < 1) throw Error(ErrorCode::invalid_argument, "--multiple must be >= 1");
        const RunConfig cfg = resolve_run_config(args.common);
        const auto panel = load_checked(args.votes, cfg);
        AuditLog audit;
        const auto pl = run_pipeline(panel, cfg, false, audit);

        for (std::size_t m = 0; m < args.multiple; ++m) {
            const std::uint64_t seed = cfg.bootstrap.seed + m;
            const auto rep = impute(panel.tensor, panel.clusters, pl.weights, seed, ImputeOptions{1, &audit});
            audit.require_nan_free();

            std::ostringstream csv;
            write_votes(csv, rep.completed, panel.clusters, panel.ids);

            json j;
            j["seed"] = rep.seed;
            j["filled_cells"] = rep.filled_cells;
            j["observed_cells"] = panel.tensor.observed_count();
            json hist;
            for (std::size_t k = 0; k < kDonorLayerCount; ++k)
                hist[std::string(donor_layer_name(static_cast<DonorLayer>(k)))] = rep.layer_histogram[k];
            j["layer_histogram"] = hist;
            j["weights"] = pl.weights.w;
            j["diagnostics"] = {
                {"weight_regularity", {{"n_min_weight", pl.regularity.value}, {"passed", pl.regularity.passed}}},
            };
            if (args.common.verbose) {
                json trace = json::array();
                for (const auto& t : rep.trace)
                    trace.push_back({{"persona", panel.ids.personas[t.cell.persona]},
                                     {"round", t.cell.round},
                                     {"petal", panel.ids.petals[t.cell.petal]},
                                     {"layer", std::string(donor_layer_name(t.layer))},
                                     {"pool_size", t.pool_size},
                                     {"value", t.value}});
                j["trace"] = trace;
            }
            j["diagnostics"]["nan_scan"] = audit_json(audit)["nan_scan_results"];

            const auto csv_path = args.multiple == 1 ? args.output : indexed_path(args.output, m);
            const auto report_path = args.multiple == 1 ? args.report : indexed_path(args.report, m);
            write_file_atomic(csv_path, csv.str());
            write_file_atomic(report_path, dump(j));
            out << "wrote " << csv_path.string() << " (" << rep.filled_cells << " cells filled)\n";
        }
        if (args.common.verbose) err << audit_json(audit).dump(2) << '\n';
        return int{exit_ok};
    });
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto sc = parse_scenario(parse_key_values(args.scenario));
        const auto params = params_with_seed(sc.params, args.seed);
        const auto panel = generate(params);
        if (scan_nan(panel.tensor) != 0)
            throw Error(ErrorCode::invariant_failure, "generated panel contains non-finite observations");

        const auto ids = synthetic_ids(params.n_personas(), params.n_petals(), params.clusters.n_clusters());
        std::ostringstream csv;
        write_votes(csv, panel.tensor, params.clusters, ids);
        write_file_atomic(args.output, csv.str());

        if (args.truth) {
            json j;
            j["params"] = params_json(params);
            j["alpha"] = panel.truth.alpha;
            j["gamma"] = panel.truth.gamma;
            j["true_v"] = panel.truth.true_v;
            json repaired = json::array();
            for (const auto& c : panel.truth.repaired_cells) repaired.push_back({c.persona, c.round, c.petal});
            j["repaired_cells"] = repaired;
            write_file_atomic(*args.truth, dump(j));
        }
        out << "wrote " << args.output.string() << '\n';
        return int{exit_ok};
    });
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto sc = parse_scenario(parse_key_values(args.scenario));
        const auto params = params_with_seed(sc.params, args.seed);
        const std::size_t n_sims = args.n_sims.value_or(sc.n_sims);
        const ExperimentOptions opts{sc.run.pooling, sc.threads};

        json j;
        j["experiment"] = args.experiment;
        j["params"] = params_json(params);
        j["n_sims"] = n_sims;
        std::ostringstream csv;
        std::vector<double> numbers;

        if (args.experiment == "mse" || args.experiment == "coverage") {
            const bool coverage = args.experiment == "coverage";
            const MonteCarloReport rep =
                coverage ? run_coverage_experiment(params, n_sims, sc.run.bootstrap.ci_level,
                                                   sc.run.bootstrap.replicates, opts)
                         : run_mse_experiment(params, n_sims, opts);
            if (coverage) {
                j["ci_level"] = rep.ci_level;
                j["replicates"] = sc.run.bootstrap.replicates;
                j["empirical_coverage"] = rep.empirical_coverage;
                j["coverage_applicable"] = rep.coverage_applicable;
                csv << "petal,empirical_coverage\n";
                for (std::size_t k = 0; k < rep.n_petals; ++k)
                    csv << 'q' << k << ',' << format_double(rep.empirical_coverage[k]) << '\n';
                numbers = rep.empirical_coverage;
            } else {
                j["mse_owb_ideal"] = rep.mse_owb_ideal;
                j["mse_owb_feasible"] = rep.mse_owb_feasible;
                j["mse_uniform"] = rep.mse_uniform;
                j["mse_owb_ideal_total"] = rep.mse_owb_ideal_total;
                j["mse_owb_feasible_total"] = rep.mse_owb_feasible_total;
                j["mse_uniform_total"] = rep.mse_uniform_total;
                j["analytic_gls_variance"] = rep.analytic_gls_variance;
                j["analytic_uniform_variance"] = rep.analytic_uniform_variance;
                j["analytic_variance_ratio"] = rep.analytic_variance_ratio;
                j["empirical_variance_ratio"] = rep.empirical_variance_ratio;
                csv << "petal,mse_owb_ideal,mse_owb_feasible,mse_uniform\n";
                for (std::size_t k = 0; k < rep.n_petals; ++k) {
                    csv << 'q' << k << ',' << format_double(rep.mse_owb_ideal[k]) << ','
                        << format_double(rep.mse_owb_feasible[k]) << ',' << format_double(rep.mse_uniform[k])
                        << '\n';
                    numbers.insert(numbers.end(),
                                   {rep.mse_owb_ideal[k], rep.mse_owb_feasible[k], rep.mse_uniform[k]});
                }
            }
        } else if (args.experiment == "shrinkage") {
            const auto rep = run_shrinkage_experiment(params, n_sims, opts);
            j["mse_pooled"] = rep.mse_pooled;
            j["mse_raw"] = rep.mse_raw;
            j["ratio"] = rep.ratio;
            j["persona_samples"] = rep.persona_samples;
            csv << "mse_pooled,mse_raw,ratio\n"
                << format_double(rep.mse_pooled) << ',' << format_double(rep.mse_raw) << ','
                << format_double(rep.ratio) << '\n';
            numbers = {rep.mse_pooled, rep.mse_raw, rep.ratio};
        } else if (args.experiment == "regularity") {
            const double threshold =
                sc.regularity_threshold.value_or(1.0 / static_cast<double>(params.n_personas()));
            const auto rep = run_weight_regularity_experiment(params, n_sims, threshold, opts);
            j["threshold"] = rep.threshold;
            j["fraction_above"] = rep.fraction_above;
            j["n_min_weight"] = rep.n_min_weight;
            csv << "sim,n_min_weight\n";
            for (std::size_t s = 0; s < rep.n_min_weight.size(); ++s)
                csv << s << ',' << format_double(rep.n_min_weight[s]) << '\n';
            numbers = rep.n_min_weight;
        } else {
            throw Error(ErrorCode::invalid_argument,
                        "experiment must be one of mse, coverage, shrinkage, regularity");
        }

        if (scan_nan(numbers) != 0)
            throw Error(ErrorCode::invariant_failure, "experiment report contains non-finite values");
        if (args.csv) write_file_atomic(*args.csv, csv.str());
        write_file_atomic(args.output, dump(j));
        out << "wrote " << args.output.string() << '\n';
        return int{exit_ok};
    });
}

}  // namespace owb::cli
