#include "owb/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "owb/bootstrap.hpp"
#include "owb/errors.hpp"
#include "owb/estimator.hpp"
#include "owb/parallel.hpp"
#include "owb/random.hpp"
#include "owb/weights.hpp"

namespace owb {

std::vector<double> SimulationParams::true_variances() const {
    std::vector<double> v(n_per_persona.size());
    for (std::size_t p = 0; p < v.size(); ++p)
        v[p] = sigma_alpha2 + sigma_gamma2 + sigma2 / static_cast<double>(n_per_persona[p]);
    return v;
}

void SimulationParams::validate() const {
    if (mu.empty()) throw Error(ErrorCode::invalid_argument, "simulation needs at least one petal");
    if (n_per_persona.empty()) throw Error(ErrorCode::invalid_argument, "simulation needs at least one persona");
    for (auto n : n_per_persona)
        if (n == 0) throw Error(ErrorCode::invalid_argument, "every persona needs at least one round");
    if (clusters.n_personas() != n_per_persona.size())
        throw Error(ErrorCode::invalid_argument, "cluster map size does not match persona count");
    if (!(sigma_alpha2 >= 0.0) || !(sigma_gamma2 >= 0.0))
        throw Error(ErrorCode::invalid_argument, "variance components must be nonnegative");
    if (!(sigma2 > 0.0)) throw Error(ErrorCode::invalid_argument, "sigma2 must be positive");
    if (!(missing_rate >= 0.0 && missing_rate < 1.0))
        throw Error(ErrorCode::invalid_argument, "missing_rate must lie in [0, 1)");
    if (!petal_scale.empty()) {
        if (petal_scale.size() != mu.size())
            throw Error(ErrorCode::invalid_argument, "petal_scale length does not match petals");
        for (double c : petal_scale)
            if (!(c > 0.0) || !std::isfinite(c))
                throw Error(ErrorCode::invalid_argument, "petal_scale entries must be positive");
    }
    for (double m : mu)
        if (!std::isfinite(m)) throw Error(ErrorCode::invalid_argument, "mu must be finite");
}

SimulationParams SimulationParams::defaults(std::size_t n_personas, std::size_t n_petals, std::uint64_t seed) {
    if (n_personas == 0 || n_petals == 0)
        throw Error(ErrorCode::invalid_argument, "default scenario needs personas and petals");
    SimulationParams sp;
    sp.mu.resize(n_petals);
    for (std::size_t j = 0; j < n_petals; ++j)
        sp.mu[j] = n_petals == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(n_petals - 1);
    constexpr std::size_t kRounds[] = {5, 10, 20};
    sp.n_per_persona.resize(n_personas);
    for (std::size_t p = 0; p < n_personas; ++p) sp.n_per_persona[p] = kRounds[p % 3];
    sp.clusters = ClusterMap::round_robin(n_personas, std::min<std::size_t>(4, n_personas));
    sp.missing_rate = 0.1;
    sp.seed = seed;
    return sp;
}

std::uint64_t derive_simulation_seed(std::uint64_t master_seed, std::uint64_t sim_index) noexcept {
    return derive_seed(master_seed, {0x73696dULL, sim_index});
}

SimulatedPanel generate(const SimulationParams& params) {
    params.validate();
    const std::size_t n = params.n_personas();
    const std::size_t np = params.n_petals();
    Rng rng(params.seed);

    GroundTruth truth;
    truth.alpha.resize(n);
    truth.gamma.resize(params.clusters.n_clusters());
    const double sd_alpha = std::sqrt(params.sigma_alpha2);
    const double sd_gamma = std::sqrt(params.sigma_gamma2);
    const double sd_eps = std::sqrt(params.sigma2);
    for (auto& a : truth.alpha) a = rng.normal(0.0, sd_alpha);
    for (auto& g : truth.gamma) g = rng.normal(0.0, sd_gamma);
    truth.true_v = params.true_variances();

    std::vector<double> scale(np);
    for (std::size_t j = 0; j < np; ++j) scale[j] = std::sqrt(params.petal_scale_at(j));

    std::vector<VoteTensor::Rounds> full(n);
    std::vector<VoteTensor::Rounds> shown(n);
    std::vector<std::size_t> observed_per_petal(np, 0);
    for (std::size_t p = 0; p < n; ++p) {
        const double offset = truth.alpha[p] + truth.gamma[params.clusters.cluster_of(p)];
        full[p].assign(params.n_per_persona[p], std::vector<double>(np));
        shown[p] = full[p];
        for (std::size_t r = 0; r < params.n_per_persona[p]; ++r)
            for (std::size_t j = 0; j < np; ++j) {
                const double v = params.mu[j] + scale[j] * (offset + rng.normal(0.0, sd_eps));
                full[p][r][j] = v;
                if (params.missing_rate > 0.0 && rng.uniform01() < params.missing_rate) {
                    shown[p][r][j] = std::numeric_limits<double>::quiet_NaN();
                } else {
                    shown[p][r][j] = v;
                    ++observed_per_petal[j];
                }
            }
    }

    std::size_t total_rounds = 0;
    for (auto k : params.n_per_persona) total_rounds += k;
    for (std::size_t j = 0; j < np; ++j) {
        if (observed_per_petal[j] > 0) continue;
        std::size_t pick = rng.uniform_index(total_rounds);
        std::size_t p = 0;
        while (pick >= params.n_per_persona[p]) pick -= params.n_per_persona[p++];
        shown[p][pick][j] = full[p][pick][j];
        truth.repaired_cells.push_back({p, pick, j});
    }

    return SimulatedPanel{VoteTensor(np, shown), std::move(truth)};
}

namespace {

SimulationParams with_seed(const SimulationParams& params, std::uint64_t seed) {
    SimulationParams sp = params;
    sp.seed = seed;
    return sp;
}

WeightVector feasible_weights(const PersonaSummary& summary, const ClusterMap& clusters,
                              const PoolingConfig& pooling) {
    const PooledVariances pooled = pool_variances(summary, clusters, pooling);
    return precision_weights(pooled.v_eff, WeightKind::feasible);
}

double mean_of(const std::vector<double>& xs) {
    long double s = 0.0L;
    for (double x : xs) s += x;
    return static_cast<double>(s / static_cast<long double>(xs.size()));
}

}  // namespace

MonteCarloReport run_mse_experiment(const SimulationParams& params, std::size_t n_sims,
                                    const ExperimentOptions& options) {
    params.validate();
    if (n_sims == 0) throw Error(ErrorCode::invalid_argument, "n_sims must be >= 1");
    const std::size_t np = params.n_petals();
    const auto true_v = params.true_variances();
    const WeightVector ideal = precision_weights(true_v, WeightKind::ideal);

    // Squared errors per simulation: [ideal, feasible, uniform] x P.
    std::vector<double> sq(n_sims * 3 * np, 0.0);
    parallel_for(n_sims, options.threads, [&](std::size_t s) {
        const auto panel = generate(with_seed(params, derive_simulation_seed(params.seed, s)));
        const auto summary = summarize(panel.tensor);
        const auto est_ideal = estimate_archetype(summary, ideal);
        const auto est_feasible =
            estimate_archetype(summary, feasible_weights(summary, params.clusters, options.pooling));
        const auto est_uniform = estimate_uniform(summary);
        double* row = &sq[s * 3 * np];
        for (std::size_t j = 0; j < np; ++j) {
            const double mu = params.mu[j];
            row[j] = (est_ideal.mu_hat[j] - mu) * (est_ideal.mu_hat[j] - mu);
            row[np + j] = (est_feasible.mu_hat[j] - mu) * (est_feasible.mu_hat[j] - mu);
            row[2 * np + j] = (est_uniform.mu_hat[j] - mu) * (est_uniform.mu_hat[j] - mu);
        }
    });

    MonteCarloReport rep;
    rep.n_sims = n_sims;
    rep.n_petals = np;
    std::vector<long double> acc(3 * np, 0.0L);
    for (std::size_t s = 0; s < n_sims; ++s)
        for (std::size_t k = 0; k < 3 * np; ++k) acc[k] += sq[s * 3 * np + k];
    rep.mse_owb_ideal.resize(np);
    rep.mse_owb_feasible.resize(np);
    rep.mse_uniform.resize(np);
    const auto denom = static_cast<long double>(n_sims);
    for (std::size_t j = 0; j < np; ++j) {
        rep.mse_owb_ideal[j] = static_cast<double>(acc[j] / denom);
        rep.mse_owb_feasible[j] = static_cast<double>(acc[np + j] / denom);
        rep.mse_uniform[j] = static_cast<double>(acc[2 * np + j] / denom);
    }
    rep.mse_owb_ideal_total = mean_of(rep.mse_owb_ideal);
    rep.mse_owb_feasible_total = mean_of(rep.mse_owb_feasible);
    rep.mse_uniform_total = mean_of(rep.mse_uniform);

    long double inv_sum = 0.0L, v_sum = 0.0L;
    for (double v : true_v) {
        inv_sum += 1.0L / v;
        v_sum += v;
    }
    const auto n = static_cast<long double>(true_v.size());
    rep.analytic_gls_variance = static_cast<double>(1.0L / inv_sum);
    rep.analytic_uniform_variance = static_cast<double>(v_sum / (n * n));
    rep.analytic_variance_ratio = rep.analytic_gls_variance / rep.analytic_uniform_variance;
    rep.empirical_variance_ratio =
        rep.mse_uniform_total > 0.0 ? rep.mse_owb_ideal_total / rep.mse_uniform_total : 1.0;
    return rep;
}

MonteCarloReport run_coverage_experiment(const SimulationParams& params, std::size_t n_sims, double ci_level,
                                         std::size_t replicates, const ExperimentOptions& options) {
    params.validate();
    if (n_sims == 0) throw Error(ErrorCode::invalid_argument, "n_sims must be >= 1");
    const std::size_t np = params.n_petals();

    std::vector<std::uint8_t> covered(n_sims * np, 0);
    parallel_for(n_sims, options.threads, [&](std::size_t s) {
        const std::uint64_t sim_seed = derive_simulation_seed(params.seed, s);
        const auto panel = generate(with_seed(params, sim_seed));
        const auto summary = summarize(panel.tensor);
        BootstrapConfig bc;
        bc.replicates = replicates;
        bc.ci_level = ci_level;
        bc.seed = derive_seed(sim_seed, {0x6369ULL});
        const auto boot =
            weighted_bootstrap(summary, feasible_weights(summary, params.clusters, options.pooling), bc);
        for (std::size_t j = 0; j < np; ++j)
            covered[s * np + j] = (boot.ci[j].first <= params.mu[j] && params.mu[j] <= boot.ci[j].second) ? 1 : 0;
    });

    MonteCarloReport rep;
    rep.n_sims = n_sims;
    rep.n_petals = np;
    rep.ci_level = ci_level;
    rep.coverage_applicable = params.n_personas() > 1;
    rep.empirical_coverage.assign(np, 0.0);
    for (std::size_t j = 0; j < np; ++j) {
        std::size_t hits = 0;
        for (std::size_t s = 0; s < n_sims; ++s) hits += covered[s * np + j];
        rep.empirical_coverage[j] = static_cast<double>(hits) / static_cast<double>(n_sims);
    }
    return rep;
}

ShrinkageReport run_shrinkage_experiment(const SimulationParams& params, std::size_t n_sims,
                                         const ExperimentOptions& options) {
    params.validate();
    if (n_sims == 0) throw Error(ErrorCode::invalid_argument, "n_sims must be >= 1");
    const std::size_t n = params.n_personas();
    const std::size_t np = params.n_petals();

    struct SimErrors {
        long double pooled = 0.0L, raw = 0.0L;
        std::size_t count = 0;
    };
    std::vector<SimErrors> per_sim(n_sims);
    parallel_for(n_sims, options.threads, [&](std::size_t s) {
        const auto panel = generate(with_seed(params, derive_simulation_seed(params.seed, s)));
        const auto summary = summarize(panel.tensor);
        const auto pooled = pool_variances(summary, params.clusters, options.pooling);
        auto& e = per_sim[s];
        for (std::size_t p = 0; p < n; ++p) {
            if (!summary.raw_trace_var[p]) continue;
            long double target = 0.0L;
            std::size_t estimable = 0;
            for (std::size_t j = 0; j < np; ++j) {
                const auto k = summary.count(p, j);
                if (k < 2) continue;
                target += params.petal_scale_at(j) * params.sigma2 / static_cast<double>(k);
                ++estimable;
            }
            target /= static_cast<long double>(estimable);
            const long double d_raw = *summary.raw_trace_var[p] - target;
            const long double d_pool = pooled.v_eff[p] - target;
            e.raw += d_raw * d_raw;
            e.pooled += d_pool * d_pool;
            ++e.count;
        }
    });

    ShrinkageReport rep;
    rep.n_sims = n_sims;
    long double pooled = 0.0L, raw = 0.0L;
    for (const auto& e : per_sim) {
        pooled += e.pooled;
        raw += e.raw;
        rep.persona_samples += e.count;
    }
    if (rep.persona_samples == 0)
        throw Error(ErrorCode::invalid_argument, "no persona had an estimable variance");
    rep.mse_pooled = static_cast<double>(pooled / static_cast<long double>(rep.persona_samples));
    rep.mse_raw = static_cast<double>(raw / static_cast<long double>(rep.persona_samples));
    rep.ratio = static_cast<double>(pooled / raw);
    return rep;
}

RegularityExperimentReport run_weight_regularity_experiment(const SimulationParams& params, std::size_t n_sims,
                                                            double threshold, const ExperimentOptions& options) {
    params.validate();
    if (n_sims == 0) throw Error(ErrorCode::invalid_argument, "n_sims must be >= 1");
    RegularityExperimentReport rep;
    rep.n_sims = n_sims;
    rep.threshold = threshold;
    rep.n_min_weight.resize(n_sims);
    parallel_for(n_sims, options.threads, [&](std::size_t s) {
        const auto panel = generate(with_seed(params, derive_simulation_seed(params.seed, s)));
        const auto summary = summarize(panel.tensor);
        rep.n_min_weight[s] = feasible_weights(summary, params.clusters, options.pooling).min_weight_ratio;
    });
    const auto above = std::count_if(rep.n_min_weight.begin(), rep.n_min_weight.end(),
                                     [&](double x) { return x > threshold; });
    rep.fraction_above = static_cast<double>(above) / static_cast<double>(n_sims);
    return rep;
}

}  // namespace owb
