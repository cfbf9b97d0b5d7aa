#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "owb/core_model.hpp"
#include "owb/variance.hpp"

namespace owb {

/// Hierarchical normal panel
///
///   beta_prj = mu_j + sqrt(c_j) * (alpha_p + gamma_c(p) + eps_prj)
///   alpha_p ~ N(0, sigma_alpha2), gamma_c ~ N(0, sigma_gamma2), eps ~ N(0, sigma2)
///
/// so Var(mean_pj) = c_j * v_p with v_p = sigma_alpha2 + sigma_gamma2 + sigma2 / n_p.
/// With the default c_j = 1 this is the plain three-level model.
struct SimulationParams {
    std::vector<double> mu;
    double sigma_alpha2 = 0.25;
    double sigma_gamma2 = 0.1;
    double sigma2 = 1.0;
    std::vector<std::size_t> n_per_persona;
    ClusterMap clusters = ClusterMap::single(1);
    double missing_rate = 0.0;
    std::vector<double> petal_scale;   // empty = all ones
    std::uint64_t seed = 1;

    std::size_t n_personas() const noexcept { return n_per_persona.size(); }
    std::size_t n_petals() const noexcept { return mu.size(); }
    double petal_scale_at(std::size_t j) const { return petal_scale.empty() ? 1.0 : petal_scale[j]; }
    /// sigma_alpha2 + sigma_gamma2 + sigma2 / n_p for every persona.
    std::vector<double> true_variances() const;

    void validate() const;

    /// Desk-scale default scenario: mu evenly spaced in [-1, 1], rounds
    /// cycling through {5, 10, 20}, four round-robin clusters (fewer when
    /// N < 4) and 10% missingness.
    static SimulationParams defaults(std::size_t n_personas, std::size_t n_petals, std::uint64_t seed = 1);
};

struct GroundTruth {
    std::vector<double> alpha;       // length N
    std::vector<double> gamma;       // length C
    std::vector<double> true_v;      // length N
    /// Cells restored so every petal keeps one observation.
    std::vector<CellIndex> repaired_cells;
};

struct SimulatedPanel {
    VoteTensor tensor;
    GroundTruth truth;
};

/// Draws one panel. Cells go missing i.i.d. at missing_rate; a petal left
/// with no observation gets one uniformly chosen cell restored.
SimulatedPanel generate(const SimulationParams& params);

struct ExperimentOptions {
    PoolingConfig pooling{};
    std::size_t threads = 1;
};

struct MonteCarloReport {
    std::size_t n_sims = 0;
    std::size_t n_petals = 0;
    // Per-petal mean squared errors against the true archetype.
    std::vector<double> mse_owb_ideal;
    std::vector<double> mse_owb_feasible;
    std::vector<double> mse_uniform;
    double mse_owb_ideal_total = 0.0;
    double mse_owb_feasible_total = 0.0;
    double mse_uniform_total = 0.0;
    // 1 / sum(1/v) and (1/N^2) sum(v) for the configured true variances,
    // and their ratio (the closed-form ideal/uniform variance ratio).
    double analytic_gls_variance = 0.0;
    double analytic_uniform_variance = 0.0;
    double analytic_variance_ratio = 0.0;
    double empirical_variance_ratio = 0.0;   // mse_owb_ideal_total / mse_uniform_total
    // Coverage experiments only.
    double ci_level = 0.0;
    std::vector<double> empirical_coverage;
    bool coverage_applicable = true;
};

/// Ideal OWB, feasible OWB and uniform estimates over n_sims independent
/// panels with seeds derived from params.seed.
MonteCarloReport run_mse_experiment(const SimulationParams& params, std::size_t n_sims,
                                    const ExperimentOptions& options = {});

/// Fraction of simulations whose feasible-OWB percentile interval contains
/// mu_j, per petal. Coverage is flagged not applicable when N = 1.
MonteCarloReport run_coverage_experiment(const SimulationParams& params, std::size_t n_sims, double ci_level,
                                         std::size_t replicates, const ExperimentOptions& options = {});

struct ShrinkageReport {
    std::size_t n_sims = 0;
    double mse_pooled = 0.0;
    double mse_raw = 0.0;
    double ratio = 0.0;   // mse_pooled / mse_raw
    std::size_t persona_samples = 0;
};

/// Compares pooled and raw persona variance estimates against the quantity
/// the raw estimate targets: the mean over estimable petals of
/// c_j sigma2 / n_pj, which equals v_p when sigma_alpha2 = sigma_gamma2 = 0
/// and the panel is complete.
ShrinkageReport run_shrinkage_experiment(const SimulationParams& params, std::size_t n_sims,
                                         const ExperimentOptions& options = {});

struct RegularityExperimentReport {
    std::size_t n_sims = 0;
    double threshold = 0.0;
    std::vector<double> n_min_weight;   // N * min w per simulation
    double fraction_above = 0.0;        // share with N * min w > threshold
};

/// Feasible-pipeline weight regularity over n_sims panels.
RegularityExperimentReport run_weight_regularity_experiment(const SimulationParams& params, std::size_t n_sims,
                                                            double threshold, const ExperimentOptions& options = {});

/// Per-simulation panel seed.
std::uint64_t derive_simulation_seed(std::uint64_t master_seed, std::uint64_t sim_index) noexcept;

}  // namespace owb
