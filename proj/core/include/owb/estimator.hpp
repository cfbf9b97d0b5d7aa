#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "owb/core_model.hpp"
#include "owb/weights.hpp"

namespace owb {

enum class EstimateMethod { owb_feasible, owb_ideal, uniform };

std::string_view estimate_method_name(EstimateMethod method) noexcept;

struct ArchetypeEstimate {
    std::vector<double> mu_hat;                          // length P
    WeightVector weights_used;
    std::vector<std::vector<std::size_t>> per_petal_personas;  // contributors S_j
    std::optional<std::vector<std::pair<double, double>>> ci;
    EstimateMethod method = EstimateMethod::owb_feasible;
};

/// mu_j = sum_{p in S_j} w_p beta_pj / sum_{q in S_j} w_q, where S_j are the
/// personas with at least one observation on petal j.
/// Throws EmptyPetal(j) if S_j is empty. The method tag defaults from the
/// weight kind.
ArchetypeEstimate estimate_archetype(const PersonaSummary& summary, const WeightVector& wv);
ArchetypeEstimate estimate_archetype(const PersonaSummary& summary, const WeightVector& wv,
                                     EstimateMethod method);

/// Equal-weight baseline, renormalized over contributors per petal.
ArchetypeEstimate estimate_uniform(const PersonaSummary& summary);

/// Conjugate-normal posterior mean of a petal mean given persona means with
/// known variances and a N(0, prior_variance) prior. `std::nullopt` is the
/// flat prior, which gives the inverse-variance weighted mean.
double posterior_mean_oracle(std::span<const double> persona_means, std::span<const double> variances,
                             std::optional<double> prior_variance);

}  // namespace owb
