#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace owb {

enum class WeightKind { ideal, feasible, uniform };

std::string_view weight_kind_name(WeightKind kind) noexcept;

/// Normalized precision weights. Always materialized: even equal weights
/// are stored as explicit numbers.
struct WeightVector {
    std::vector<double> w;
    WeightKind kind = WeightKind::feasible;
    double min_weight_ratio = 0.0;   // N * min_p w_p

    std::size_t size() const noexcept { return w.size(); }
    std::span<const double> probabilities() const noexcept { return w; }

    /// Explicit equal-weight vector of length n.
    static WeightVector uniform(std::size_t n);
};

/// w_p = (1 / v_p) / sum_q (1 / v_q). Throws NonPositiveVariance on any
/// variance that is not finite and strictly positive.
WeightVector precision_weights(std::span<const double> variances, WeightKind kind);

struct WeightRegularityReport {
    double value = 0.0;       // N * min_p w_p
    double threshold = 0.0;
    bool passed = false;
};

/// Advisory check of N * min_p w_p >= delta, delta in (0, 1].
WeightRegularityReport check_weight_regularity(const WeightVector& wv, double delta);

/// sum_p w_p^2 v_p: variance of sum_p w_p x_p for independent x_p with
/// variances v_p (up to a common per-petal scale).
double weighted_variance_objective(std::span<const double> w, std::span<const double> v);

}  // namespace owb
