#include "owb/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "owb/errors.hpp"

namespace owb {

std::string_view estimate_method_name(EstimateMethod method) noexcept {
    switch (method) {
        case EstimateMethod::owb_feasible: return "owb_feasible";
        case EstimateMethod::owb_ideal: return "owb_ideal";
        case EstimateMethod::uniform: return "uniform";
    }
    return "unknown";
}

namespace {

EstimateMethod method_for(WeightKind kind) {
    switch (kind) {
        case WeightKind::ideal: return EstimateMethod::owb_ideal;
        case WeightKind::uniform: return EstimateMethod::uniform;
        case WeightKind::feasible: break;
    }
    return EstimateMethod::owb_feasible;
}

}  // namespace

ArchetypeEstimate estimate_archetype(const PersonaSummary& summary, const WeightVector& wv) {
    return estimate_archetype(summary, wv, method_for(wv.kind));
}

ArchetypeEstimate estimate_archetype(const PersonaSummary& summary, const WeightVector& wv,
                                     EstimateMethod method) {
    const std::size_t n = summary.n_personas;
    const std::size_t np = summary.n_petals;
    if (wv.size() != n) throw Error(ErrorCode::invalid_argument, "weight vector length does not match personas");

    ArchetypeEstimate est;
    est.method = method;
    est.weights_used = wv;
    est.mu_hat.assign(np, 0.0);
    est.per_petal_personas.resize(np);

    for (std::size_t j = 0; j < np; ++j) {
        auto& contributors = est.per_petal_personas[j];
        long double num = 0.0L;
        long double den = 0.0L;
        double lo = 0.0, hi = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            const auto m = summary.mean(p, j);
            if (!m) continue;
            if (contributors.empty()) lo = hi = *m;
            lo = std::min(lo, *m);
            hi = std::max(hi, *m);
            contributors.push_back(p);
            num += static_cast<long double>(wv.w[p]) * *m;
            den += wv.w[p];
        }
        if (contributors.empty()) throw EmptyPetal(j);
        // Convex combination; clamp absorbs last-ulp rounding at the hull edge.
        est.mu_hat[j] = std::clamp(static_cast<double>(num / den), lo, hi);
    }
    return est;
}

ArchetypeEstimate estimate_uniform(const PersonaSummary& summary) {
    return estimate_archetype(summary, WeightVector::uniform(summary.n_personas), EstimateMethod::uniform);
}

double posterior_mean_oracle(std::span<const double> persona_means, std::span<const double> variances,
                             std::optional<double> prior_variance) {
    if (persona_means.size() != variances.size() || persona_means.empty())
        throw Error(ErrorCode::invalid_argument, "means and variances must be nonempty and equal length");
    long double precision = 0.0L;
    long double weighted = 0.0L;
    for (std::size_t p = 0; p < variances.size(); ++p) {
        if (!std::isfinite(variances[p]) || variances[p] <= 0.0)
            throw Error(ErrorCode::non_positive_variance, "posterior oracle needs positive variances");
        precision += 1.0L / variances[p];
        weighted += static_cast<long double>(persona_means[p]) / variances[p];
    }
    if (prior_variance) {
        if (!(*prior_variance > 0.0))
            throw Error(ErrorCode::non_positive_variance, "prior variance must be positive");
        // Prior mean is zero, so it only adds precision.
        if (std::isfinite(*prior_variance)) precision += 1.0L / *prior_variance;
    }
    return static_cast<double>(weighted / precision);
}

}  // namespace owb
