#include "owb/variance.hpp"

#include <algorithm>
#include <cmath>

#include "owb/errors.hpp"

namespace owb {

void PoolingConfig::validate() const {
    auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!positive(prior_strength_persona))
        throw Error(ErrorCode::invalid_argument, "prior_strength_persona must be > 0");
    if (!positive(prior_strength_cluster))
        throw Error(ErrorCode::invalid_argument, "prior_strength_cluster must be > 0");
    if (!positive(variance_floor))
        throw Error(ErrorCode::invalid_argument, "variance_floor must be > 0");
    if (fixed_persona_lambda && !(*fixed_persona_lambda >= 0.0 && *fixed_persona_lambda <= 1.0))
        throw Error(ErrorCode::invalid_argument, "fixed_persona_lambda must lie in [0, 1]");
}

namespace {

// Convex blend that returns an endpoint exactly when lambda is 0 or 1.
double blend(double own, double target, double lambda) {
    if (lambda == 0.0) return own;
    if (lambda == 1.0) return target;
    return (1.0 - lambda) * own + lambda * target;
}

}  // namespace

PooledVariances pool_variances(const PersonaSummary& summary, const ClusterMap& clusters,
                               const PoolingConfig& cfg) {
    cfg.validate();
    const std::size_t n = summary.n_personas;
    if (clusters.n_personas() != n)
        throw Error(ErrorCode::invalid_argument, "cluster map size does not match persona count");
    const std::size_t c_count = clusters.n_clusters();

    std::vector<long double> cluster_num(c_count, 0.0L);
    std::vector<double> cluster_df(c_count, 0.0);
    long double global_num = 0.0L;
    double global_df = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        if (!summary.raw_trace_var[p] || summary.df[p] == 0) continue;
        const double d = static_cast<double>(summary.df[p]);
        const auto c = clusters.cluster_of(p);
        cluster_num[c] += d * *summary.raw_trace_var[p];
        cluster_df[c] += d;
        global_num += d * *summary.raw_trace_var[p];
        global_df += d;
    }

    PooledVariances out;
    out.v_eff.assign(n, cfg.variance_floor);
    out.lambda_persona.assign(n, 1.0);
    out.v_cluster.assign(c_count, std::nullopt);
    out.v_cluster_shrunk.assign(c_count, cfg.variance_floor);
    out.lambda_cluster.assign(c_count, 1.0);

    if (global_df == 0.0) {
        out.degenerate = true;
        return out;
    }
    const double v_global = static_cast<double>(global_num / global_df);
    out.v_global = v_global;

    for (std::size_t c = 0; c < c_count; ++c) {
        if (cluster_df[c] > 0.0) {
            const double v_c = static_cast<double>(cluster_num[c] / cluster_df[c]);
            const double lambda = cfg.prior_strength_cluster / (cluster_df[c] + cfg.prior_strength_cluster);
            out.v_cluster[c] = v_c;
            out.lambda_cluster[c] = lambda;
            out.v_cluster_shrunk[c] = blend(v_c, v_global, lambda);
        } else {
            out.v_cluster_shrunk[c] = v_global;
        }
    }

    for (std::size_t p = 0; p < n; ++p) {
        const double target = out.v_cluster_shrunk[clusters.cluster_of(p)];
        double v;
        if (summary.raw_trace_var[p] && summary.df[p] > 0) {
            const double d = static_cast<double>(summary.df[p]);
            const double lambda = cfg.fixed_persona_lambda.value_or(
                cfg.prior_strength_persona / (d + cfg.prior_strength_persona));
            out.lambda_persona[p] = lambda;
            v = blend(*summary.raw_trace_var[p], target, lambda);
        } else {
            v = target;
        }
        out.v_eff[p] = std::max(v, cfg.variance_floor);
    }
    return out;
}

}  // namespace owb
