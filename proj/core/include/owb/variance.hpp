#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "owb/core_model.hpp"

namespace owb {

/// Pseudo-degrees-of-freedom for the persona -> cluster and cluster -> global
/// blends, plus the floor applied to every effective variance.
struct PoolingConfig {
    double prior_strength_persona = 5.0;   // m0
    double prior_strength_cluster = 5.0;   // m1
    double variance_floor = 1e-12;
    /// When set, every persona with a defined raw variance uses this lambda
    /// instead of m0 / (d_p + m0). Personas without one keep lambda = 1.
    /// Used by the shrinkage experiments.
    std::optional<double> fixed_persona_lambda;

    void validate() const;
};

struct PooledVariances {
    std::vector<double> v_eff;            // length N, >= variance_floor
    std::vector<double> lambda_persona;   // length N, in [0, 1]
    std::vector<std::optional<double>> v_cluster;  // raw df-weighted cluster pool
    std::vector<double> v_cluster_shrunk;          // cluster pool blended toward global
    std::vector<double> lambda_cluster;            // length C, in [0, 1]
    std::optional<double> v_global;
    /// True when no persona had d_p >= 1; every v_eff is then the floor.
    bool degenerate = false;
};

/// Blends each persona's raw trace variance toward its cluster pool, which
/// is itself blended toward the global pool:
///
///   v_shrunk,c = (1 - l_c) v_c + l_c v_g,      l_c = m1 / (D_c + m1)
///   v_eff,p    = (1 - l_p) v_p + l_p v_shrunk,c(p),  l_p = m0 / (d_p + m0)
///
/// Pools are df-weighted means of the defined raw variances. A persona or
/// cluster without degrees of freedom takes lambda = 1.
PooledVariances pool_variances(const PersonaSummary& summary, const ClusterMap& clusters,
                               const PoolingConfig& cfg);

}  // namespace owb
