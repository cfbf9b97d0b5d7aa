#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "owb/core_model.hpp"
#include "owb/weights.hpp"

namespace owb {

class AuditLog;

struct BootstrapConfig {
    std::size_t replicates = 2000;
    double ci_level = 0.90;
    std::uint64_t seed = 0;
    /// Worker threads for replicates; 0 = hardware concurrency. Output is
    /// identical for every thread count.
    std::size_t threads = 1;

    void validate() const;
};

struct BootstrapResult {
    std::size_t replicates = 0;
    std::size_t n_petals = 0;
    std::vector<double> replicate_mu;   // B x P, row-major
    std::vector<double> point;          // weighted point estimate per petal
    std::vector<std::pair<double, double>> ci;
    std::vector<double> se;
    /// Replicate-petal cells where no drawn persona observed the petal and
    /// the point estimate was used instead.
    std::size_t fallback_cells = 0;

    std::span<const double> replicate(std::size_t b) const {
        return std::span<const double>(replicate_mu).subspan(b * n_petals, n_petals);
    }
    double at(std::size_t b, std::size_t j) const { return replicate_mu[b * n_petals + j]; }

    friend bool operator==(const BootstrapResult&, const BootstrapResult&) = default;
};

/// Stream seed for replicate b.
std::uint64_t derive_replicate_seed(std::uint64_t master_seed, std::uint64_t replicate_index) noexcept;

/// Weighted bootstrap over personas. Each replicate draws N persona indices
/// i.i.d. with probabilities w and takes, per petal, the plain mean of the
/// drawn personas' petal means over those that observe the petal. Since the
/// draw already carries the weights, the replicate expectation is the
/// weighted point estimate. Percentile intervals at (1 -+ ci_level) / 2.
///
/// Throws EmptyPetal(j) when petal j has no contributor.
BootstrapResult weighted_bootstrap(const PersonaSummary& summary, const WeightVector& wv,
                                   const BootstrapConfig& cfg, AuditLog* audit = nullptr);

/// Linear-interpolation quantile of an ascending-sorted sample, q in [0, 1].
double sorted_quantile(std::span<const double> sorted, double q);

}  // namespace owb
