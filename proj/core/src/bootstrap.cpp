#include "owb/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "owb/diagnostics.hpp"
#include "owb/errors.hpp"
#include "owb/estimator.hpp"
#include "owb/parallel.hpp"
#include "owb/random.hpp"

namespace owb {

void BootstrapConfig::validate() const {
    if (replicates < 1) throw Error(ErrorCode::invalid_argument, "replicates must be >= 1");
    if (!(ci_level > 0.0 && ci_level < 1.0))
        throw Error(ErrorCode::invalid_argument, "ci_level must lie in (0, 1)");
}

std::uint64_t derive_replicate_seed(std::uint64_t master_seed, std::uint64_t replicate_index) noexcept {
    return derive_seed(master_seed, {0x626f6f74ULL, replicate_index});
}

double sorted_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw Error(ErrorCode::invalid_argument, "quantile of an empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0) return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BootstrapResult weighted_bootstrap(const PersonaSummary& summary, const WeightVector& wv,
                                   const BootstrapConfig& cfg, AuditLog* audit) {
    cfg.validate();
    const std::size_t n = summary.n_personas;
    const std::size_t np = summary.n_petals;
    const std::size_t b_count = cfg.replicates;

    const ArchetypeEstimate point = estimate_archetype(summary, wv);
    const DiscreteSampler sampler(wv.probabilities(), audit);

    // Dense copy of the persona means; the `has` flags carry definedness.
    std::vector<double> means(n * np, 0.0);
    std::vector<std::uint8_t> has(n * np, 0);
    for (std::size_t k = 0; k < n * np; ++k)
        if (summary.means[k]) {
            means[k] = *summary.means[k];
            has[k] = 1;
        }

    BootstrapResult res;
    res.replicates = b_count;
    res.n_petals = np;
    res.point = point.mu_hat;
    res.replicate_mu.assign(b_count * np, 0.0);
    std::vector<std::size_t> fallbacks(b_count, 0);

    parallel_for(b_count, cfg.threads, [&](std::size_t b) {
        Rng rng(derive_replicate_seed(cfg.seed, b));
        std::vector<std::size_t> drawn(n);
        sampler.draw_into(rng, drawn);
        std::vector<long double> sum(np, 0.0L);
        std::vector<std::size_t> cnt(np, 0);
        for (auto i : drawn) {
            const std::size_t row = i * np;
            for (std::size_t j = 0; j < np; ++j)
                if (has[row + j]) {
                    sum[j] += means[row + j];
                    ++cnt[j];
                }
        }
        double* out = &res.replicate_mu[b * np];
        for (std::size_t j = 0; j < np; ++j) {
            if (cnt[j] == 0) {
                out[j] = point.mu_hat[j];
                ++fallbacks[b];
            } else {
                out[j] = static_cast<double>(sum[j] / static_cast<long double>(cnt[j]));
            }
        }
    });
    for (auto f : fallbacks) res.fallback_cells += f;

    const double tail = (1.0 - cfg.ci_level) / 2.0;
    res.ci.resize(np);
    res.se.resize(np);
    std::vector<double> column(b_count);
    for (std::size_t j = 0; j < np; ++j) {
        long double s = 0.0L;
        for (std::size_t b = 0; b < b_count; ++b) {
            column[b] = res.replicate_mu[b * np + j];
            s += column[b];
        }
        const long double mean = s / static_cast<long double>(b_count);
        long double ss = 0.0L;
        for (double x : column) ss += (x - mean) * (x - mean);
        res.se[j] = b_count > 1 ? static_cast<double>(std::sqrt(ss / static_cast<long double>(b_count - 1))) : 0.0;
        std::sort(column.begin(), column.end());
        res.ci[j] = {sorted_quantile(column, tail), sorted_quantile(column, 1.0 - tail)};
    }
    return res;
}

}  // namespace owb
