#include "owb/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "owb/diagnostics.hpp"
#include "owb/errors.hpp"

namespace owb {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = mix64(master ^ 0x6f77622d73656564ULL);
    for (auto index : path) h = mix64(h ^ mix64(index + 0x632be59bd9b4e019ULL));
    return h;
}

void require_probability_vector(std::span<const double> probabilities, double tolerance) {
    if (probabilities.empty())
        throw Error(ErrorCode::invariant_failure, "empty probability vector");
    long double total = 0.0L;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const double q = probabilities[i];
        if (!std::isfinite(q) || q <= 0.0)
            throw Error(ErrorCode::invariant_failure,
                        "probability " + std::to_string(i) + " is not finite and positive");
        total += q;
    }
    if (std::fabs(static_cast<double>(total) - 1.0) > tolerance)
        throw Error(ErrorCode::invariant_failure,
                    "probabilities sum to " + std::to_string(static_cast<double>(total)));
}

DiscreteSampler::DiscreteSampler(std::span<const double> probabilities, AuditLog* audit)
    : audit_(audit) {
    require_probability_vector(probabilities, kSumTolerance);
    cdf_.resize(probabilities.size());
    long double acc = 0.0L;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        acc += probabilities[i];
        cdf_[i] = static_cast<double>(acc);
    }
    cdf_.back() = 1.0;
}

std::size_t DiscreteSampler::draw(Rng& rng) const {
    if (audit_ != nullptr) audit_->record_sampling(1, true);
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::size_t>(it - cdf_.begin());
}

void DiscreteSampler::draw_into(Rng& rng, std::span<std::size_t> out) const {
    if (audit_ != nullptr) audit_->record_sampling(out.size(), true);
    for (auto& slot : out) {
        const double u = rng.uniform01();
        slot = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    }
}

}  // namespace owb
