#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace owb {

class AuditLog;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-mode seed splitting: hashes the master seed together with an
/// index path (e.g. {replicate} or {persona, round, petal}). Identical inputs
/// always give the identical stream seed.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

/// Seeded random stream. Uniforms are built from the top 53 bits of the
/// engine output so the mapping does not depend on the standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform01() noexcept {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    double normal(double mean, double sd) { return mean + sd * std_normal_(engine_); }
    /// Uniform integer in [0, n). Used by the simulator only; weighted
    /// resampling goes through DiscreteSampler.
    std::size_t uniform_index(std::size_t n) noexcept {
        return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n;
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> std_normal_{0.0, 1.0};
};

/// Categorical sampler over an explicit probability vector. There is no
/// constructor without probabilities: every draw in the library goes through
/// a vector that was checked to be nonempty, finite, strictly positive and
/// summing to one within 1e-9. The object is immutable after that check.
class DiscreteSampler {
public:
    static constexpr double kSumTolerance = 1e-9;

    explicit DiscreteSampler(std::span<const double> probabilities, AuditLog* audit = nullptr);

    std::size_t size() const noexcept { return cdf_.size(); }
    std::size_t draw(Rng& rng) const;
    /// Fills `out` with out.size() independent draws.
    void draw_into(Rng& rng, std::span<std::size_t> out) const;

private:
    std::vector<double> cdf_;
    AuditLog* audit_;
};

/// Throws invariant_failure unless `probabilities` is a valid explicit
/// probability vector (see DiscreteSampler).
void require_probability_vector(std::span<const double> probabilities, double tolerance);

}  // namespace owb
