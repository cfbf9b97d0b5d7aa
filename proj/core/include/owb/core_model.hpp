#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace owb {

struct CellIndex {
    std::size_t persona = 0;
    std::size_t round = 0;
    std::size_t petal = 0;

    friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Ragged persona x round x petal panel of votes.
///
/// Every persona owns n_p rounds of exactly P petal values. A cell is
/// observed iff its value is finite; missing cells hold a quiet NaN and are
/// never read as data. Non-finite input values are converted to missing on
/// construction, so mask and finiteness always agree.
class VoteTensor {
public:
    using Rounds = std::vector<std::vector<double>>;

    /// `personas[p][r]` is the length-P vote vector of persona p in round r.
    /// NaN or infinite entries become missing cells.
    VoteTensor(std::size_t n_petals, const std::vector<Rounds>& personas);

    /// Builds from values plus an explicit mask (true = observed). A masked
    /// cell with a non-finite value is rejected.
    VoteTensor(std::size_t n_petals, const std::vector<Rounds>& personas,
               const std::vector<std::vector<std::vector<bool>>>& mask);

    std::size_t n_personas() const noexcept { return rounds_.size(); }
    std::size_t n_petals() const noexcept { return n_petals_; }
    std::size_t n_rounds(std::size_t persona) const { return rounds_.at(persona); }
    std::vector<std::size_t> rounds_per_persona() const { return rounds_; }

    bool observed(std::size_t p, std::size_t r, std::size_t j) const {
        return mask_[offset(p, r, j)] != 0;
    }
    /// Raw stored value; NaN for missing cells.
    double value(std::size_t p, std::size_t r, std::size_t j) const {
        return values_[offset(p, r, j)];
    }
    std::optional<double> get(std::size_t p, std::size_t r, std::size_t j) const {
        const auto k = offset(p, r, j);
        if (mask_[k] == 0) return std::nullopt;
        return values_[k];
    }

    std::size_t observed_count() const noexcept;
    std::size_t missing_count() const noexcept { return values_.size() - observed_count(); }
    std::size_t cell_count() const noexcept { return values_.size(); }
    bool fully_observed() const noexcept { return missing_count() == 0; }

    /// Number of finite observations per petal, across all personas and rounds.
    std::vector<std::size_t> petal_observation_counts() const;

    /// Row-major flat storage, persona-major then round then petal.
    std::span<const double> flat_values() const noexcept { return values_; }
    std::span<const std::uint8_t> flat_mask() const noexcept { return mask_; }

    /// Returns a copy with the given cells overwritten by finite values.
    struct CellValue {
        std::size_t persona, round, petal;
        double value;
    };
    VoteTensor with_filled(std::span<const CellValue> cells) const;

    friend bool operator==(const VoteTensor& a, const VoteTensor& b);

private:
    VoteTensor() = default;
    std::size_t offset(std::size_t p, std::size_t r, std::size_t j) const {
        return (round_offset_[p] + r) * n_petals_ + j;
    }
    void init_shape(std::size_t n_petals, const std::vector<Rounds>& personas);

    std::size_t n_petals_ = 0;
    std::vector<std::size_t> rounds_;
    std::vector<std::size_t> round_offset_;
    std::vector<double> values_;
    std::vector<std::uint8_t> mask_;
};

/// Total map persona -> cluster with contiguous cluster ids 0..C-1.
class ClusterMap {
public:
    explicit ClusterMap(std::vector<std::size_t> assignment);

    /// Every persona in cluster 0.
    static ClusterMap single(std::size_t n_personas);
    /// Persona p in cluster p % n_clusters.
    static ClusterMap round_robin(std::size_t n_personas, std::size_t n_clusters);

    std::size_t n_personas() const noexcept { return assignment_.size(); }
    std::size_t n_clusters() const noexcept { return n_clusters_; }
    std::size_t cluster_of(std::size_t persona) const { return assignment_.at(persona); }
    const std::vector<std::size_t>& assignment() const noexcept { return assignment_; }
    std::vector<std::size_t> members(std::size_t cluster) const;

private:
    std::vector<std::size_t> assignment_;
    std::size_t n_clusters_ = 0;
};

/// Per-persona summaries: petal means over observed rounds, counts and the
/// trace-variance proxy of the persona mean vector.
struct PersonaSummary {
    std::size_t n_personas = 0;
    std::size_t n_petals = 0;
    std::vector<std::optional<double>> means;   // N x P, row-major
    std::vector<std::size_t> counts;            // N x P, row-major
    std::vector<std::optional<double>> raw_trace_var;  // length N
    std::vector<std::size_t> df;                // length N

    std::optional<double> mean(std::size_t p, std::size_t j) const {
        return means[p * n_petals + j];
    }
    std::size_t count(std::size_t p, std::size_t j) const { return counts[p * n_petals + j]; }
};

/// Computes per-persona petal means and the raw trace-variance estimate
/// v_p = mean over petals with n_pj >= 2 of s^2_pj / n_pj.
///
/// Sums are taken over sorted values so results do not depend on round order.
PersonaSummary summarize(const VoteTensor& tensor);

}  // namespace owb
