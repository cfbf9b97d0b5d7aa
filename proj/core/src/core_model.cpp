#include "owb/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "owb/errors.hpp"

namespace owb {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

// Sum of sorted values: exact permutation invariance of the result.
double sorted_sum(std::vector<double>& xs) {
    std::sort(xs.begin(), xs.end());
    long double acc = 0.0L;
    for (double x : xs) acc += x;
    return static_cast<double>(acc);
}

}  // namespace

void VoteTensor::init_shape(std::size_t n_petals, const std::vector<Rounds>& personas) {
    if (n_petals == 0) throw Error(ErrorCode::invalid_argument, "VoteTensor needs at least one petal");
    if (personas.empty()) throw Error(ErrorCode::invalid_argument, "VoteTensor needs at least one persona");
    n_petals_ = n_petals;
    rounds_.reserve(personas.size());
    round_offset_.reserve(personas.size());
    std::size_t total = 0;
    for (std::size_t p = 0; p < personas.size(); ++p) {
        const auto& rounds = personas[p];
        if (rounds.empty())
            throw Error(ErrorCode::invalid_argument,
                        "persona " + std::to_string(p) + " has no rounds");
        for (const auto& row : rounds) {
            if (row.size() != n_petals)
                throw Error(ErrorCode::invalid_argument,
                            "persona " + std::to_string(p) + " has a round of length " +
                                std::to_string(row.size()) + ", expected " +
                                std::to_string(n_petals));
        }
        round_offset_.push_back(total);
        rounds_.push_back(rounds.size());
        total += rounds.size();
    }
    values_.assign(total * n_petals, kMissing);
    mask_.assign(total * n_petals, 0);
}

VoteTensor::VoteTensor(std::size_t n_petals, const std::vector<Rounds>& personas) {
    init_shape(n_petals, personas);
    for (std::size_t p = 0; p < personas.size(); ++p)
        for (std::size_t r = 0; r < personas[p].size(); ++r)
            for (std::size_t j = 0; j < n_petals; ++j) {
                const double v = personas[p][r][j];
                if (std::isfinite(v)) {
                    values_[offset(p, r, j)] = v;
                    mask_[offset(p, r, j)] = 1;
                }
            }
}

VoteTensor::VoteTensor(std::size_t n_petals, const std::vector<Rounds>& personas,
                       const std::vector<std::vector<std::vector<bool>>>& mask) {
    init_shape(n_petals, personas);
    if (mask.size() != personas.size())
        throw Error(ErrorCode::invalid_argument, "mask persona count mismatch");
    for (std::size_t p = 0; p < personas.size(); ++p) {
        if (mask[p].size() != personas[p].size())
            throw Error(ErrorCode::invalid_argument, "mask round count mismatch");
        for (std::size_t r = 0; r < personas[p].size(); ++r) {
            if (mask[p][r].size() != n_petals)
                throw Error(ErrorCode::invalid_argument, "mask petal count mismatch");
            for (std::size_t j = 0; j < n_petals; ++j) {
                if (!mask[p][r][j]) continue;
                const double v = personas[p][r][j];
                if (!std::isfinite(v))
                    throw Error(ErrorCode::invalid_argument, "observed cell holds a non-finite value");
                values_[offset(p, r, j)] = v;
                mask_[offset(p, r, j)] = 1;
            }
        }
    }
}

std::size_t VoteTensor::observed_count() const noexcept {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> VoteTensor::petal_observation_counts() const {
    std::vector<std::size_t> counts(n_petals_, 0);
    for (std::size_t k = 0; k < mask_.size(); ++k)
        if (mask_[k] != 0) ++counts[k % n_petals_];
    return counts;
}

VoteTensor VoteTensor::with_filled(std::span<const CellValue> cells) const {
    VoteTensor out = *this;
    for (const auto& c : cells) {
        if (c.persona >= n_personas() || c.round >= rounds_[c.persona] || c.petal >= n_petals_)
            throw Error(ErrorCode::invalid_argument, "fill cell out of range");
        if (!std::isfinite(c.value))
            throw Error(ErrorCode::invariant_failure, "attempted to fill a cell with a non-finite value");
        const auto k = offset(c.persona, c.round, c.petal);
        out.values_[k] = c.value;
        out.mask_[k] = 1;
    }
    return out;
}

bool operator==(const VoteTensor& a, const VoteTensor& b) {
    if (a.n_petals_ != b.n_petals_ || a.rounds_ != b.rounds_ || a.mask_ != b.mask_) return false;
    for (std::size_t k = 0; k < a.values_.size(); ++k) {
        if (a.mask_[k] == 0) continue;
        // Bitwise comparison of observed payloads.
        if (std::memcmp(&a.values_[k], &b.values_[k], sizeof(double)) != 0) return false;
    }
    return true;
}

ClusterMap::ClusterMap(std::vector<std::size_t> assignment) : assignment_(std::move(assignment)) {
    if (assignment_.empty()) throw Error(ErrorCode::invalid_argument, "ClusterMap needs at least one persona");
    n_clusters_ = *std::max_element(assignment_.begin(), assignment_.end()) + 1;
    std::vector<bool> seen(n_clusters_, false);
    for (auto c : assignment_) seen[c] = true;
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw Error(ErrorCode::invalid_argument, "cluster ids must be contiguous 0..C-1");
}

ClusterMap ClusterMap::single(std::size_t n_personas) {
    return ClusterMap(std::vector<std::size_t>(n_personas, 0));
}

ClusterMap ClusterMap::round_robin(std::size_t n_personas, std::size_t n_clusters) {
    if (n_clusters == 0 || n_clusters > n_personas)
        throw Error(ErrorCode::invalid_argument, "need 1 <= clusters <= personas");
    std::vector<std::size_t> a(n_personas);
    for (std::size_t p = 0; p < n_personas; ++p) a[p] = p % n_clusters;
    return ClusterMap(std::move(a));
}

std::vector<std::size_t> ClusterMap::members(std::size_t cluster) const {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < assignment_.size(); ++p)
        if (assignment_[p] == cluster) out.push_back(p);
    return out;
}

PersonaSummary summarize(const VoteTensor& tensor) {
    const std::size_t n = tensor.n_personas();
    const std::size_t np = tensor.n_petals();
    PersonaSummary s;
    s.n_personas = n;
    s.n_petals = np;
    s.means.assign(n * np, std::nullopt);
    s.counts.assign(n * np, 0);
    s.raw_trace_var.assign(n, std::nullopt);
    s.df.assign(n, 0);

    std::vector<double> column;
    std::vector<double> sq;
    for (std::size_t p = 0; p < n; ++p) {
        long double var_of_mean_sum = 0.0L;
        std::size_t estimable = 0;
        for (std::size_t j = 0; j < np; ++j) {
            column.clear();
            for (std::size_t r = 0; r < tensor.n_rounds(p); ++r)
                if (tensor.observed(p, r, j)) column.push_back(tensor.value(p, r, j));
            const std::size_t k = column.size();
            s.counts[p * np + j] = k;
            if (k == 0) continue;

            double mean = sorted_sum(column) / static_cast<double>(k);
            // Guard against rounding just outside the observed range.
            mean = std::clamp(mean, column.front(), column.back());
            s.means[p * np + j] = mean;
            if (k < 2) continue;

            sq.clear();
            for (double x : column) sq.push_back((x - mean) * (x - mean));
            const double s2 = sorted_sum(sq) / static_cast<double>(k - 1);
            var_of_mean_sum += s2 / static_cast<double>(k);
            ++estimable;
            s.df[p] += k - 1;
        }
        if (estimable > 0)
            s.raw_trace_var[p] = static_cast<double>(var_of_mean_sum / static_cast<long double>(estimable));
    }
    return s;
}

}  // namespace owb
