#include "owb/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "owb/errors.hpp"

namespace owb {

std::size_t scan_nan(const VoteTensor& tensor) {
    const auto values = tensor.flat_values();
    const auto mask = tensor.flat_mask();
    std::size_t bad = 0;
    for (std::size_t k = 0; k < values.size(); ++k)
        if (mask[k] != 0 && !std::isfinite(values[k])) ++bad;
    return bad;
}

std::size_t scan_nan(std::span<const double> values) {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [](double x) { return !std::isfinite(x); }));
}

std::size_t scan_nan(std::span<const std::optional<double>> values) {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](const auto& x) {
        return x.has_value() && !std::isfinite(*x);
    }));
}

void AuditLog::record_sampling(std::size_t draws, bool explicit_probabilities) {
    {
        std::lock_guard lock(mu_);
        data_.sampling_calls += draws;
        if (explicit_probabilities) data_.explicit_probability_calls += draws;
    }
    if (!explicit_probabilities)
        throw Error(ErrorCode::invariant_failure, "sampling call without an explicit probability vector");
}

std::size_t AuditLog::record_nan_scan(const std::string& artifact, std::size_t nan_count) {
    std::lock_guard lock(mu_);
    data_.nan_scan_results[artifact] = nan_count;
    return nan_count;
}

void AuditLog::record_weight_regularity(double n_times_min_weight) {
    std::lock_guard lock(mu_);
    data_.weight_regularity = n_times_min_weight;
}

void AuditLog::require_nan_free() const {
    std::lock_guard lock(mu_);
    for (const auto& [artifact, count] : data_.nan_scan_results)
        if (count != 0)
            throw Error(ErrorCode::invariant_failure,
                        "artifact '" + artifact + "' contains " + std::to_string(count) +
                            " non-finite entries");
}

AuditLog::Snapshot AuditLog::snapshot() const {
    std::lock_guard lock(mu_);
    return data_;
}

}  // namespace owb
