#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "owb/core_model.hpp"

namespace owb {

/// Count of non-finite entries. For tensors only observed cells are
/// inspected; missing cells are structural absence, not NaN payloads.
std::size_t scan_nan(const VoteTensor& tensor);
std::size_t scan_nan(std::span<const double> values);
std::size_t scan_nan(std::span<const std::optional<double>> values);

/// Append-only record of runtime checks: every weighted draw, every NaN scan
/// of an emitted artifact, and the weight-regularity value of the run.
/// Safe for concurrent appends.
class AuditLog {
public:
    struct Snapshot {
        std::size_t sampling_calls = 0;
        std::size_t explicit_probability_calls = 0;
        std::map<std::string, std::size_t> nan_scan_results;
        std::optional<double> weight_regularity;
    };

    /// Records `draws` sampling calls. Throws invariant_failure if a draw
    /// was attempted without an explicit probability vector.
    void record_sampling(std::size_t draws, bool explicit_probabilities);

    /// Stores the scan result for an artifact and returns the count.
    std::size_t record_nan_scan(const std::string& artifact, std::size_t nan_count);

    void record_weight_regularity(double n_times_min_weight);

    /// Throws invariant_failure naming the first artifact with a nonzero scan.
    void require_nan_free() const;

    Snapshot snapshot() const;

private:
    mutable std::mutex mu_;
    Snapshot data_;
};

}  // namespace owb
