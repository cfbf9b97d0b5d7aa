#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "owb/core_model.hpp"
#include "owb/weights.hpp"

namespace owb {

class AuditLog;

/// Fallback order: the first layer with a nonempty pool supplies the donor.
enum class DonorLayer : std::uint8_t { local = 0, persona, cluster, petal_global, global_all };
inline constexpr std::size_t kDonorLayerCount = 5;

std::string_view donor_layer_name(DonorLayer layer) noexcept;

/// Observed values eligible to fill one cell, with an explicit probability
/// for each.
struct DonorPool {
    std::vector<double> values;
    std::vector<double> probs;
    DonorLayer layer = DonorLayer::local;
};

/// Walks local -> persona -> cluster -> petal_global -> global_all and
/// returns the first nonempty pool:
///
///   local         other personas, same round index, same petal; p ~ w_q
///   persona       same persona, other rounds, same petal; equal per round
///   cluster       personas in c(p), any round, same petal; p ~ w_q / k_q
///   petal_global  all personas, any round, same petal; p ~ w_q / k_q
///   global_all    every observed value; p ~ w_q / k_q
///
/// k_q is the number of donor values persona q contributes to the pool, so
/// a persona's total donor mass is proportional to w_q.
/// Throws no_data_anywhere when even global_all is empty.
DonorPool build_donor_pool(const VoteTensor& tensor, const ClusterMap& clusters, const WeightVector& weights,
                           CellIndex cell);

/// Throws NoDataAnywhere when the tensor has no finite value at all, then
/// EmptyPetal(j) for the first petal without one.
void check_minimal_data(const VoteTensor& tensor);

std::uint64_t derive_cell_seed(std::uint64_t master_seed, CellIndex cell) noexcept;

struct CellTrace {
    CellIndex cell;
    DonorLayer layer;
    std::size_t pool_size;
    double value;
};

struct ImputationReport {
    VoteTensor completed;
    std::size_t filled_cells = 0;
    std::array<std::size_t, kDonorLayerCount> layer_histogram{};
    std::uint64_t seed = 0;
    std::vector<CellTrace> trace;   // one entry per filled cell, persona-round-petal order
};

struct ImputeOptions {
    std::size_t threads = 1;
    AuditLog* audit = nullptr;
};

/// Fills every missing cell with one weighted draw from its donor pool.
/// Donor pools are built from the original mask only: imputed values never
/// become donors. Each cell draws from its own derived stream, so the result
/// does not depend on fill order or thread count.
ImputationReport impute(const VoteTensor& tensor, const ClusterMap& clusters, const WeightVector& weights,
                        std::uint64_t seed, const ImputeOptions& options = {});

}  // namespace owb
