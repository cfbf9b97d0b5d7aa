#include "owb/imputer.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "owb/diagnostics.hpp"
#include "owb/errors.hpp"
#include "owb/parallel.hpp"
#include "owb/random.hpp"

namespace owb {

std::string_view donor_layer_name(DonorLayer layer) noexcept {
    switch (layer) {
        case DonorLayer::local: return "local";
        case DonorLayer::persona: return "persona";
        case DonorLayer::cluster: return "cluster";
        case DonorLayer::petal_global: return "petal_global";
        case DonorLayer::global_all: return "global_all";
    }
    return "unknown";
}

namespace {

// Accumulates donors grouped by contributing persona, then assigns each
// donor the persona weight split evenly across that persona's donors.
class PoolBuilder {
public:
    explicit PoolBuilder(const WeightVector& weights) : weights_(weights) {}

    void begin_persona(std::size_t q) {
        persona_ = q;
        first_ = values_.size();
    }
    void add(double v) { values_.push_back(v); }
    void end_persona() {
        const std::size_t k = values_.size() - first_;
        for (std::size_t i = 0; i < k; ++i)
            raw_.push_back(weights_.w[persona_] / static_cast<double>(k));
    }
    bool empty() const { return values_.empty(); }

    DonorPool finish(DonorLayer layer) {
        DonorPool pool;
        pool.layer = layer;
        pool.values = std::move(values_);
        pool.probs = normalize(std::move(raw_));
        return pool;
    }

    static std::vector<double> normalize(std::vector<double> raw) {
        long double total = 0.0L;
        for (double x : raw) total += x;
        for (auto& x : raw) x = static_cast<double>(x / total);
        return raw;
    }

private:
    const WeightVector& weights_;
    std::size_t persona_ = 0;
    std::size_t first_ = 0;
    std::vector<double> values_;
    std::vector<double> raw_;
};

}  // namespace

DonorPool build_donor_pool(const VoteTensor& tensor, const ClusterMap& clusters, const WeightVector& weights,
                           CellIndex cell) {
    const std::size_t n = tensor.n_personas();
    const std::size_t np = tensor.n_petals();
    const auto [p, r, j] = cell;
    if (p >= n || r >= tensor.n_rounds(p) || j >= np)
        throw Error(ErrorCode::invalid_argument, "donor cell out of range");
    if (tensor.observed(p, r, j))
        throw Error(ErrorCode::invalid_argument, "donor pool requested for an observed cell");
    if (weights.size() != n || clusters.n_personas() != n)
        throw Error(ErrorCode::invalid_argument, "weights/clusters do not match persona count");

    // local: same round index across other personas that have that round.
    {
        PoolBuilder b(weights);
        for (std::size_t q = 0; q < n; ++q) {
            if (q == p || tensor.n_rounds(q) <= r || !tensor.observed(q, r, j)) continue;
            b.begin_persona(q);
            b.add(tensor.value(q, r, j));
            b.end_persona();
        }
        if (!b.empty()) return b.finish(DonorLayer::local);
    }

    // persona history: equal mass per donor round.
    {
        DonorPool pool;
        pool.layer = DonorLayer::persona;
        for (std::size_t rr = 0; rr < tensor.n_rounds(p); ++rr)
            if (rr != r && tensor.observed(p, rr, j)) pool.values.push_back(tensor.value(p, rr, j));
        if (!pool.values.empty()) {
            pool.probs = PoolBuilder::normalize(std::vector<double>(pool.values.size(), 1.0));
            return pool;
        }
    }

    auto petal_pool = [&](auto&& include_persona, DonorLayer layer) -> std::optional<DonorPool> {
        PoolBuilder b(weights);
        for (std::size_t q = 0; q < n; ++q) {
            if (!include_persona(q)) continue;
            b.begin_persona(q);
            for (std::size_t rr = 0; rr < tensor.n_rounds(q); ++rr)
                if (tensor.observed(q, rr, j)) b.add(tensor.value(q, rr, j));
            b.end_persona();
        }
        if (b.empty()) return std::nullopt;
        return b.finish(layer);
    };

    const std::size_t home = clusters.cluster_of(p);
    if (auto pool = petal_pool([&](std::size_t q) { return clusters.cluster_of(q) == home; }, DonorLayer::cluster))
        return *std::move(pool);
    if (auto pool = petal_pool([](std::size_t) { return true; }, DonorLayer::petal_global))
        return *std::move(pool);

    PoolBuilder b(weights);
    for (std::size_t q = 0; q < n; ++q) {
        b.begin_persona(q);
        for (std::size_t rr = 0; rr < tensor.n_rounds(q); ++rr)
            for (std::size_t jj = 0; jj < np; ++jj)
                if (tensor.observed(q, rr, jj)) b.add(tensor.value(q, rr, jj));
        b.end_persona();
    }
    if (b.empty()) throw Error(ErrorCode::no_data_anywhere, "tensor contains no finite value");
    return b.finish(DonorLayer::global_all);
}

void check_minimal_data(const VoteTensor& tensor) {
    if (tensor.observed_count() == 0)
        throw Error(ErrorCode::no_data_anywhere, "tensor contains no finite value");
    const auto counts = tensor.petal_observation_counts();
    for (std::size_t j = 0; j < counts.size(); ++j)
        if (counts[j] == 0) throw EmptyPetal(j);
}

std::uint64_t derive_cell_seed(std::uint64_t master_seed, CellIndex cell) noexcept {
    return derive_seed(master_seed, {0x696d70ULL, cell.persona, cell.round, cell.petal});
}

ImputationReport impute(const VoteTensor& tensor, const ClusterMap& clusters, const WeightVector& weights,
                        std::uint64_t seed, const ImputeOptions& options) {
    check_minimal_data(tensor);
    if (weights.size() != tensor.n_personas() || clusters.n_personas() != tensor.n_personas())
        throw Error(ErrorCode::invalid_argument, "weights/clusters do not match persona count");

    std::vector<CellIndex> missing;
    for (std::size_t p = 0; p < tensor.n_personas(); ++p)
        for (std::size_t r = 0; r < tensor.n_rounds(p); ++r)
            for (std::size_t j = 0; j < tensor.n_petals(); ++j)
                if (!tensor.observed(p, r, j)) missing.push_back({p, r, j});

    std::vector<CellTrace> trace(missing.size());
    parallel_for(missing.size(), options.threads, [&](std::size_t k) {
        const CellIndex cell = missing[k];
        const DonorPool pool = build_donor_pool(tensor, clusters, weights, cell);
        const DiscreteSampler sampler(pool.probs, options.audit);
        Rng rng(derive_cell_seed(seed, cell));
        const double v = pool.values[sampler.draw(rng)];
        trace[k] = CellTrace{cell, pool.layer, pool.values.size(), v};
    });

    std::vector<VoteTensor::CellValue> fills;
    fills.reserve(trace.size());
    std::array<std::size_t, kDonorLayerCount> histogram{};
    for (const auto& t : trace) {
        fills.push_back({t.cell.persona, t.cell.round, t.cell.petal, t.value});
        ++histogram[static_cast<std::size_t>(t.layer)];
    }

    ImputationReport report{tensor.with_filled(fills), trace.size(), histogram, seed, std::move(trace)};
    if (options.audit != nullptr) {
        options.audit->record_nan_scan("completed_tensor", scan_nan(report.completed));
    }
    if (!report.completed.fully_observed())
        throw Error(ErrorCode::invariant_failure, "imputation left a missing cell");
    return report;
}

}  // namespace owb
