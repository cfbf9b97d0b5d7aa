#include <benchmark/benchmark.h>

#include "owb/owb.hpp"

namespace {

owb::SimulatedPanel panel_for(std::size_t n) {
    return owb::generate(owb::SimulationParams::defaults(n, 10, 17));
}

void BM_Summarize(benchmark::State& state) {
    const auto panel = panel_for(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(owb::summarize(panel.tensor));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(panel.tensor.cell_count()));
}
BENCHMARK(BM_Summarize)->Arg(100)->Arg(1000)->Arg(10000);

void BM_PoolAndWeight(benchmark::State& state) {
    const auto params = owb::SimulationParams::defaults(static_cast<std::size_t>(state.range(0)), 10, 17);
    const auto s = owb::summarize(owb::generate(params).tensor);
    for (auto _ : state) {
        const auto pooled = owb::pool_variances(s, params.clusters, owb::PoolingConfig{});
        benchmark::DoNotOptimize(owb::precision_weights(pooled.v_eff, owb::WeightKind::feasible));
    }
}
BENCHMARK(BM_PoolAndWeight)->Arg(100)->Arg(10000);

void BM_Bootstrap(benchmark::State& state) {
    const auto params = owb::SimulationParams::defaults(static_cast<std::size_t>(state.range(0)), 10, 17);
    const auto s = owb::summarize(owb::generate(params).tensor);
    const auto wv = owb::precision_weights(owb::pool_variances(s, params.clusters, {}).v_eff,
                                           owb::WeightKind::feasible);
    owb::BootstrapConfig cfg;
    cfg.replicates = 1000;
    for (auto _ : state) benchmark::DoNotOptimize(owb::weighted_bootstrap(s, wv, cfg));
}
BENCHMARK(BM_Bootstrap)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Impute(benchmark::State& state) {
    const auto params = owb::SimulationParams::defaults(static_cast<std::size_t>(state.range(0)), 10, 17);
    const auto t = owb::generate(params).tensor;
    const auto wv = owb::WeightVector::uniform(t.n_personas());
    for (auto _ : state) benchmark::DoNotOptimize(owb::impute(t, params.clusters, wv, 42));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(t.missing_count()));
}
BENCHMARK(BM_Impute)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
