#include "doctest.h"

#include <cmath>

#include "owb/errors.hpp"
#include "owb/simulator.hpp"

using namespace owb;

namespace {

SimulationParams base(std::size_t n, std::size_t p, std::vector<std::size_t> rounds_cycle) {
    SimulationParams s;
    s.mu.resize(p);
    for (std::size_t j = 0; j < p; ++j) s.mu[j] = 0.5 * static_cast<double>(j) - 1.0;
    for (std::size_t k = 0; k < n; ++k) s.n_per_persona.push_back(rounds_cycle[k % rounds_cycle.size()]);
    s.clusters = ClusterMap::single(n);
    return s;
}

}  // namespace

TEST_CASE("vanishing noise reproduces the archetype") {
    auto s = base(10, 4, {3});
    s.sigma_alpha2 = s.sigma_gamma2 = s.sigma2 = 1e-18;
    const auto panel = generate(s);
    for (std::size_t p = 0; p < 10; ++p)
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(panel.tensor.value(p, r, j) - s.mu[j]) < 1e-6);
}

TEST_CASE("persona-mean variance matches the three-level formula") {
    // sigma_alpha2 = 1, sigma_gamma2 = 0.5, sigma2 = 2, n = 4 -> v = 2.0.
    const std::size_t n = 100000;
    auto s = base(n, 1, {4});
    s.sigma_alpha2 = 1.0;
    s.sigma_gamma2 = 0.5;
    s.sigma2 = 2.0;
    std::vector<std::size_t> own(n);
    for (std::size_t p = 0; p < n; ++p) own[p] = p;
    s.clusters = ClusterMap(own);   // independent gamma per persona
    s.seed = 2024;
    CHECK(s.true_variances()[0] == 2.0);
    const auto panel = generate(s);
    double m = 0.0;
    std::vector<double> means(n);
    for (std::size_t p = 0; p < n; ++p) {
        double acc = 0.0;
        for (std::size_t r = 0; r < 4; ++r) acc += panel.tensor.value(p, r, 0);
        means[p] = acc / 4.0;
        m += means[p];
    }
    m /= n;
    double ss = 0.0;
    for (double x : means) ss += (x - m) * (x - m);
    const double var = ss / (n - 1);
    const double se = 2.0 * std::sqrt(2.0 / (n - 1));
    CHECK(std::abs(var - 2.0) < 3.0 * se);
    CHECK(std::abs(m - s.mu[0]) < 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("no missingness yields a full mask; heavy missingness is repaired") {
    auto s = base(6, 5, {2, 3});
    s.missing_rate = 0.0;
    CHECK(generate(s).tensor.fully_observed());
    CHECK(generate(s).truth.repaired_cells.empty());
    s.missing_rate = 0.97;
    std::size_t repaired = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        s.seed = seed;
        const auto panel = generate(s);
        for (auto c : panel.tensor.petal_observation_counts()) CHECK(c >= 1);
        for (const auto& cell : panel.truth.repaired_cells) {
            CHECK(panel.tensor.observed(cell.persona, cell.round, cell.petal));
            CHECK(panel.tensor.petal_observation_counts()[cell.petal] == 1);
        }
        repaired += panel.truth.repaired_cells.size();
    }
    CHECK(repaired > 0);
}

TEST_CASE("generation is deterministic under a fixed seed") {
    auto s = SimulationParams::defaults(30, 4, 9);
    const auto a = generate(s);
    const auto b = generate(s);
    CHECK(a.tensor == b.tensor);
    CHECK(a.truth.alpha == b.truth.alpha);
    s.seed = 10;
    CHECK_FALSE(generate(s).tensor == a.tensor);
}

TEST_CASE("equal variances: ideal weighting coincides with uniform") {
    auto s = base(20, 3, {5});
    const auto rep = run_mse_experiment(s, 200);
    CHECK(rep.analytic_variance_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.empirical_variance_ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("heterogeneous variances: ideal and feasible beat uniform") {
    // Within-persona noise only, rounds 200 vs 4: v = 0.005 vs 0.25.
    auto s = base(40, 3, {200, 4});
    s.sigma_alpha2 = 0.0;
    s.sigma_gamma2 = 0.0;
    s.sigma2 = 1.0;
    const auto rep = run_mse_experiment(s, 400);
    CHECK(rep.mse_owb_ideal_total < rep.mse_uniform_total);
    CHECK(rep.mse_owb_feasible_total < rep.mse_uniform_total);
    CHECK(rep.mse_owb_feasible_total < 1.2 * rep.mse_owb_ideal_total);
    CHECK(rep.analytic_variance_ratio < 0.1);
    CHECK(rep.empirical_variance_ratio == doctest::Approx(rep.analytic_variance_ratio).epsilon(0.25));
}

TEST_CASE("shrinkage: lambda 0 is the raw estimator, lambda 1 can hurt") {
    auto s = base(100, 5, {3});
    s.sigma_alpha2 = s.sigma_gamma2 = 0.0;
    ExperimentOptions none;
    none.pooling.fixed_persona_lambda = 0.0;
    const auto r0 = run_shrinkage_experiment(s, 50, none);
    CHECK(r0.ratio == 1.0);
    CHECK(r0.mse_pooled == r0.mse_raw);
    const auto pooled = run_shrinkage_experiment(s, 50);
    CHECK(pooled.ratio < 1.0);

    auto het = base(100, 5, {2, 50});
    het.sigma_alpha2 = het.sigma_gamma2 = 0.0;
    ExperimentOptions full;
    full.pooling.fixed_persona_lambda = 1.0;
    CHECK(run_shrinkage_experiment(het, 50, full).ratio > 1.0);
}

TEST_CASE("coverage for a single persona is flagged not applicable") {
    auto s = base(1, 2, {5});
    const auto rep = run_coverage_experiment(s, 5, 0.9, 50);
    CHECK_FALSE(rep.coverage_applicable);
}

TEST_CASE("coverage near the nominal level at 0.5") {
    auto s = base(100, 2, {10});
    s.sigma_alpha2 = 1.0;
    s.sigma_gamma2 = 0.0;
    s.sigma2 = 2.0;
    s.seed = 5;
    const auto rep = run_coverage_experiment(s, 200, 0.5, 300);
    CHECK(rep.coverage_applicable);
    for (double c : rep.empirical_coverage) CHECK(std::abs(c - 0.5) < 0.13);
}

TEST_CASE("simulation parameters are validated") {
    auto s = base(3, 2, {2});
    s.sigma2 = 0.0;
    CHECK_THROWS_AS(s.validate(), Error);
    s = base(3, 2, {2});
    s.missing_rate = 1.0;
    CHECK_THROWS_AS(s.validate(), Error);
    s = base(3, 2, {2});
    s.clusters = ClusterMap::single(4);
    CHECK_THROWS_AS(s.validate(), Error);
    s = base(3, 2, {2});
    s.petal_scale = {1.0};
    CHECK_THROWS_AS(s.validate(), Error);
    s = base(3, 2, {0});
    CHECK_THROWS_AS(generate(s), Error);
}
