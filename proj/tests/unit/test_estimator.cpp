#include "doctest.h"

#include <cmath>
#include <random>

#include "owb/errors.hpp"
#include "owb/estimator.hpp"
#include "test_support.hpp"

using namespace owb;

namespace {

// N x P summary from a matrix of persona means; nullopt = petal unobserved.
PersonaSummary means_summary(const std::vector<std::vector<std::optional<double>>>& m) {
    PersonaSummary s;
    s.n_personas = m.size();
    s.n_petals = m.front().size();
    for (const auto& row : m)
        for (const auto& x : row) {
            s.means.push_back(x);
            s.counts.push_back(x ? 1 : 0);
        }
    s.raw_trace_var.assign(s.n_personas, std::nullopt);
    s.df.assign(s.n_personas, 0);
    return s;
}

WeightVector raw_weights(std::vector<double> w) {
    WeightVector wv;
    wv.w = std::move(w);
    return wv;
}

}  // namespace

TEST_CASE("estimate_archetype: weighted mean of two personas") {
    const auto s = means_summary({{0.0}, {4.0}});
    const auto est = estimate_archetype(s, raw_weights({0.75, 0.25}));
    CHECK(est.mu_hat[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(est.per_petal_personas[0] == std::vector<std::size_t>{0, 1});
    CHECK(est.method == EstimateMethod::owb_feasible);
}

TEST_CASE("estimate_archetype: equal weights reduce to the midpoint") {
    const auto s = means_summary({{1.0, -2.0, 10.0}, {3.0, 6.0, 10.5}});
    const auto est = estimate_archetype(s, WeightVector::uniform(2));
    CHECK(est.mu_hat == std::vector<double>{2.0, 2.0, 10.25});
    CHECK(est.method == EstimateMethod::uniform);
}

TEST_CASE("estimate_archetype: a single contributor fixes the petal") {
    const auto s = means_summary({{1.0, std::nullopt}, {3.0, 5.5}, {2.0, std::nullopt}});
    const auto est = estimate_archetype(s, raw_weights({0.6, 0.1, 0.3}));
    CHECK(est.mu_hat[1] == 5.5);
    CHECK(est.per_petal_personas[1] == std::vector<std::size_t>{1});
}

TEST_CASE("estimate_archetype: unobserved petal is an explicit error") {
    const auto s = means_summary({{1.0, std::nullopt}, {3.0, std::nullopt}});
    try {
        estimate_archetype(s, WeightVector::uniform(2));
        FAIL("expected EmptyPetal");
    } catch (const EmptyPetal& e) {
        CHECK(e.petal() == 1);
        CHECK(e.code() == ErrorCode::empty_petal);
    }
    CHECK_THROWS_AS(estimate_uniform(s), EmptyPetal);
}

TEST_CASE("estimate_uniform: mean over contributors") {
    const auto full = means_summary({{1.0}, {2.0}, {3.0}});
    CHECK(estimate_uniform(full).mu_hat[0] == 2.0);
    const auto gap = means_summary({{1.0}, {std::nullopt}, {3.0}});
    CHECK(estimate_uniform(gap).mu_hat[0] == 2.0);
    const auto est = estimate_uniform(full);
    CHECK(est.weights_used.w == std::vector<double>(3, 1.0 / 3.0));
    CHECK(est.method == EstimateMethod::uniform);
}

TEST_CASE("estimate_uniform agrees with precision weights under equal variances") {
    const auto s = means_summary({{0.3, 1.0}, {0.9, std::nullopt}, {-1.2, 4.0}, {2.5, 0.0}});
    const auto eq = precision_weights(std::vector<double>(4, 0.8), WeightKind::ideal);
    const auto a = estimate_archetype(s, eq);
    const auto b = estimate_uniform(s);
    for (std::size_t j = 0; j < 2; ++j) CHECK(a.mu_hat[j] == doctest::Approx(b.mu_hat[j]).epsilon(1e-15));
}

TEST_CASE("posterior_mean_oracle: conjugate normal examples") {
    const std::vector<double> m{0.0, 4.0}, v{1.0, 3.0};
    CHECK(posterior_mean_oracle(m, v, std::nullopt) == doctest::Approx(1.0).epsilon(1e-15));
    // tau^2 = 1e12 is a near-flat prior.
    CHECK(std::abs(posterior_mean_oracle(m, v, 1e12) - 1.0) <= 1e-6);
    // Informative prior pulls toward zero: (4/3) / (1 + 1/3 + 1) = 4/7.
    CHECK(posterior_mean_oracle(m, v, 1.0) == doctest::Approx(4.0 / 7.0).epsilon(1e-14));
    const std::vector<double> bad{1.0, 0.0};
    CHECK_THROWS_AS(posterior_mean_oracle(m, bad, std::nullopt), Error);
    CHECK_THROWS_AS(posterior_mean_oracle(m, v, 0.0), Error);
}

TEST_CASE("posterior_mean_oracle with a flat prior equals the precision-weighted mean") {
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> logv(-3.0, 3.0), mean(-5.0, 5.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 40)(gen);
        std::vector<double> v(n), m(n);
        for (std::size_t p = 0; p < n; ++p) {
            v[p] = std::pow(10.0, logv(gen));
            m[p] = mean(gen);
        }
        const auto wv = precision_weights(v, WeightKind::ideal);
        double dot = 0.0;
        for (std::size_t p = 0; p < n; ++p) dot += wv.w[p] * m[p];
        CHECK(std::abs(posterior_mean_oracle(m, v, std::nullopt) - dot) <= 1e-12);
    }
}

TEST_CASE("estimates stay inside the hull of contributing means") {
    std::mt19937_64 gen(37);
    for (int trial = 0; trial < 300; ++trial) {
        const auto panel = owb::testing::random_panel(gen, 12, 8, 5, 0.6);
        const auto s = summarize(panel.tensor);
        std::vector<double> w(s.n_personas);
        std::uniform_real_distribution<double> u(1e-6, 1.0);
        double total = 0.0;
        for (auto& x : w) total += (x = u(gen));
        for (auto& x : w) x /= total;
        const auto est = estimate_archetype(s, raw_weights(w));
        for (std::size_t j = 0; j < s.n_petals; ++j) {
            double lo = INFINITY, hi = -INFINITY;
            for (std::size_t p : est.per_petal_personas[j]) {
                lo = std::min(lo, *s.mean(p, j));
                hi = std::max(hi, *s.mean(p, j));
            }
            CHECK(std::isfinite(est.mu_hat[j]));
            CHECK(est.mu_hat[j] >= lo);
            CHECK(est.mu_hat[j] <= hi);
        }
    }
}

TEST_CASE("dominance identity: 1/sum(1/v) <= mean(v)/N with equality only for equal v") {
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> logv(-3.0, 3.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 50)(gen);
        std::vector<double> v(n);
        for (auto& x : v) x = std::pow(10.0, logv(gen));
        const auto wv = precision_weights(v, WeightKind::ideal);
        const double gls = weighted_variance_objective(wv.w, v);
        const double uni = weighted_variance_objective(WeightVector::uniform(n).w, v);
        CHECK(gls < uni);
        std::vector<double> same(n, v[0]);
        const double g2 = weighted_variance_objective(precision_weights(same, WeightKind::ideal).w, same);
        const double u2 = weighted_variance_objective(WeightVector::uniform(n).w, same);
        CHECK(g2 == doctest::Approx(u2).epsilon(1e-13));
    }
}
