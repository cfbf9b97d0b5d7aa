#include "owb/weights.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "owb/errors.hpp"

namespace owb {

std::string_view weight_kind_name(WeightKind kind) noexcept {
    switch (kind) {
        case WeightKind::ideal: return "ideal";
        case WeightKind::feasible: return "feasible";
        case WeightKind::uniform: return "uniform";
    }
    return "unknown";
}

namespace {

double ratio_of(const std::vector<double>& w) {
    return static_cast<double>(w.size()) * *std::min_element(w.begin(), w.end());
}

}  // namespace

WeightVector WeightVector::uniform(std::size_t n) {
    if (n == 0) throw Error(ErrorCode::invalid_argument, "weight vector must be nonempty");
    WeightVector wv;
    wv.w.assign(n, 1.0 / static_cast<double>(n));
    wv.kind = WeightKind::uniform;
    wv.min_weight_ratio = ratio_of(wv.w);
    return wv;
}

WeightVector precision_weights(std::span<const double> variances, WeightKind kind) {
    if (variances.empty()) throw Error(ErrorCode::invalid_argument, "variance vector must be nonempty");
    long double total = 0.0L;
    for (std::size_t p = 0; p < variances.size(); ++p) {
        const double v = variances[p];
        if (!std::isfinite(v) || v <= 0.0)
            throw Error(ErrorCode::non_positive_variance,
                        "variance " + std::to_string(p) + " is not finite and positive");
        total += 1.0L / static_cast<long double>(v);
    }

    WeightVector wv;
    wv.kind = kind;
    wv.w.resize(variances.size());
    long double check = 0.0L;
    for (std::size_t p = 0; p < variances.size(); ++p) {
        wv.w[p] = static_cast<double>((1.0L / static_cast<long double>(variances[p])) / total);
        check += wv.w[p];
    }
    // Single renormalization pass pins the sum to one.
    if (check != 1.0L)
        for (auto& x : wv.w) x = static_cast<double>(x / check);
    wv.min_weight_ratio = ratio_of(wv.w);
    return wv;
}

WeightRegularityReport check_weight_regularity(const WeightVector& wv, double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw Error(ErrorCode::invalid_argument, "regularity threshold must lie in (0, 1]");
    if (wv.w.empty()) throw Error(ErrorCode::invalid_argument, "weight vector must be nonempty");
    WeightRegularityReport r;
    r.value = ratio_of(wv.w);
    r.threshold = delta;
    r.passed = r.value >= delta;
    return r;
}

double weighted_variance_objective(std::span<const double> w, std::span<const double> v) {
    if (w.size() != v.size()) throw Error(ErrorCode::invalid_argument, "length mismatch");
    long double acc = 0.0L;
    for (std::size_t p = 0; p < w.size(); ++p)
        acc += static_cast<long double>(w[p]) * w[p] * v[p];
    return static_cast<double>(acc);
}

}  // namespace owb
