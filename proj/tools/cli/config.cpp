#include "config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <vector>

#include "owb/errors.hpp"

namespace owb::cli {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double to_double(const KeyValueEntry& e, const std::string& key) {
    double x = 0.0;
    const auto& s = e.value;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(e.line, key + ": '" + s + "' is not a number");
    return x;
}

std::uint64_t to_uint(const KeyValueEntry& e, const std::string& key) {
    std::uint64_t x = 0;
    const auto& s = e.value;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(e.line, key + ": '" + s + "' is not a nonnegative integer");
    return x;
}

bool to_bool(const KeyValueEntry& e, const std::string& key) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw ParseError(e.line, key + ": '" + e.value + "' is not a boolean");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(trim(std::string_view(s).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<double> to_double_list(const KeyValueEntry& e, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : split_list(e.value)) out.push_back(to_double({item, e.line}, key));
    return out;
}

std::vector<std::size_t> to_uint_list(const KeyValueEntry& e, const std::string& key) {
    std::vector<std::size_t> out;
    for (const auto& item : split_list(e.value)) out.push_back(to_uint({item, e.line}, key));
    return out;
}

const std::set<std::string> kRunKeys = {"prior_strength_persona", "prior_strength_cluster", "variance_floor",
                                        "replicates", "ci_level", "seed", "validate_min_data",
                                        "regularity_delta"};

const std::set<std::string> kScenarioKeys = {"n_personas", "n_petals", "rounds", "mu", "sigma_alpha2",
                                             "sigma_gamma2", "sigma2", "n_clusters", "missing_rate",
                                             "petal_scale", "n_sims", "threads", "regularity_threshold"};

void apply_run_keys(const KeyValueMap& kv, RunConfig& cfg) {
    for (const auto& [key, e] : kv) {
        if (key == "prior_strength_persona") cfg.pooling.prior_strength_persona = to_double(e, key);
        else if (key == "prior_strength_cluster") cfg.pooling.prior_strength_cluster = to_double(e, key);
        else if (key == "variance_floor") cfg.pooling.variance_floor = to_double(e, key);
        else if (key == "replicates") cfg.bootstrap.replicates = to_uint(e, key);
        else if (key == "ci_level") cfg.bootstrap.ci_level = to_double(e, key);
        else if (key == "seed") cfg.bootstrap.seed = to_uint(e, key);
        else if (key == "validate_min_data") cfg.validate_min_data = to_bool(e, key);
        else if (key == "regularity_delta") cfg.regularity_delta = to_double(e, key);
    }
}

}  // namespace

KeyValueMap parse_key_values(std::istream& in) {
    KeyValueMap kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "empty key");
        if (!kv.try_emplace(key, KeyValueEntry{value, line_no}).second)
            throw ParseError(line_no, "key '" + key + "' given twice");
    }
    return kv;
}

KeyValueMap parse_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot open '" + path.string() + "'");
    return parse_key_values(in);
}

void apply_run_config(const KeyValueMap& kv, RunConfig& cfg) {
    for (const auto& [key, e] : kv)
        if (!kRunKeys.contains(key)) throw ParseError(e.line, "unknown key '" + key + "'");
    apply_run_keys(kv, cfg);
}

ScenarioConfig parse_scenario(const KeyValueMap& kv) {
    for (const auto& [key, e] : kv)
        if (!kRunKeys.contains(key) && !kScenarioKeys.contains(key))
            throw ParseError(e.line, "unknown key '" + key + "'");

    auto get_uint = [&](const char* key, std::size_t fallback) {
        const auto it = kv.find(key);
        return it == kv.end() ? fallback : static_cast<std::size_t>(to_uint(it->second, key));
    };

    const std::size_t n = get_uint("n_personas", 50);
    const std::size_t np = get_uint("n_petals", 5);
    const std::uint64_t seed = get_uint("seed", 1);

    ScenarioConfig sc;
    sc.params = SimulationParams::defaults(n, np, seed);
    sc.run.bootstrap.seed = seed;
    apply_run_keys(kv, sc.run);

    if (auto it = kv.find("rounds"); it != kv.end()) {
        const auto cycle = to_uint_list(it->second, "rounds");
        for (std::size_t p = 0; p < n; ++p) sc.params.n_per_persona[p] = cycle[p % cycle.size()];
    }
    if (auto it = kv.find("mu"); it != kv.end()) {
        sc.params.mu = to_double_list(it->second, "mu");
        if (sc.params.mu.size() != np) throw ParseError(it->second.line, "mu must list n_petals values");
    }
    if (auto it = kv.find("petal_scale"); it != kv.end())
        sc.params.petal_scale = to_double_list(it->second, "petal_scale");
    if (auto it = kv.find("sigma_alpha2"); it != kv.end()) sc.params.sigma_alpha2 = to_double(it->second, it->first);
    if (auto it = kv.find("sigma_gamma2"); it != kv.end()) sc.params.sigma_gamma2 = to_double(it->second, it->first);
    if (auto it = kv.find("sigma2"); it != kv.end()) sc.params.sigma2 = to_double(it->second, it->first);
    if (auto it = kv.find("missing_rate"); it != kv.end()) sc.params.missing_rate = to_double(it->second, it->first);
    if (auto it = kv.find("n_clusters"); it != kv.end())
        sc.params.clusters = ClusterMap::round_robin(n, to_uint(it->second, it->first));
    if (auto it = kv.find("regularity_threshold"); it != kv.end())
        sc.regularity_threshold = to_double(it->second, it->first);
    sc.n_sims = get_uint("n_sims", sc.n_sims);
    sc.threads = get_uint("threads", sc.threads);

    sc.params.validate();
    sc.run.pooling.validate();
    return sc;
}

}  // namespace owb::cli
