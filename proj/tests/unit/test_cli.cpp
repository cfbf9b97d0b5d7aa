#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include <unistd.h>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/votes_io.hpp"
#include "json.hpp"
#include "owb/errors.hpp"
#include "test_support.hpp"

using namespace owb;
using namespace owb::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("owb_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const std::string& content) const {
        std::ofstream(path / name) << content;
        return path / name;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

IngestedPanel ingest_text(const std::string& text) {
    std::istringstream in(text);
    return ingest(in);
}

}  // namespace

TEST_CASE("ingest: small complete file") {
    const auto p = ingest_text(
        "persona_id,cluster_id,round,petal_id,value\n"
        "a,c1,0,x,1.5\n"
        "a,c1,0,y,2\n"
        "b,c2,0,x,-3\n"
        "b,c2,0,y,4e-1\n");
    CHECK(p.tensor.n_personas() == 2);
    CHECK(p.tensor.n_petals() == 2);
    CHECK(p.tensor.fully_observed());
    CHECK(p.tensor.value(1, 0, 1) == 0.4);
    CHECK(p.ids.personas == std::vector<std::string>{"a", "b"});
    CHECK(p.ids.petals == std::vector<std::string>{"x", "y"});
    CHECK(p.clusters.n_clusters() == 2);
}

TEST_CASE("ingest: empty or non-finite values and absent records are missing") {
    const auto p = ingest_text(
        "value,petal_id,round,cluster_id,persona_id\n"
        ",x,0,c,a\n"
        "nan,y,0,c,a\n"
        "1,x,1,c,a\n"
        "2,y,0,c,b\n");
    CHECK(p.tensor.rounds_per_persona() == std::vector<std::size_t>{2, 1});
    CHECK_FALSE(p.tensor.observed(0, 0, 0));
    CHECK_FALSE(p.tensor.observed(0, 0, 1));
    CHECK(p.tensor.observed(0, 1, 0));
    CHECK_FALSE(p.tensor.observed(0, 1, 1));
    CHECK_FALSE(p.tensor.observed(1, 0, 0));
}

TEST_CASE("ingest: structural errors") {
    try {
        ingest_text("persona_id,cluster_id,round,petal_id,value\na,c1,0,x,1\na,c2,1,x,2\n");
        FAIL("expected inconsistent cluster");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::inconsistent_cluster);
    }
    try {
        ingest_text("persona_id,cluster_id,round,petal_id,value\na,c1,0,x,1\na,c1,0,x,2\n");
        FAIL("expected duplicate key");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::duplicate_key);
    }
    try {
        ingest_text("persona_id,cluster_id,round,petal_id,value\na,c1,0,x,1\na,c1,-1,y,2\n");
        FAIL("expected parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(ingest_text("persona_id,round,petal_id,value\na,0,x,1\n"), ParseError);
    CHECK_THROWS_AS(ingest_text("persona_id,cluster_id,round,petal_id,value\na,c,0,x,abc\n"), ParseError);
    CHECK_THROWS_AS(ingest_text(""), ParseError);
}

TEST_CASE("write then ingest reproduces the tensor exactly") {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 100; ++trial) {
        auto panel = owb::testing::random_panel(gen, 8, 5, 4, 0.4);
        // Non-dyadic values exercise the 17-digit rendering.
        std::vector<VoteTensor::Rounds> rows;
        std::normal_distribution<double> z(0.0, 1.0);
        for (std::size_t p = 0; p < panel.tensor.n_personas(); ++p) {
            VoteTensor::Rounds persona(panel.tensor.n_rounds(p), std::vector<double>(panel.tensor.n_petals()));
            for (std::size_t r = 0; r < persona.size(); ++r)
                for (std::size_t j = 0; j < persona[r].size(); ++j)
                    persona[r][j] = panel.tensor.observed(p, r, j) ? z(gen) / 3.0 : owb::testing::kNaN;
            rows.push_back(persona);
        }
        const VoteTensor t(panel.tensor.n_petals(), rows);
        const auto ids = synthetic_ids(t.n_personas(), t.n_petals(), panel.clusters.n_clusters());
        std::stringstream buf;
        write_votes(buf, t, panel.clusters, ids);
        const auto back = ingest(buf);
        CHECK(back.tensor == t);
        CHECK(back.tensor.rounds_per_persona() == t.rounds_per_persona());
    }
}

TEST_CASE("config files: key = value with comments, unknown keys rejected") {
    std::istringstream ok("# run\nprior_strength_persona = 3\nreplicates=100 # inline\nseed = 7\n");
    RunConfig cfg;
    apply_run_config(parse_key_values(ok), cfg);
    CHECK(cfg.pooling.prior_strength_persona == 3.0);
    CHECK(cfg.bootstrap.replicates == 100);
    CHECK(cfg.bootstrap.seed == 7);
    std::istringstream bad("nope = 1\n");
    CHECK_THROWS_AS(apply_run_config(parse_key_values(bad), cfg), ParseError);
    std::istringstream dup("seed = 1\nseed = 2\n");
    CHECK_THROWS_AS(parse_key_values(dup), ParseError);
    std::istringstream sc("n_personas = 12\nn_petals = 3\nrounds = 2, 4\nsigma_alpha2 = 0\nn_clusters = 3\n");
    const auto scenario = parse_scenario(parse_key_values(sc));
    CHECK(scenario.params.n_personas() == 12);
    CHECK(scenario.params.n_per_persona[1] == 4);
    CHECK(scenario.params.clusters.n_clusters() == 3);
    CHECK(scenario.params.sigma_alpha2 == 0.0);
}

TEST_CASE("validate lists an unobserved petal and exits with the data code") {
    TempDir dir;
    const auto votes = dir.write("v.csv",
                                 "persona_id,cluster_id,round,petal_id,value\n"
                                 "a,c,0,q1,1\na,c,0,q7,\nb,c,0,q1,2\nb,c,0,q7,nan\n");
    std::ostringstream out, err;
    CHECK(cmd_validate({votes}, out, err) == exit_data_violation);
    CHECK(err.str().find("q7") != std::string::npos);
    CHECK(out.str().find("q7,0") != std::string::npos);
    EstimateArgs est;
    est.votes = votes;
    est.output = dir.path / "e.json";
    CHECK(cmd_estimate(est, out, err) == exit_data_violation);
    CHECK_FALSE(fs::exists(est.output));
}

TEST_CASE("estimate on equal within-persona variances gives 1/N weights") {
    TempDir dir;
    std::string csv = "persona_id,cluster_id,round,petal_id,value\n";
    for (int p = 0; p < 4; ++p)
        for (int r = 0; r < 2; ++r)
            csv += "p" + std::to_string(p) + ",c" + std::to_string(p % 2) + "," + std::to_string(r) + ",q," +
                   std::to_string(p + r) + "\n";
    EstimateArgs args;
    args.votes = dir.write("v.csv", csv);
    args.output = dir.path / "est.json";
    std::ostringstream out, err;
    REQUIRE(cmd_estimate(args, out, err) == exit_ok);
    const auto j = nlohmann::json::parse(slurp(args.output));
    for (double w : j["weights"].get<std::vector<double>>()) CHECK(w == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(j["mu_hat"][0].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("impute twice with the same seed writes identical files") {
    TempDir dir;
    std::string csv = "persona_id,cluster_id,round,petal_id,value\n";
    std::mt19937_64 gen(3);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int p = 0; p < 10; ++p)
        for (int r = 0; r < 3; ++r)
            for (int j = 0; j < 4; ++j)
                csv += "p" + std::to_string(p) + ",c" + std::to_string(p % 3) + "," + std::to_string(r) + ",q" +
                       std::to_string(j) + "," + (u(gen) < 0.3 ? std::string() : format_double(z(gen))) + "\n";
    const auto votes = dir.write("v.csv", csv);
    auto run = [&](const std::string& tag, std::uint64_t seed) {
        ImputeArgs a;
        a.votes = votes;
        a.output = dir.path / ("out_" + tag + ".csv");
        a.report = dir.path / ("rep_" + tag + ".json");
        a.common.seed = seed;
        std::ostringstream out, err;
        REQUIRE(cmd_impute(a, out, err) == exit_ok);
        return slurp(a.output);
    };
    const auto first = run("a", 42), second = run("b", 42), other = run("c", 43);
    CHECK(first == second);
    CHECK(first != other);
    const auto completed = ingest(dir.path / "out_a.csv");
    CHECK(completed.tensor.fully_observed());
    const auto rep = nlohmann::json::parse(slurp(dir.path / "rep_a.json"));
    CHECK(rep["seed"].get<std::uint64_t>() == 42);
    CHECK(rep["filled_cells"].get<std::size_t>() > 0);
}

TEST_CASE("exit codes map from error categories") {
    CHECK(exit_code_for(ErrorCode::parse_error) == exit_usage);
    CHECK(exit_code_for(ErrorCode::duplicate_key) == exit_usage);
    CHECK(exit_code_for(ErrorCode::empty_petal) == exit_data_violation);
    CHECK(exit_code_for(ErrorCode::no_data_anywhere) == exit_data_violation);
    CHECK(exit_code_for(ErrorCode::invariant_failure) == exit_invariant);
    CHECK(indexed_path("dir/out.csv", 2) == fs::path("dir/out_m2.csv"));
}
