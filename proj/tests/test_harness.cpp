#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "beamsm/beamsm.hpp"

using namespace beamsm;
using Catch::Matchers::WithinAbs;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("beamsm_test_" + name);
    fs::remove_all(dir);
    return dir;
}

json small_config() {
    return json::parse(R"({
      "scenario": {"num_elements": 8, "num_users": 3, "inr_db": 20, "num_snapshots": 40},
      "algorithms": [
        {"name": "mvdr"},
        {"name": "fr_rls"},
        {"name": "fr_sm_rls", "label": "fr_sm", "bound": {"mode": "fixed", "fixed_value": 1.0}},
        {"name": "jio_sm_rls", "rank": 3}
      ],
      "runs": 3, "base_seed": 11, "threads": 2
    })");
}
} // namespace

TEST_CASE("output_sinr examples") {
    Scenario s;
    s.geometry = {64, 0.5};
    s.noise_power = 1.0;
    s.sources = {{std::numbers::pi / 2, 10.0}};
    const auto a = steering_vector(s.geometry, s.sources[0].doa);
    // w = a: signal 10 * 64^2, noise 64
    CHECK_THAT(output_sinr(a, s), WithinAbs(10.0 * std::log10(640.0), 1e-10));
    CHECK_THAT(output_sinr(a, s), WithinAbs(28.06, 5e-3));

    const auto split = covariance_split(s);
    for (cdouble c : {cdouble(3.0), cdouble(0.0, -2.0), cdouble(1e-3, 5.0)})
        CHECK_THAT(output_sinr(c * a, split), WithinAbs(output_sinr(a, split), 1e-10));

    // (1, -1) is orthogonal to the broadside response (1, 1)
    Scenario two;
    two.geometry = {2, 0.5};
    two.noise_power = 1.0;
    two.sources = {{std::numbers::pi / 2, 1.0}};
    CHECK(output_sinr(CVector{1.0, -1.0}, two) == -std::numeric_limits<double>::infinity());

    CHECK_THROWS_AS(output_sinr(CVector(64), s), UndefinedSinrError);
}

TEST_CASE("config parsing rejects bad input") {
    auto unknown = small_config();
    unknown["algorithms"][1]["bound"] = {{"alhpa", 3}};
    CHECK_THROWS_AS(parse_config(unknown), ConfigError);

    auto top = small_config();
    top["run"] = 5;
    CHECK_THROWS_AS(parse_config(top), ConfigError);

    auto empty = small_config();
    empty["algorithms"] = json::array();
    CHECK_THROWS_AS(parse_config(empty), ConfigError);

    auto dup = small_config();
    dup["algorithms"][2]["label"] = "mvdr";
    CHECK_THROWS_AS(parse_config(dup), ConfigError);

    auto bad_alpha = small_config();
    bad_alpha["algorithms"][3]["bound"] = {{"alpha", 0.5}};
    CHECK_THROWS_AS(parse_config(bad_alpha), ConfigError);

    CHECK_NOTHROW(parse_config(small_config()));
}

TEST_CASE("apply_param addresses root and algorithm keys") {
    auto j = small_config();
    apply_param(j, "scenario.snr_db", 5.0);
    CHECK(j["scenario"]["snr_db"] == 5.0);
    apply_param(j, "runs", 2);
    CHECK(j["runs"] == 2);
    apply_param(j, "bound.alpha", 10.0);
    for (const auto& a : j["algorithms"]) CHECK(a["bound"]["alpha"] == 10.0);
    apply_param(j, "rank", 2);
    const auto cfg = parse_config(j);
    CHECK(cfg.algorithms[3].rank == 2);
    CHECK(cfg.algorithms[2].bound.alpha == 10.0);
    CHECK(cfg.scenario.snr_db == 5.0);
    CHECK_THROWS_AS(apply_param(j, "bound..alpha", 1.0), ConfigError);
}

TEST_CASE("csv layout for one algorithm, one run, three snapshots") {
    auto j = json::parse(R"({"scenario": {"num_elements": 4, "num_users": 2, "num_snapshots": 3},
                            "algorithms": [{"name": "fr_rls"}], "runs": 1})");
    const auto result = run_experiment(parse_config(j));
    const auto dir = scratch("layout");
    const auto paths = write_csv(result, dir);

    const auto rows = read_trace_csv(paths.trace);
    REQUIRE(rows.size() == 3);
    std::istringstream trace(slurp(paths.trace));
    std::string line;
    std::getline(trace, line);
    CHECK(line == "algorithm,run,snapshot,sinr_db,updated,lambda1,delta");
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(rows[i].algorithm == "fr_rls");
        CHECK(rows[i].run == 0);
        CHECK(rows[i].snapshot == i + 1);
        CHECK(rows[i].record.updated);
    }
    std::istringstream summary(slurp(paths.summary));
    std::getline(summary, line);
    CHECK(line == "algorithm,mean_update_rate,final_sinr_db");
    std::getline(summary, line);
    CHECK(line.rfind("fr_rls,1,", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("csv values round-trip exactly") {
    const auto result = run_experiment(parse_config(small_config()));
    const auto dir = scratch("roundtrip");
    const auto paths = write_csv(result, dir);
    const auto rows = read_trace_csv(paths.trace);
    std::size_t i = 0;
    for (const auto& alg : result.algorithms)
        for (const auto& run : alg.runs)
            for (const auto& rec : run.snapshots) {
                REQUIRE(i < rows.size());
                CHECK(rows[i].algorithm == alg.config.label);
                CHECK(rows[i].record.sinr_db == rec.sinr_db);
                CHECK(rows[i].record.lambda1 == rec.lambda1);
                CHECK(rows[i].record.delta == rec.delta);
                CHECK(rows[i].record.updated == rec.updated);
                ++i;
            }
    CHECK(i == rows.size());
    for (double v : {0.1, 1.0 / 3.0, -28.06, 1e-300, 12345.678})
        CHECK(parse_number(format_number(v)) == v);
    fs::remove_all(dir);
}

TEST_CASE("experiments are deterministic, independent of thread count") {
    auto one = small_config();
    one["threads"] = 1;
    const auto a = run_experiment(parse_config(small_config()));
    const auto b = run_experiment(parse_config(one));
    const auto da = scratch("det_a"), db = scratch("det_b");
    const auto pa = write_csv(a, da);
    const auto pb = write_csv(b, db);
    CHECK(slurp(pa.trace) == slurp(pb.trace));
    CHECK(slurp(pa.summary) == slurp(pb.summary));
    fs::remove_all(da);
    fs::remove_all(db);
}

TEST_CASE("run results follow the seeding and counting rules") {
    const auto cfg = parse_config(small_config());
    const auto result = run_experiment(cfg);

    const auto& mvdr = result.by_label("mvdr");
    for (const auto& run : mvdr.runs) {
        CHECK(run.update_count == 0);
        for (const auto& rec : run.snapshots) CHECK(rec.sinr_db == run.snapshots.front().sinr_db);
    }

    for (const auto& alg : result.algorithms) {
        REQUIRE(alg.runs.size() == cfg.runs);
        std::size_t updates = 0;
        for (std::size_t k = 0; k < alg.runs.size(); ++k) {
            CHECK(alg.runs[k].run == k);
            CHECK(alg.runs[k].seed == cfg.base_seed + k);
            std::size_t counted = 0;
            for (const auto& rec : alg.runs[k].snapshots) counted += rec.updated;
            CHECK(counted == alg.runs[k].update_count);
            updates += counted;
        }
        const double expect = static_cast<double>(updates) / static_cast<double>(cfg.runs * cfg.scenario.num_snapshots);
        CHECK_THAT(alg.mean_update_rate, WithinAbs(expect, 1e-15));
        CHECK(alg.mean_sinr_db.size() == cfg.scenario.num_snapshots);
    }
    CHECK(result.by_label("fr_rls").mean_update_rate == 1.0);
}

TEST_CASE("run_single is reproducible for equal seeds") {
    const auto cfg = parse_config(small_config());
    const auto scen = realize_scenario(cfg.scenario, 5);
    const auto cov = covariance_split(scen);
    const auto& alg = cfg.algorithms[3];
    const auto a = run_single(alg, scen, cov, 5);
    const auto b = run_single(alg, scen, cov, 5);
    const auto c = run_single(alg, realize_scenario(cfg.scenario, 6), covariance_split(realize_scenario(cfg.scenario, 6)), 6);
    CHECK(a.final_weight == b.final_weight);
    CHECK_FALSE(a.final_weight == c.final_weight);
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) CHECK(a.snapshots[i].sinr_db == b.snapshots[i].sinr_db);
}

TEST_CASE("interferer directions respect the guard band") {
    ScenarioConfig sc;
    sc.num_elements = 16;
    sc.num_users = 10;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto s = realize_scenario(sc, seed);
        REQUIRE(s.sources.size() == 10);
        for (std::size_t k = 1; k < s.sources.size(); ++k)
            CHECK(std::abs(s.sources[k].doa - s.sources[0].doa) > deg_to_rad(sc.doa_guard_deg));
    }
}
