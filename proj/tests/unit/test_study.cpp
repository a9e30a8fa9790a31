#include <catch_amalgamated.hpp>

#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include <gapboot/errors.hpp>
#include <gapboot/study.hpp>

using namespace gapboot;

namespace {

StudyConfig small_config() {
    StudyConfig cfg;
    cfg.cells = {model_preset(ModelFamily::ma2, Innovation::normal, 100, 5)};
    cfg.methods = {Method::gb1, Method::gb2, Method::ss, Method::bb, Method::naive};
    cfg.runs = 12;
    cfg.truth_runs = 200;
    cfg.boot_b = 100;
    cfg.seed = 42;
    return cfg;
}

std::string csv(const StudyResult& r, bool timing = false) {
    std::ostringstream out;
    write_study_csv(r, out, timing);
    return out.str();
}

}  // namespace

TEST_CASE("method names round-trip") {
    for (auto m : {Method::gb1, Method::gb2, Method::ss, Method::bb, Method::naive}) {
        CHECK(parse_method(to_string(m)) == m);
    }
    CHECK_FALSE(parse_method("jackknife").has_value());
}

TEST_CASE("a small study summarises every method") {
    const auto result = run_study(small_config());
    REQUIRE(result.cells.size() == 1);
    const auto& cell = result.cells[0];
    CHECK(cell.error.empty());
    CHECK(cell.ell == 5);
    CHECK(cell.true_se > 0.0);
    REQUIRE(cell.methods.size() == 5);
    for (const auto& m : cell.methods) {
        CHECK(m.failures == 0);
        REQUIRE(m.differences.size() == 12);
        double sum = 0.0, sq = 0.0;
        for (double d : m.differences) {
            sum += d;
            sq += d * d;
        }
        CHECK(m.bias == Catch::Approx(sum / 12.0));
        CHECK(m.mse == Catch::Approx(sq / 12.0));
    }
    CHECK(result.failures().empty());
}

TEST_CASE("output is reproducible byte for byte") {
    const auto a = csv(run_study(small_config()));
    const auto b = csv(run_study(small_config()));
    CHECK(a == b);
    CHECK(a.rfind("model,dist,n,p,method,true_se,bias,mse,runs\n", 0) == 0);
    CHECK(a.find("ma2,normal,100,5,gb2,") != std::string::npos);
    auto other = small_config();
    other.seed = 43;
    CHECK(csv(run_study(other)) != a);
}

TEST_CASE("timing adds a column") {
    auto cfg = small_config();
    cfg.methods = {Method::naive};
    const auto text = csv(run_study(cfg), true);
    CHECK(text.rfind("model,dist,n,p,method,true_se,bias,mse,runs,runtime_ms\n", 0) == 0);
}

TEST_CASE("json output parses and carries the differences") {
    auto cfg = small_config();
    cfg.methods = {Method::gb2};
    std::ostringstream out;
    write_study_json(run_study(cfg), out);
    const auto doc = nlohmann::json::parse(out.str());
    CHECK(doc["config"]["seed"] == 42);
    CHECK(doc["cells"][0]["methods"][0]["differences"].size() == 12);
}

TEST_CASE("empty methods skip the cell, runtime errors are recorded per cell") {
    auto cfg = small_config();
    cfg.methods.clear();
    const auto skipped = run_study(cfg);
    CHECK(skipped.cells[0].methods.empty());
    CHECK(skipped.cells[0].true_se == 0.0);

    cfg = small_config();
    cfg.truth_runs = 10;
    const auto bad = run_study(cfg);
    CHECK_FALSE(bad.cells[0].error.empty());
    CHECK(bad.failures().size() == 1);

    cfg = small_config();
    cfg.block_len = 20;
    cfg.methods = {Method::ss, Method::naive};
    const auto partial = run_study(cfg);
    CHECK(partial.cells[0].methods[0].failures == 12);
    CHECK(partial.cells[0].methods[1].failures == 0);
}

TEST_CASE("config parsing") {
    const auto cfg = study_config_from_json(R"({
        "seed": 5, "runs": 10, "truth_runs": 300, "methods": ["gb1", "bb"], "degenerate_corr": "zero",
        "cells": [{"model": "mar", "dist": "exponential", "n": 200, "p": 5, "sigma0": "identity", "gap": 10}]
    })");
    CHECK(cfg.seed == 5);
    CHECK(cfg.runs == 10);
    CHECK(cfg.policy == DegeneratePolicy::zero);
    REQUIRE(cfg.methods.size() == 2);
    REQUIRE(cfg.cells.size() == 1);
    CHECK(cfg.cells[0].family == ModelFamily::mar);
    CHECK(cfg.cells[0].covariance == CovarianceChoice::identity);
    CHECK(cfg.cells[0].gap_q == 10);

    CHECK_THROWS_AS(study_config_from_json("{"), ConfigError);
    CHECK_THROWS_AS(study_config_from_json("[]"), ConfigError);
    CHECK_THROWS_AS(study_config_from_json(R"({"methods": ["x"]})"), ConfigError);
    CHECK_THROWS_AS(study_config_from_json(R"({"runs": "many"})"), ConfigError);
    CHECK_THROWS_AS(study_config_from_json(R"({"cells": [{"model": "ar2", "n": 201, "p": 5}]})"), ConfigError);
    CHECK_THROWS_AS(study_config_from_json(R"({"degenerate_corr": "ignore"})"), ConfigError);
}
