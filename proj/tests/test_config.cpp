#include <doctest.h>

#include "afd/config.hpp"

using namespace afd;

TEST_CASE("defaults") {
    PipelineConfig cfg;
    CHECK(cfg.preprocess.target_rate_hz == 100.0);
    CHECK(cfg.preprocess.cutoff_hz == 10.0);
    CHECK(cfg.preprocess.filter_order == 2);
    CHECK(cfg.segment.var_window_ms == 200.0);
    CHECK(cfg.segment.stable_window_ms == 1000.0);
    CHECK(cfg.segment.min_fluct_ms == 500.0);
    CHECK(cfg.segment.window_ms == 3000.0);
    CHECK_FALSE(cfg.segment.delta_override.has_value());
    CHECK(cfg.features.channels == ChannelMode::amplitude_and_phase);
    CHECK(cfg.svm.nu == 0.1);
    CHECK_FALSE(cfg.svm.gamma.has_value());
    CHECK(cfg.gamma_for_dimension(112) == 1.0 / 112.0);
    CHECK(cfg.segment_subcarriers(30) == std::vector<int>{0, 10, 19, 29});
}

TEST_CASE("parse nested config with overrides") {
    auto cfg = parse_config(R"({
        "preprocess": {"target_rate_hz": 50, "cutoff_hz": 8, "filter_order": 3},
        "segment": {"window_ms": 2900, "delta_override": -2.0, "subcarriers": [1, 5, 9]},
        "features": {"channels": "amplitude_only"},
        "svm": {"nu": 0.2, "gamma": 0.01, "grid_search": true}
    })");
    CHECK(cfg.preprocess.target_rate_hz == 50.0);
    CHECK(cfg.preprocess.cutoff_hz == 8.0);
    CHECK(cfg.preprocess.filter_order == 3);
    CHECK(cfg.segment.window_ms == 2900.0);
    CHECK(cfg.segment.delta_override == -2.0);
    CHECK(cfg.segment_subcarriers(30) == std::vector<int>{1, 5, 9});
    CHECK(cfg.features.channels == ChannelMode::amplitude_only);
    CHECK(cfg.svm.nu == 0.2);
    CHECK(cfg.gamma_for_dimension(56) == 0.01);
    CHECK(cfg.svm.grid_search);
}

TEST_CASE("unknown keys and invalid values are rejected") {
    CHECK_THROWS_AS(parse_config(R"({"preproc": {}})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"preprocess": {"cutoff": 5}})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"preprocess": {"cutoff_hz": 60}})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"svm": {"nu": 0}})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"svm": {"nu": 1.5}})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"features": {"channels": "phase_only"}})"), Error);
    CHECK_THROWS_AS(parse_config("not json"), Error);
    try {
        parse_config(R"({"svm": {"nu": 0}})");
    } catch (const Error& e) {
        CHECK(exit_code_for(e.code()) == 3);
    }
}
