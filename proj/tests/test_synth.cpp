#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "afd/benchmark.hpp"
#include "afd/features.hpp"
#include "afd/segmentation.hpp"
#include "afd/synth.hpp"
#include "afd/trace.hpp"
#include "oracles.hpp"

using namespace afd;

TEST_CASE("same scenario, same seed: byte-identical traces") {
    Scenario sc;
    sc.seed = 99;
    sc.duration_ms = 8000.0;
    sc.noise_sigma = 0.03;
    sc.events.push_back({ActivityKind::walk, 1000.0, 3000.0});
    sc.events.push_back({ActivityKind::fall, 3000.0, 4200.0});

    auto [t1, g1] = generate_trace(sc);
    auto [t2, g2] = generate_trace(sc);
    CHECK(write_trace(t1) == write_trace(t2));

    // different seed differs
    sc.seed = 100;
    auto [t3, g3] = generate_trace(sc);
    CHECK(write_trace(t1) != write_trace(t3));
}

TEST_CASE("ground truth mirrors scenario events with expectation flags") {
    Scenario sc;
    sc.seed = 1;
    sc.duration_ms = 10000.0;
    sc.events.push_back({ActivityKind::fall, 4000.0, 5200.0});
    auto [trace, truth] = generate_trace(sc);
    REQUIRE(truth.events.size() == 1);
    CHECK(truth.events[0].kind == ActivityKind::fall);
    CHECK(truth.events[0].start_us == 4000000);
    CHECK(truth.events[0].end_us == 5200000);
    CHECK(truth.events[0].expect_endpoint);
}

TEST_CASE("scenario validation") {
    Scenario sc;
    sc.seed = 2;
    sc.duration_ms = 10000.0;

    SUBCASE("overlapping events") {
        sc.events.push_back({ActivityKind::walk, 1000.0, 3000.0});
        sc.events.push_back({ActivityKind::sweep, 2500.0, 4000.0});
        try {
            sc.validate();
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == Errc::overlapping_events);
        }
    }
    SUBCASE("fall not followed by still") {
        sc.events.push_back({ActivityKind::fall, 1000.0, 2200.0});
        sc.events.push_back({ActivityKind::walk, 3000.0, 5000.0});  // inside the 2 s rest
        try {
            sc.validate();
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == Errc::invalid_scenario);
        }
    }
    SUBCASE("fall too close to the trace end") {
        sc.events.push_back({ActivityKind::fall, 8500.0, 9700.0});
        CHECK_THROWS_AS(sc.validate(), Error);
    }
    SUBCASE("explicit still events inside the rest period are fine") {
        sc.events.push_back({ActivityKind::fall, 1000.0, 2200.0});
        sc.events.push_back({ActivityKind::still, 2200.0, 4200.0});
        sc.events.push_back({ActivityKind::walk, 4200.0, 6000.0});  // exactly at the 2 s boundary
        CHECK_NOTHROW(sc.validate());
        // motion 100 ms earlier violates the rest rule
        sc.events[1].end_ms = 4100.0;
        sc.events[2].start_ms = 4100.0;
        CHECK_THROWS_AS(sc.validate(), Error);
    }
}

TEST_CASE("scenario file round trip and validation errors") {
    Scenario sc;
    sc.seed = 3;
    sc.duration_ms = 12000.0;
    sc.noise_sigma = 0.04;
    sc.id = "roundtrip";
    sc.events.push_back({ActivityKind::walk, 500.0, 2000.0});
    sc.events.push_back({ActivityKind::lie_down, 2000.0, 4000.0});

    std::ostringstream out;
    write_scenario(sc, out);
    Scenario back = load_scenario(out.str());
    CHECK(back.seed == sc.seed);
    CHECK(back.id == sc.id);
    REQUIRE(back.events.size() == 2);
    CHECK(back.events[1].kind == ActivityKind::lie_down);

    CHECK_THROWS_AS(load_scenario(std::string{"not json"}), Error);
    CHECK_THROWS_AS(load_scenario(std::string{"{\"seed\":1}"}), Error);
    // overlapping events in the file are rejected on load
    std::string overlap = R"({"seed":1,"duration_ms":10000,"rate_hz":100,"noise_sigma":0.02,
        "events":[{"kind":"walk","start_ms":0,"end_ms":5000},{"kind":"sweep","start_ms":4000,"end_ms":6000}]})";
    try {
        load_scenario(overlap);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::overlapping_events);
    }
}

TEST_CASE("still spans are at least 20 dB below fall bursts in phase-difference variance") {
    for (std::uint64_t seed : {11ull, 12ull, 13ull, 14ull}) {
        Scenario sc;
        sc.seed = seed;
        sc.duration_ms = 14000.0;
        sc.noise_sigma = 0.05;
        sc.events.push_back({ActivityKind::fall, 4000.0, 5300.0});
        auto [trace, truth] = generate_trace(sc);

        // raw (unfiltered) per-subcarrier phase-difference variance over 200 ms
        auto subs = select_subcarriers(30, 4);
        auto diff = phase_difference_stream(trace, 0, 1, subs);
        std::vector<std::vector<double>> values(diff.size());
        for (std::size_t k = 0; k < diff.size(); ++k) values[k] = diff[k].values;

        const std::size_t w = 20;
        auto window_var_at = [&](std::size_t start) {
            double acc = 0.0;
            for (const auto& sub : values) acc += oracles::window_variance(sub, start, w);
            return acc / static_cast<double>(values.size());
        };

        double still_max = 0.0;
        for (std::size_t s = 0; s + w <= 380; ++s) still_max = std::max(still_max, window_var_at(s));
        for (std::size_t s = 560; s + w <= 1380; ++s) still_max = std::max(still_max, window_var_at(s));

        double fall_min = 1e300;
        for (std::size_t s = 400; s + w <= 530; ++s) fall_min = std::min(fall_min, window_var_at(s));

        CHECK(fall_min / still_max >= 100.0);  // >= 20 dB
    }
}

TEST_CASE("walk events never satisfy the stable predicate inside the event") {
    Scenario still_sc;
    still_sc.seed = 20;
    still_sc.duration_ms = 25000.0;
    still_sc.noise_sigma = 0.02;
    auto [still_trace, su] = generate_trace(still_sc);
    StableThreshold th = calibrate_threshold(still_trace, SegmentationParams{});

    Scenario sc;
    sc.seed = 21;
    sc.duration_ms = 20000.0;
    sc.noise_sigma = 0.02;
    sc.events.push_back({ActivityKind::walk, 1000.0, 19000.0});
    auto [trace, truth] = generate_trace(sc);

    CsiTrace pre = lowpass_trace(interpolate_uniform(trace, 100.0), FilterSpec{10.0, 2});
    auto diff = phase_difference_stream(pre, 0, 1, select_subcarriers(30, 4));
    auto stream = log_variance_stream(diff, 200.0);

    // any contiguous 1000 ms window fully inside the walk event
    const std::size_t s = 100;
    // stream index i covers trace time t0 + i/rate (t0 = 190 ms); walk is [1 s, 19 s]
    for (std::size_t t = 120; t + s < 1850; ++t) {
        double m = 0.0;
        for (std::size_t i = t; i < t + s; ++i) m += stream.log_var[i];
        CHECK(m / static_cast<double>(s) > th.delta);
    }
}

TEST_CASE("benchmark pack has the advertised composition") {
    BenchmarkPack pack = make_benchmark_pack();
    CHECK(pack.fall_events() == 230);
    CHECK(pack.fall_like_events() == 510);
    CHECK(pack.fall.size() == 23);
    CHECK(pack.sit.size() == 17);
    CHECK(pack.lie.size() == 17);
    CHECK(pack.nonfall.size() == 12);
    for (const Scenario* sc : pack.all()) CHECK_NOTHROW(sc->validate());
    // ids are unique
    std::set<std::string> ids;
    for (const Scenario* sc : pack.all()) ids.insert(sc->id);
    CHECK(ids.size() == pack.all().size());
}

TEST_CASE("committed benchmark pack files match the builder") {
#ifdef AFD_SOURCE_DIR
    BenchmarkPack pack = make_benchmark_pack();
    std::vector<const Scenario*> all = pack.all();
    all.push_back(&pack.calibration);
    for (const Scenario* sc : all) {
        std::string path = std::string(AFD_SOURCE_DIR) + "/data/benchmark/" + sc->id + ".scenario.json";
        std::ostringstream expect;
        write_scenario(*sc, expect);
        std::ifstream in(path);
        REQUIRE_MESSAGE(in.good(), path);
        std::ostringstream got;
        got << in.rdbuf();
        CHECK_MESSAGE(got.str() == expect.str(), path);
    }
#endif
}
