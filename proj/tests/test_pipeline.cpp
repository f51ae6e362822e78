#include <doctest.h>

#include <cmath>
#include <sstream>

#include "afd/benchmark.hpp"
#include "afd/pipeline.hpp"
#include "afd/util.hpp"

using namespace afd;

namespace {

struct Fixture {
    PipelineConfig cfg;
    StableThreshold th;
    OcSvmModel model;

    Fixture() {
        Scenario still_sc;
        still_sc.seed = 81;
        still_sc.duration_ms = 25000.0;
        still_sc.noise_sigma = 0.02;
        auto [still_trace, su] = generate_trace(still_sc);
        SegmentationParams params;
        params.var_window_ms = cfg.segment.var_window_ms;
        params.stable_window_ms = cfg.segment.stable_window_ms;
        th = calibrate_threshold(still_trace, params, cfg.preprocess.cutoff_hz, cfg.preprocess.filter_order);

        // small training set of synthetic falls
        std::vector<FeatureVector> falls;
        for (std::uint64_t seed = 300; seed < 312; ++seed) {
            Scenario sc = fall_scenario(seed);
            auto [trace, truth] = generate_trace(sc);
            CsiTrace pre = preprocess_trace(trace, cfg);
            auto subs = cfg.segment_subcarriers(pre.meta.n_subcarriers);
            auto diff = phase_difference_stream(pre, 0, 1, subs);
            auto stream = log_variance_stream(diff, th.var_window_ms);
            auto eps = detect_endpoints(stream, th, cfg.segment.min_fluct_ms);
            for (std::int64_t e : eps) {
                ActivitySegment seg = extract_segment(pre, e, cfg.segment.window_ms, subs);
                falls.push_back(extract_features(seg, cfg.features.channels));
            }
        }
        REQUIRE(falls.size() >= 10);
        model = train_on_raw(falls, cfg.svm.nu, cfg.gamma_for_dimension(static_cast<int>(falls[0].values.size())));
    }

    static Scenario fall_scenario(std::uint64_t seed) {
        Rng rng(splitmix64(seed));
        Scenario sc;
        sc.seed = seed;
        sc.noise_sigma = 0.02;
        double walk_start = 1500.0 + rng.uniform(0.0, 400.0);
        double fall_start = walk_start + 1600.0 + rng.uniform(0.0, 400.0);
        double fall_end = fall_start + 1100.0 + rng.uniform(0.0, 300.0);
        sc.events.push_back({ActivityKind::walk, walk_start, fall_start});
        sc.events.push_back({ActivityKind::fall, fall_start, fall_end});
        sc.duration_ms = fall_end + 3000.0;
        return sc;
    }
};

}  // namespace

TEST_CASE("still-only trace produces no detections") {
    Fixture fx;
    Scenario sc;
    sc.seed = 90;
    sc.duration_ms = 12000.0;
    sc.noise_sigma = 0.02;
    auto [trace, truth] = generate_trace(sc);
    CHECK(run_detector(trace, fx.cfg, fx.th, fx.model).empty());
}

TEST_CASE("benchmark fall scenario: one detection within 500 ms of the scripted end") {
    Fixture fx;
    Scenario sc = Fixture::fall_scenario(11);
    auto [trace, truth] = generate_trace(sc);
    auto dets = run_detector(trace, fx.cfg, fx.th, fx.model);
    REQUIRE(dets.size() == 1);
    std::int64_t fall_end = truth.events[1].end_us;
    CHECK(std::llabs(dets[0].t_end_us - fall_end) <= 500000);
    CHECK(dets[0].score >= 0.0);
}

TEST_CASE("batch and chunked streaming produce identical detections") {
    Fixture fx;
    for (std::uint64_t seed : {11ull, 412ull, 413ull}) {
        Scenario sc = Fixture::fall_scenario(seed);
        auto [trace, truth] = generate_trace(sc);
        auto batch = run_detector(trace, fx.cfg, fx.th, fx.model);

        StreamingDetector sd(trace.meta, fx.cfg, fx.th, fx.model);
        std::vector<CsiPacket> chunk;
        for (const auto& p : trace.packets) {
            chunk.push_back(p);
            if (chunk.size() == 64) {
                sd.push_chunk(chunk);
                chunk.clear();
            }
        }
        sd.push_chunk(chunk);
        auto streamed = sd.finish();

        REQUIRE(batch.size() == streamed.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            CHECK(batch[i].t_end_us == streamed[i].t_end_us);
            CHECK(batch[i].score == streamed[i].score);  // bitwise
            CHECK(batch[i].seg_start_us == streamed[i].seg_start_us);
        }
    }
}

TEST_CASE("no two detections within the stable window of each other") {
    Fixture fx;
    // several falls in one trace
    Scenario sc;
    sc.seed = 95;
    sc.noise_sigma = 0.02;
    double t = 1000.0;
    for (int i = 0; i < 4; ++i) {
        double walk_end = t + 1800.0;
        sc.events.push_back({ActivityKind::walk, t, walk_end});
        double fall_end = walk_end + 1200.0;
        sc.events.push_back({ActivityKind::fall, walk_end, fall_end});
        t = fall_end + 2800.0;
    }
    sc.duration_ms = t + 1000.0;
    auto [trace, truth] = generate_trace(sc);
    auto dets = run_detector(trace, fx.cfg, fx.th, fx.model);
    for (std::size_t i = 1; i < dets.size(); ++i)
        CHECK(dets[i].t_end_us - dets[i - 1].t_end_us >=
              static_cast<std::int64_t>(fx.cfg.segment.stable_window_ms * 1000));
}

TEST_CASE("evaluate: exact matches, misses, false alarms") {
    GroundTruth truth;
    truth.events.push_back({ActivityKind::fall, 1000000, 2000000, true});
    truth.events.push_back({ActivityKind::sit_down, 5000000, 6000000, true});
    truth.events.push_back({ActivityKind::fall, 9000000, 10000000, true});
    truth.events.push_back({ActivityKind::walk, 11000000, 12000000, false});

    SUBCASE("detections exactly at every fall end, none elsewhere") {
        std::vector<Detection> dets{{2000000, 1.0, 0, false}, {10000000, 0.5, 0, false}};
        EvalReport r = evaluate(dets, truth);
        CHECK(r.fdr == doctest::Approx(1.0));
        CHECK(r.fpr == doctest::Approx(0.0));
        CHECK(r.matched == 2);
        CHECK(r.missed == 0);
        CHECK(r.false_alarms == 0);
        CHECK(r.rejected_nonfall == 1);
        CHECK(r.per_event.size() == 4);
    }
    SUBCASE("no detections at all") {
        EvalReport r = evaluate({}, truth);
        CHECK(r.fdr == doctest::Approx(0.0));
        CHECK(r.false_alarms == 0);
        CHECK(r.missed == 2);
        CHECK(r.fpr == doctest::Approx(0.0));
    }
    SUBCASE("alarm at the fall-like event counts against FPR") {
        std::vector<Detection> dets{{2000000, 1.0, 0, false}, {6000100, 0.2, 0, false}};
        EvalReport r = evaluate(dets, truth);
        CHECK(r.matched == 1);
        CHECK(r.false_alarms == 1);
        CHECK(r.rejected_nonfall == 0);
        CHECK(r.fpr == doctest::Approx(1.0));
        CHECK(r.fdr == doctest::Approx(0.5));
    }
    SUBCASE("spurious detection far from any event is a false alarm") {
        std::vector<Detection> dets{{4000000, 0.1, 0, false}};
        EvalReport r = evaluate(dets, truth);
        CHECK(r.false_alarms == 1);
        CHECK(r.matched == 0);
    }
    SUBCASE("matching is independent of detection order") {
        std::vector<Detection> a{{2000100, 1.0, 0, false}, {1999900, 0.5, 0, false}, {9999800, 0.1, 0, false}};
        std::vector<Detection> b{a[2], a[0], a[1]};
        EvalReport ra = evaluate(a, truth);
        EvalReport rb = evaluate(b, truth);
        CHECK(ra.matched == rb.matched);
        CHECK(ra.false_alarms == rb.false_alarms);
        CHECK(ra.fdr == rb.fdr);
        CHECK(ra.fpr == rb.fpr);
    }
    SUBCASE("tolerance boundary") {
        std::vector<Detection> dets{{2000000 + 500000, 1.0, 0, false}, {10000000 + 500001, 1.0, 0, false}};
        EvalReport r = evaluate(dets, truth, 500.0);
        CHECK(r.matched == 1);      // first is exactly at tolerance
        CHECK(r.false_alarms == 1);  // second is 1 us beyond
    }
}

TEST_CASE("detections file round trip") {
    std::vector<Detection> dets{{123456, 0.25, 0, false}, {789012, -0.5, 0, false}};
    std::ostringstream out;
    write_detections(dets, out);
    std::istringstream in(out.str());
    auto back = read_detections(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0].t_end_us == 123456);
    CHECK(back[0].score == 0.25);
    CHECK(back[1].score == -0.5);
}

TEST_CASE("report JSON includes rates, counts and the FPR denominator note") {
    GroundTruth truth;
    truth.events.push_back({ActivityKind::fall, 1000000, 2000000, true});
    EvalReport r = evaluate({{2000000, 1.0, 0, false}}, truth);
    std::ostringstream out;
    write_report(r, out);
    std::string s = out.str();
    CHECK(s.find("\"fdr\":1") != std::string::npos);
    CHECK(s.find("fpr_denominator") != std::string::npos);
    CHECK(s.find("\"reference\"") != std::string::npos);
}

TEST_CASE("degenerate window search returns lo") {
    WindowSearchSpec spec;
    spec.lo_ms = spec.hi_ms = 2500.0;
    auto r = search_window_size({}, spec, PipelineConfig{});
    CHECK(r.window_ms == 2500.0);
}

TEST_CASE("window search needs data in every fold") {
    PipelineConfig cfg;
    WindowSearchSpec spec;
    std::vector<CorpusEntry> corpus;  // empty
    CHECK_THROWS_AS(search_window_size(corpus, spec, cfg), Error);
}

TEST_CASE("grid search returns the best cell deterministically") {
    Rng rng(71);
    std::vector<FeatureVector> falls(30), nonfalls(30);
    for (auto& v : falls) {
        v.values.resize(8);
        for (double& x : v.values) x = rng.gauss();
    }
    for (auto& v : nonfalls) {
        v.values.resize(8);
        for (double& x : v.values) x = rng.gauss() + 6.0;  // far away
    }
    auto r1 = grid_search_svm(falls, nonfalls, {0.1, 0.3}, {0.05, 0.125, 0.5}, 5, 1);
    auto r2 = grid_search_svm(falls, nonfalls, {0.1, 0.3}, {0.05, 0.125, 0.5}, 5, 1);
    CHECK(r1.nu == r2.nu);
    CHECK(r1.gamma == r2.gamma);
    CHECK(r1.metric == r2.metric);
    CHECK(r1.metric > 0.5);  // separable by construction
}
