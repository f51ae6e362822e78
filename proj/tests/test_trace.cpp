#include <doctest.h>

#include <cmath>
#include <sstream>

#include "afd/synth.hpp"
#include "afd/trace.hpp"
#include "afd/util.hpp"

using namespace afd;

namespace {

CsiTrace tiny_trace() {
    CsiTrace t;
    t.meta.n_links = 2;
    t.meta.n_subcarriers = 2;
    t.meta.nominal_rate_hz = 100.0;
    t.meta.trace_id = "tiny";
    for (int i = 0; i < 3; ++i) {
        CsiPacket p;
        p.t_us = i * 10000;
        p.samples = {{1.0 + i, -0.5}, {0.25, 2.0}, {-1.0, -1.0}, {0.125, 3.5}};
        t.packets.push_back(p);
    }
    return t;
}

}  // namespace

TEST_CASE("to_polar basics") {
    auto p1 = to_polar({1.0, 0.0});
    CHECK(p1.amplitude == doctest::Approx(1.0));
    CHECK(p1.phase == doctest::Approx(0.0));

    auto p2 = to_polar({0.0, 2.0});
    CHECK(p2.amplitude == doctest::Approx(2.0));
    CHECK(p2.phase == doctest::Approx(M_PI / 2));

    auto p3 = to_polar({-1.0, -1.0});
    CHECK(p3.amplitude == doctest::Approx(std::sqrt(2.0)));
    CHECK(p3.phase == doctest::Approx(-3.0 * M_PI / 4));
}

TEST_CASE("to_polar round trip identity") {
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        CsiSample s{rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
        Polar p = to_polar(s);
        CHECK(p.amplitude * std::cos(p.phase) == doctest::Approx(s.re).epsilon(1e-12));
        CHECK(p.amplitude * std::sin(p.phase) == doctest::Approx(s.im).epsilon(1e-12));
        CHECK(p.phase <= M_PI);
        CHECK(p.phase > -M_PI);
    }
    // the -pi edge maps into (-pi, pi]
    CHECK(to_polar({-1.0, -0.0}).phase == doctest::Approx(M_PI));
}

TEST_CASE("parse accepts a minimal well-formed trace") {
    std::string text =
        "{\"type\":\"header\",\"trace_id\":\"t\",\"n_links\":2,\"n_subcarriers\":30,\"rate_hz\":100}\n";
    text += "{\"t_us\":0,\"csi\":[[";
    for (int s = 0; s < 30; ++s) text += std::string(s ? "," : "") + "[1,0]";
    text += "],[";
    for (int s = 0; s < 30; ++s) text += std::string(s ? "," : "") + "[0,1]";
    text += "]]}\n";
    CsiTrace t = parse_trace(text);
    CHECK(t.packets.size() == 1);
    CHECK(t.meta.n_subcarriers == 30);
    CHECK(t.at(0, 1, 29).im == 1.0);
}

TEST_CASE("parse error cases") {
    const std::string header =
        "{\"type\":\"header\",\"trace_id\":\"t\",\"n_links\":2,\"n_subcarriers\":2,\"rate_hz\":100}\n";
    const std::string pkt = "{\"t_us\":100,\"csi\":[[[1,0],[1,0]],[[1,0],[1,0]]]}\n";

    SUBCASE("missing header") {
        CHECK_THROWS_AS(parse_trace(pkt), Error);
        try {
            parse_trace(pkt);
        } catch (const Error& e) {
            CHECK(e.code() == Errc::missing_header);
        }
        try {
            parse_trace(std::string{});
        } catch (const Error& e) {
            CHECK(e.code() == Errc::missing_header);
        }
    }
    SUBCASE("equal timestamps violate strict ordering") {
        try {
            parse_trace(header + pkt + pkt);
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == Errc::non_monotonic_timestamp);
        }
    }
    SUBCASE("subcarrier count mismatch") {
        std::string bad = "{\"t_us\":0,\"csi\":[[[1,0]],[[1,0],[1,0]]]}\n";
        try {
            parse_trace(header + bad);
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == Errc::dimension_mismatch);
        }
    }
    SUBCASE("malformed JSON line") {
        try {
            parse_trace(header + "{not json\n");
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == Errc::malformed_line);
        }
    }
}

TEST_CASE("write/parse round trip is exact") {
    CsiTrace t = tiny_trace();
    // awkward doubles that need shortest round-trip formatting
    t.packets[1].samples[2] = {0.1, 1.0 / 3.0};
    t.packets[2].samples[0] = {1e-300, -2.5e17};

    std::string s1 = write_trace(t);
    CsiTrace back = parse_trace(s1);
    REQUIRE(back.packets.size() == t.packets.size());
    CHECK(back.meta.trace_id == t.meta.trace_id);
    for (std::size_t i = 0; i < t.packets.size(); ++i) {
        CHECK(back.packets[i].t_us == t.packets[i].t_us);
        for (std::size_t s = 0; s < t.packets[i].samples.size(); ++s) {
            CHECK(back.packets[i].samples[s].re == t.packets[i].samples[s].re);
            CHECK(back.packets[i].samples[s].im == t.packets[i].samples[s].im);
        }
    }
    CHECK(write_trace(back) == s1);
}

TEST_CASE("header-only file parses to an empty trace") {
    CsiTrace t = tiny_trace();
    t.packets.clear();
    std::string s = write_trace(t);
    CsiTrace back = parse_trace(s);
    CHECK(back.packets.empty());
    CHECK(back.meta.trace_id == "tiny");
}

TEST_CASE("synthetic 1000-packet trace round-trips byte-identically") {
    Scenario sc;
    sc.seed = 42;
    sc.duration_ms = 10000.0;
    sc.noise_sigma = 0.05;
    sc.events.push_back({ActivityKind::walk, 1000.0, 9000.0});
    auto [trace, truth] = generate_trace(sc);
    REQUIRE(trace.packets.size() == 1000);

    std::string s1 = write_trace(trace);
    std::string s2 = write_trace(parse_trace(s1));
    CHECK(s1 == s2);
}

TEST_CASE("mutated files are rejected with matching errors") {
    CsiTrace t = tiny_trace();
    std::string good = write_trace(t);

    // every mutation must be rejected; fuzz by swapping/duplicating lines and
    // clobbering fields
    auto expect_reject = [](const std::string& text) {
        CHECK_THROWS_AS(parse_trace(text), Error);
    };
    // duplicate packet line (timestamp order violation)
    {
        auto pos = good.find('\n');
        auto second = good.find('\n', pos + 1);
        std::string dup = good + good.substr(pos + 1, second - pos);
        expect_reject(dup);
    }
    // drop one subcarrier cell
    {
        std::string bad = good;
        auto pos = bad.find("[[1,-0.5],");
        REQUIRE(pos != std::string::npos);
        bad.erase(pos + 1, 9);
        expect_reject(bad);
    }
    // non-finite value
    {
        std::string bad = good;
        auto pos = bad.find("2");
        bad.replace(pos, 1, "1e999");
        expect_reject(bad);
    }
}

TEST_CASE("trace validate rejects bad metadata") {
    CsiTrace t = tiny_trace();
    t.meta.n_links = 1;
    CHECK_THROWS_AS(t.validate(), Error);
}
