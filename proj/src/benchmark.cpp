#include "afd/benchmark.hpp"

#include <string>

#include "afd/util.hpp"

namespace afd {

namespace {

constexpr double kPackNoiseSigma = 0.02;

// walk -> activity -> rest cycles; gaps are implicitly still
Scenario make_transition_scenario(const std::string& id, std::uint64_t seed, ActivityKind kind, int n_events,
                                  double act_lo_s, double act_hi_s) {
    Rng rng(splitmix64(seed ^ 0x5CE7A010'00000000ULL));
    Scenario sc;
    sc.id = id;
    sc.seed = seed;
    sc.noise_sigma = kPackNoiseSigma;

    double t = rng.uniform(1.0, 2.0);
    for (int i = 0; i < n_events; ++i) {
        double walk_end = t + rng.uniform(1.5, 2.1);
        sc.events.push_back({ActivityKind::walk, t * 1000.0, walk_end * 1000.0});
        double act_end = walk_end + rng.uniform(act_lo_s, act_hi_s);
        sc.events.push_back({kind, walk_end * 1000.0, act_end * 1000.0});
        t = act_end + rng.uniform(2.6, 3.6);
    }
    sc.duration_ms = (t + 1.0) * 1000.0;
    sc.validate();
    return sc;
}

Scenario make_walk_scenario(const std::string& id, std::uint64_t seed) {
    Scenario sc;
    sc.id = id;
    sc.seed = seed;
    sc.noise_sigma = kPackNoiseSigma;
    sc.duration_ms = 20000.0;
    sc.events.push_back({ActivityKind::walk, 500.0, sc.duration_ms - 50.0});
    sc.validate();
    return sc;
}

Scenario make_sweep_scenario(const std::string& id, std::uint64_t seed) {
    Rng rng(splitmix64(seed ^ 0x5CE7A020'00000000ULL));
    Scenario sc;
    sc.id = id;
    sc.seed = seed;
    sc.noise_sigma = kPackNoiseSigma;
    sc.duration_ms = 24000.0;
    double t = 400.0;
    bool swp = true;
    while (t < sc.duration_ms - 4500.0) {
        double end = t + rng.uniform(3000.0, 4000.0);
        sc.events.push_back({swp ? ActivityKind::sweep : ActivityKind::walk, t, end});
        t = end;
        swp = !swp;
    }
    sc.events.push_back({ActivityKind::walk, t, sc.duration_ms - 50.0});
    sc.validate();
    return sc;
}

// stand up, then keep moving: the burst is never followed by stillness
Scenario make_standup_scenario(const std::string& id, std::uint64_t seed) {
    Rng rng(splitmix64(seed ^ 0x5CE7A030'00000000ULL));
    Scenario sc;
    sc.id = id;
    sc.seed = seed;
    sc.noise_sigma = kPackNoiseSigma;
    sc.duration_ms = 22000.0;
    double t = 500.0;
    while (t < sc.duration_ms - 5500.0) {
        double burst_end = t + rng.uniform(800.0, 1200.0);
        sc.events.push_back({ActivityKind::stand_up, t, burst_end});
        double walk_end = burst_end + rng.uniform(3000.0, 4000.0);
        sc.events.push_back({ActivityKind::walk, burst_end, walk_end});
        t = walk_end;
    }
    sc.events.push_back({ActivityKind::walk, t, sc.duration_ms - 50.0});
    sc.validate();
    return sc;
}

Scenario make_still_scenario(const std::string& id, std::uint64_t seed, double duration_ms) {
    Scenario sc;
    sc.id = id;
    sc.seed = seed;
    sc.noise_sigma = kPackNoiseSigma;
    sc.duration_ms = duration_ms;
    sc.validate();
    return sc;
}

std::string index_name(const std::string& prefix, int i) {
    std::string n = std::to_string(i);
    if (n.size() < 2) n.insert(n.begin(), '0');
    return prefix + "-" + n;
}

}  // namespace

std::vector<const Scenario*> BenchmarkPack::all() const {
    std::vector<const Scenario*> out;
    for (const auto& s : fall) out.push_back(&s);
    for (const auto& s : sit) out.push_back(&s);
    for (const auto& s : lie) out.push_back(&s);
    for (const auto& s : nonfall) out.push_back(&s);
    return out;
}

int BenchmarkPack::fall_events() const {
    int n = 0;
    for (const auto& s : fall)
        for (const auto& e : s.events)
            if (e.kind == ActivityKind::fall) ++n;
    return n;
}

int BenchmarkPack::fall_like_events() const {
    int n = 0;
    for (const auto* s : all())
        for (const auto& e : s->events)
            if (e.kind == ActivityKind::sit_down || e.kind == ActivityKind::lie_down) ++n;
    return n;
}

BenchmarkPack make_benchmark_pack() {
    BenchmarkPack pack;
    for (int i = 0; i < 23; ++i)
        pack.fall.push_back(
            make_transition_scenario(index_name("fall", i), 1000 + i, ActivityKind::fall, 10, 1.0, 1.5));
    for (int i = 0; i < 17; ++i)
        pack.sit.push_back(
            make_transition_scenario(index_name("sit", i), 2000 + i, ActivityKind::sit_down, 15, 1.5, 2.5));
    for (int i = 0; i < 17; ++i)
        pack.lie.push_back(
            make_transition_scenario(index_name("lie", i), 3000 + i, ActivityKind::lie_down, 15, 1.5, 2.5));
    for (int i = 0; i < 4; ++i) pack.nonfall.push_back(make_walk_scenario(index_name("walk", i), 4000 + i));
    for (int i = 0; i < 4; ++i) pack.nonfall.push_back(make_sweep_scenario(index_name("sweep", i), 4100 + i));
    for (int i = 0; i < 4; ++i) pack.nonfall.push_back(make_standup_scenario(index_name("standup", i), 4200 + i));
    pack.calibration = make_still_scenario("calib", 500, 30000.0);
    return pack;
}

WindowSearchPack make_window_search_pack() {
    WindowSearchPack pack;
    for (int i = 0; i < 5; ++i)
        pack.scenarios.push_back(
            make_transition_scenario(index_name("ws-fall", i), 6000 + i, ActivityKind::fall, 8, 2.7, 3.3));
    for (int i = 0; i < 3; ++i)
        pack.scenarios.push_back(
            make_transition_scenario(index_name("ws-sit", i), 6100 + i, ActivityKind::sit_down, 8, 2.7, 3.4));
    for (int i = 0; i < 2; ++i)
        pack.scenarios.push_back(
            make_transition_scenario(index_name("ws-lie", i), 6200 + i, ActivityKind::lie_down, 8, 2.7, 3.4));
    pack.calibration = make_still_scenario("ws-calib", 600, 30000.0);
    return pack;
}

}  // namespace afd
