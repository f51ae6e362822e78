#pragma once

#include <vector>

#include "afd/synth.hpp"

namespace afd {

// The scenario pack shipped under data/benchmark/: 230 fall and 510
// fall-like events across seeded scenarios, plus motion-only traces and one
// still calibration trace. Everything is rebuilt from constants here, so the
// committed files and this builder must agree (a test checks that).
struct BenchmarkPack {
    std::vector<Scenario> fall;      // 23 scenarios x 10 falls
    std::vector<Scenario> sit;       // 17 scenarios x 15 sit_down
    std::vector<Scenario> lie;       // 17 scenarios x 15 lie_down
    std::vector<Scenario> nonfall;   // walk / sweep / stand-up chains, motion to trace end
    Scenario calibration;            // still-only trace for threshold calibration

    std::vector<const Scenario*> all() const;
    int fall_events() const;
    int fall_like_events() const;
};

BenchmarkPack make_benchmark_pack();

// Smaller corpus whose activities last about 3 s, used by the window-size
// search: the best window should land near the burst length.
struct WindowSearchPack {
    std::vector<Scenario> scenarios;
    Scenario calibration;
};

WindowSearchPack make_window_search_pack();

}  // namespace afd
