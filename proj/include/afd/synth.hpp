#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "afd/trace.hpp"

namespace afd {

enum class ActivityKind { fall, sit_down, lie_down, walk, stand_up, still, sweep };

const char* activity_kind_name(ActivityKind k);
ActivityKind activity_kind_from_name(const std::string& name);

// Fall and fall-like activities end in a fluctuation -> stable transition;
// those are the ones segmentation must find.
inline bool expects_endpoint(ActivityKind k) {
    return k == ActivityKind::fall || k == ActivityKind::sit_down || k == ActivityKind::lie_down;
}

struct ScenarioEvent {
    ActivityKind kind = ActivityKind::still;
    double start_ms = 0.0;
    double end_ms = 0.0;
};

struct Scenario {
    std::uint64_t seed = 0;
    double duration_ms = 10000.0;
    double rate_hz = 100.0;
    double noise_sigma = 0.02;
    std::string id;  // trace_id; empty -> "synth-<seed>"
    std::vector<ScenarioEvent> events;

    // Ordered, non-overlapping, inside [0, duration]; fall/sit/lie events are
    // followed by at least 2000 ms without further motion (post-activity rest).
    void validate() const;
};

struct TruthEvent {
    ActivityKind kind;
    std::int64_t start_us = 0;
    std::int64_t end_us = 0;
    bool expect_endpoint = false;
};

struct GroundTruth {
    std::vector<TruthEvent> events;
};

// Behavioral channel model: a fixed per-trace complex baseline per
// link x subcarrier, plus kind-specific perturbations whose inter-link phase
// difference fluctuates during activity and freezes afterwards. Complex
// Gaussian noise everywhere. Output bits depend only on the scenario.
std::pair<CsiTrace, GroundTruth> generate_trace(const Scenario& sc);

// .scenario.json / .truth.json files
Scenario load_scenario(std::istream& in);
Scenario load_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);
void write_scenario(const Scenario& sc, std::ostream& out);
void write_scenario_file(const Scenario& sc, const std::string& path);

GroundTruth load_truth_file(const std::string& path);
void write_truth(const GroundTruth& gt, std::ostream& out);
void write_truth_file(const GroundTruth& gt, const std::string& path);

// Kind-specific envelope constants (amplitudes relative to the unit-scale
// baseline, trajectory frequency ranges). Exposed so experiments can retune;
// the defaults are what the shipped benchmark uses.
struct SynthParams {
    double fall_amp = 3.0;
    double fall_f0_hz = 2.5, fall_f1_hz = 8.0;     // chirp sweep
    double sit_amp = 2.0;
    double sit_f_lo = 1.0, sit_f_hi = 4.0;         // oscillation rate range
    double sit_beta_lo = 0.9, sit_beta_hi = 2.6;   // oscillation swing, radians
    double lie_amp = 2.0;
    double lie_f_lo = 0.7, lie_f_hi = 2.2;
    double lie_beta_lo = 0.7, lie_beta_hi = 2.0;
    double walk_amp = 1.5;
    double walk_f_lo = 1.0, walk_f_hi = 1.8;
    double walk_beta_lo = 1.2, walk_beta_hi = 2.2;
    double sweep_amp = 1.2;
    double sweep_f_lo = 0.6, sweep_f_hi = 1.2;
    double sweep_beta_lo = 1.0, sweep_beta_hi = 1.8;
    double standup_amp = 2.0;
    double standup_f0_hz = 2.0, standup_f1_hz = 5.0;
    double burst_floor = 0.35;      // envelope floor inside fall/stand-up bursts
    double sustained_floor = 0.3;   // envelope floor inside walk/sweep/sit/lie
};

std::pair<CsiTrace, GroundTruth> generate_trace(const Scenario& sc, const SynthParams& params);

}  // namespace afd
