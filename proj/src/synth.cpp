#include "afd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "afd/error.hpp"
#include "afd/util.hpp"

namespace afd {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kRestAfterFallLikeMs = 2000.0;
}  // namespace

const char* activity_kind_name(ActivityKind k) {
    switch (k) {
        case ActivityKind::fall: return "fall";
        case ActivityKind::sit_down: return "sit_down";
        case ActivityKind::lie_down: return "lie_down";
        case ActivityKind::walk: return "walk";
        case ActivityKind::stand_up: return "stand_up";
        case ActivityKind::still: return "still";
        case ActivityKind::sweep: return "sweep";
    }
    return "still";
}

ActivityKind activity_kind_from_name(const std::string& name) {
    if (name == "fall") return ActivityKind::fall;
    if (name == "sit_down") return ActivityKind::sit_down;
    if (name == "lie_down") return ActivityKind::lie_down;
    if (name == "walk") return ActivityKind::walk;
    if (name == "stand_up") return ActivityKind::stand_up;
    if (name == "still") return ActivityKind::still;
    if (name == "sweep") return ActivityKind::sweep;
    fail(Errc::malformed_scenario, "unknown activity kind: " + name);
}

void Scenario::validate() const {
    if (!(duration_ms > 0.0) || !(rate_hz > 0.0) || noise_sigma < 0.0)
        fail(Errc::invalid_scenario, "duration and rate must be positive, noise_sigma >= 0");
    double prev_end = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const ScenarioEvent& e = events[i];
        if (!(e.start_ms < e.end_ms)) fail(Errc::invalid_scenario, "event must have start < end");
        if (e.start_ms < 0.0 || e.end_ms > duration_ms)
            fail(Errc::invalid_scenario, "event outside the scenario duration");
        if (i > 0 && e.start_ms < prev_end) fail(Errc::overlapping_events, "events overlap");
        prev_end = e.end_ms;
    }
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (!expects_endpoint(events[i].kind)) continue;
        double rest_until = events[i].end_ms + kRestAfterFallLikeMs;
        if (rest_until > duration_ms)
            fail(Errc::invalid_scenario, "fall/fall-like event needs 2000 ms of rest before the trace ends");
        for (std::size_t j = i + 1; j < events.size(); ++j) {
            if (events[j].kind == ActivityKind::still) continue;
            if (events[j].start_ms < rest_until)
                fail(Errc::invalid_scenario, "fall/fall-like event must be followed by 2000 ms of still");
            break;
        }
    }
}

namespace {

struct LinkTraj {
    double psi = 0.0;     // phase offset
    double scale = 1.0;   // per-link detune of the trajectory
    double chi = 0.0;     // oscillation phase
    double drift = 0.0;   // rad/s, sustained kinds only
};

struct EventParams {
    ActivityKind kind;
    double start_s = 0.0, end_s = 0.0;
    double amp = 0.0;
    double f0 = 0.0, f1 = 0.0;  // chirp endpoints or oscillation frequency in f0
    double beta = 0.0;          // oscillation swing
    bool rotate = false;        // chirp rotation vs bounded oscillation
    bool ramp = false;          // sit/lie ramp envelope vs burst/sustained
    std::vector<LinkTraj> links;
};

EventParams draw_event_params(const ScenarioEvent& e, std::size_t index, std::uint64_t seed, int n_links,
                              const SynthParams& sp) {
    Rng rng(splitmix64(seed ^ (0xE7E7000000000000ULL + index)));
    EventParams p;
    p.kind = e.kind;
    p.start_s = e.start_ms / 1000.0;
    p.end_s = e.end_ms / 1000.0;
    switch (e.kind) {
        case ActivityKind::fall:
            p.rotate = true;
            p.amp = sp.fall_amp * rng.uniform(0.9, 1.1);
            p.f0 = sp.fall_f0_hz * rng.uniform(0.9, 1.1);
            p.f1 = sp.fall_f1_hz * rng.uniform(0.9, 1.1);
            break;
        case ActivityKind::stand_up:
            p.rotate = true;
            p.amp = sp.standup_amp * rng.uniform(0.9, 1.1);
            p.f0 = sp.standup_f0_hz * rng.uniform(0.9, 1.1);
            p.f1 = sp.standup_f1_hz * rng.uniform(0.9, 1.1);
            break;
        case ActivityKind::sit_down:
            p.ramp = true;
            p.amp = sp.sit_amp * rng.uniform(0.85, 1.15);
            p.f0 = rng.uniform(sp.sit_f_lo, sp.sit_f_hi);
            p.beta = rng.uniform(sp.sit_beta_lo, sp.sit_beta_hi);
            break;
        case ActivityKind::lie_down:
            p.ramp = true;
            p.amp = sp.lie_amp * rng.uniform(0.85, 1.15);
            p.f0 = rng.uniform(sp.lie_f_lo, sp.lie_f_hi);
            p.beta = rng.uniform(sp.lie_beta_lo, sp.lie_beta_hi);
            break;
        case ActivityKind::walk:
            p.amp = sp.walk_amp;
            p.f0 = rng.uniform(sp.walk_f_lo, sp.walk_f_hi);
            p.beta = rng.uniform(sp.walk_beta_lo, sp.walk_beta_hi);
            break;
        case ActivityKind::sweep:
            p.amp = sp.sweep_amp;
            p.f0 = rng.uniform(sp.sweep_f_lo, sp.sweep_f_hi);
            p.beta = rng.uniform(sp.sweep_beta_lo, sp.sweep_beta_hi);
            break;
        case ActivityKind::still:
            break;
    }
    p.links.resize(n_links);
    for (auto& link : p.links) {
        link.psi = rng.uniform(-kPi, kPi);
        link.scale = rng.uniform(0.94, 1.06);
        link.chi = rng.uniform(-kPi, kPi);
        bool sustained = e.kind == ActivityKind::walk || e.kind == ActivityKind::sweep;
        link.drift = sustained ? rng.uniform(0.2, 0.6) * (rng.uniform01() < 0.5 ? -1.0 : 1.0) : 0.0;
    }
    return p;
}

double envelope_at(const EventParams& p, double tau, double dur, const SynthParams& sp) {
    double u = tau / dur;
    if (p.kind == ActivityKind::fall || p.kind == ActivityKind::stand_up) {
        double s = std::sin(kPi * u);
        return sp.burst_floor + (1.0 - sp.burst_floor) * s * s;
    }
    if (p.ramp) return sp.sustained_floor + (1.0 - sp.sustained_floor) * u;
    // sustained: raised-cosine edges of 150 ms over a floor
    constexpr double edge = 0.15;
    double m = 1.0;
    if (tau < edge) m = 0.5 * (1.0 - std::cos(kPi * tau / edge));
    else if (dur - tau < edge) m = 0.5 * (1.0 - std::cos(kPi * (dur - tau) / edge));
    return sp.sustained_floor + (1.0 - sp.sustained_floor) * m;
}

double trajectory_phase(const EventParams& p, const LinkTraj& link, double tau, double dur) {
    if (p.rotate) {
        // chirp f0 -> f1 over the event
        double f_int = p.f0 * tau + (p.f1 - p.f0) * tau * tau / (2.0 * dur);
        return link.psi + 2.0 * kPi * link.scale * f_int;
    }
    return link.psi + p.beta * link.scale * std::sin(2.0 * kPi * p.f0 * tau + link.chi) + link.drift * tau;
}

}  // namespace

std::pair<CsiTrace, GroundTruth> generate_trace(const Scenario& sc) { return generate_trace(sc, SynthParams{}); }

std::pair<CsiTrace, GroundTruth> generate_trace(const Scenario& sc, const SynthParams& params) {
    sc.validate();

    CsiTrace trace;
    trace.meta.n_links = 2;
    trace.meta.n_subcarriers = 30;
    trace.meta.nominal_rate_hz = sc.rate_hz;
    trace.meta.trace_id = sc.id.empty() ? "synth-" + std::to_string(sc.seed) : sc.id;

    const int n_links = trace.meta.n_links;
    const int n_sub = trace.meta.n_subcarriers;

    // fixed per-trace channel geometry
    Rng base_rng(splitmix64(sc.seed ^ 0xBA5E000000000000ULL));
    std::vector<double> base_re(static_cast<std::size_t>(n_links) * n_sub);
    std::vector<double> base_im(base_re.size());
    std::vector<double> sub_phase(base_re.size());  // per-subcarrier perturbation phase offset
    std::vector<double> sub_gain(base_re.size());
    for (std::size_t i = 0; i < base_re.size(); ++i) {
        double mag = base_rng.uniform(0.7, 1.5);
        double ph = base_rng.uniform(-kPi, kPi);
        base_re[i] = mag * std::cos(ph);
        base_im[i] = mag * std::sin(ph);
        sub_phase[i] = base_rng.uniform(-0.6, 0.6);
        sub_gain[i] = base_rng.uniform(0.8, 1.2);
    }

    std::vector<EventParams> events;
    events.reserve(sc.events.size());
    for (std::size_t i = 0; i < sc.events.size(); ++i)
        events.push_back(draw_event_params(sc.events[i], i, sc.seed, n_links, params));

    const std::uint64_t noise_seed = splitmix64(sc.seed ^ 0x1705E00000000000ULL);
    const auto n_packets = static_cast<std::size_t>(std::floor(sc.duration_ms / 1000.0 * sc.rate_hz));
    const double step_us = 1e6 / sc.rate_hz;

    trace.packets.resize(n_packets);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ip = 0; ip < static_cast<std::ptrdiff_t>(n_packets); ++ip) {
        const auto i = static_cast<std::size_t>(ip);
        CsiPacket& pkt = trace.packets[i];
        pkt.t_us = static_cast<std::int64_t>(std::llround(static_cast<double>(i) * step_us));
        pkt.samples.resize(static_cast<std::size_t>(n_links) * n_sub);

        const double t_s = static_cast<double>(i) / sc.rate_hz;
        const EventParams* active = nullptr;
        for (const auto& e : events) {
            if (t_s >= e.start_s && t_s < e.end_s && e.kind != ActivityKind::still) {
                active = &e;
                break;
            }
        }

        for (int l = 0; l < n_links; ++l) {
            double traj = 0.0, env = 0.0;
            if (active) {
                double dur = active->end_s - active->start_s;
                double tau = t_s - active->start_s;
                env = envelope_at(*active, tau, dur, params);
                traj = trajectory_phase(*active, active->links[static_cast<std::size_t>(l)], tau, dur);
            }
            for (int s = 0; s < n_sub; ++s) {
                const std::size_t slot = static_cast<std::size_t>(l) * n_sub + s;
                double re = base_re[slot];
                double im = base_im[slot];
                if (active) {
                    double a = active->amp * env * sub_gain[slot];
                    double ph = traj + sub_phase[slot];
                    re += a * std::cos(ph);
                    im += a * std::sin(ph);
                }
                if (sc.noise_sigma > 0.0) {
                    double g0, g1;
                    gauss_pair_at(noise_seed ^ (static_cast<std::uint64_t>(i) * 997ULL + slot), g0, g1);
                    re += sc.noise_sigma * g0;
                    im += sc.noise_sigma * g1;
                }
                pkt.samples[slot] = CsiSample{re, im};
            }
        }
    }

    GroundTruth truth;
    truth.events.reserve(sc.events.size());
    for (const auto& e : sc.events) {
        TruthEvent te;
        te.kind = e.kind;
        te.start_us = static_cast<std::int64_t>(std::llround(e.start_ms * 1000.0));
        te.end_us = static_cast<std::int64_t>(std::llround(e.end_ms * 1000.0));
        te.expect_endpoint = expects_endpoint(e.kind);
        truth.events.push_back(te);
    }
    return {std::move(trace), std::move(truth)};
}

Scenario load_scenario(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(Errc::malformed_scenario, "scenario file: not a JSON object");
    Scenario sc;
    try {
        sc.seed = j.at("seed").get<std::uint64_t>();
        sc.duration_ms = j.at("duration_ms").get<double>();
        sc.rate_hz = j.at("rate_hz").get<double>();
        sc.noise_sigma = j.at("noise_sigma").get<double>();
        sc.id = j.value("id", std::string{});
        for (const auto& ej : j.at("events")) {
            ScenarioEvent e;
            e.kind = activity_kind_from_name(ej.at("kind").get<std::string>());
            e.start_ms = ej.at("start_ms").get<double>();
            e.end_ms = ej.at("end_ms").get<double>();
            sc.events.push_back(e);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::malformed_scenario, std::string("scenario file: ") + e.what());
    }
    sc.validate();
    return sc;
}

Scenario load_scenario(const std::string& text) {
    std::istringstream in(text);
    return load_scenario(in);
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io_error, "cannot open scenario file: " + path);
    return load_scenario(in);
}

void write_scenario(const Scenario& sc, std::ostream& out) {
    out << "{\"seed\":" << sc.seed << ",\"duration_ms\":" << format_double(sc.duration_ms)
        << ",\"rate_hz\":" << format_double(sc.rate_hz) << ",\"noise_sigma\":" << format_double(sc.noise_sigma);
    if (!sc.id.empty()) out << ",\"id\":" << nlohmann::json(sc.id).dump();
    out << ",\"events\":[";
    for (std::size_t i = 0; i < sc.events.size(); ++i) {
        if (i) out << ',';
        out << "{\"kind\":\"" << activity_kind_name(sc.events[i].kind)
            << "\",\"start_ms\":" << format_double(sc.events[i].start_ms)
            << ",\"end_ms\":" << format_double(sc.events[i].end_ms) << '}';
    }
    out << "]}\n";
}

void write_scenario_file(const Scenario& sc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io_error, "cannot write scenario file: " + path);
    write_scenario(sc, out);
}

GroundTruth load_truth_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io_error, "cannot open truth file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(Errc::malformed_line, "truth file: not a JSON object");
    GroundTruth gt;
    try {
        for (const auto& ej : j.at("events")) {
            TruthEvent e;
            e.kind = activity_kind_from_name(ej.at("kind").get<std::string>());
            e.start_us = ej.at("start_us").get<std::int64_t>();
            e.end_us = ej.at("end_us").get<std::int64_t>();
            e.expect_endpoint = ej.at("expect_endpoint").get<bool>();
            gt.events.push_back(e);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::malformed_line, std::string("truth file: ") + e.what());
    }
    return gt;
}

void write_truth(const GroundTruth& gt, std::ostream& out) {
    out << "{\"events\":[";
    for (std::size_t i = 0; i < gt.events.size(); ++i) {
        if (i) out << ',';
        const TruthEvent& e = gt.events[i];
        out << "{\"kind\":\"" << activity_kind_name(e.kind) << "\",\"start_us\":" << e.start_us
            << ",\"end_us\":" << e.end_us << ",\"expect_endpoint\":" << (e.expect_endpoint ? "true" : "false")
            << '}';
    }
    out << "]}\n";
}

void write_truth_file(const GroundTruth& gt, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io_error, "cannot write truth file: " + path);
    write_truth(gt, out);
}

}  // namespace afd
