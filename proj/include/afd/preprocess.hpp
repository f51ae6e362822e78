#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "afd/kernels.hpp"
#include "afd/trace.hpp"

namespace afd {

// Evenly sampled real series; sample k lives at t0_us + k/rate_hz.
struct UniformSeries {
    double rate_hz = 100.0;
    std::int64_t t0_us = 0;
    std::vector<double> values;
};

struct FilterSpec {
    double cutoff_hz = 10.0;
    int order = 2;  // Butterworth
};

// Butterworth lowpass as a cascade of unity-DC-gain biquads (bilinear
// transform, prewarped at the cutoff). Odd orders get one first-order section.
std::vector<kernels::BiquadSection> design_butterworth(double cutoff_hz, double rate_hz, int order);

// Exact magnitude response of the designed cascade at frequency f. This is
// the closed form against which the measured tone attenuation is checked:
// 1/sqrt(1 + (w/wc)^(2*order)) with w = tan(pi*f/fs), the frequency the
// bilinear transform maps f to.
double butterworth_magnitude(double f_hz, double cutoff_hz, double rate_hz, int order);

// Resample every re/im channel onto the uniform grid spanning
// [first, last] input timestamp. Linear, channel-independent, no
// extrapolation past the last packet.
CsiTrace interpolate_uniform(const CsiTrace& trace, double target_rate_hz);

// Causal one-pass filter; state starts at the first sample so constants pass
// through unchanged.
UniformSeries lowpass(const UniformSeries& series, const FilterSpec& spec);

// Applies the same lowpass to every re/im channel of a uniform trace.
CsiTrace lowpass_trace(const CsiTrace& trace, const FilterSpec& spec);

// Streaming per-channel filter state for the detector.
class BiquadCascade {
public:
    BiquadCascade() = default;
    explicit BiquadCascade(std::vector<kernels::BiquadSection> sections) : sections_(std::move(sections)) {}

    double step(double x) {
        if (!seeded_) {
            states_.resize(sections_.size());
            for (std::size_t s = 0; s < sections_.size(); ++s)
                states_[s] = kernels::biquad_steady_state(sections_[s], x);
            seeded_ = true;
        }
        double y = x;
        for (std::size_t s = 0; s < sections_.size(); ++s) y = kernels::biquad_step(sections_[s], states_[s], y);
        return y;
    }

private:
    std::vector<kernels::BiquadSection> sections_;
    std::vector<kernels::BiquadState> states_;
    bool seeded_ = false;
};

// Grid used by interpolate_uniform and the streaming detector: real-valued
// times t0 + k*(1e6/rate); timestamps stored as the nearest microsecond.
struct UniformGrid {
    std::int64_t t0_us = 0;
    double step_us = 10000.0;
    std::size_t size = 0;

    double time_at(std::size_t k) const { return static_cast<double>(t0_us) + static_cast<double>(k) * step_us; }
    std::int64_t stamp_at(std::size_t k) const { return static_cast<std::int64_t>(std::llround(time_at(k))); }
    std::size_t index_of(std::int64_t t_us) const {
        return static_cast<std::size_t>(std::llround((static_cast<double>(t_us - t0_us)) / step_us));
    }
};

UniformGrid make_grid(std::int64_t first_us, std::int64_t last_us, double rate_hz);

}  // namespace afd
