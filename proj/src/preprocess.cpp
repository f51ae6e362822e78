#include "afd/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "afd/error.hpp"

namespace afd {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<kernels::BiquadSection> design_butterworth(double cutoff_hz, double rate_hz, int order) {
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < rate_hz / 2.0))
        fail(Errc::invalid_cutoff, "cutoff must satisfy 0 < cutoff < rate/2");
    if (order < 1) fail(Errc::invalid_cutoff, "filter order must be >= 1");

    const double k = std::tan(kPi * cutoff_hz / rate_hz);  // prewarped analog cutoff
    const double k2 = k * k;
    std::vector<kernels::BiquadSection> cascade;

    const int n_pairs = order / 2;
    for (int p = 0; p < n_pairs; ++p) {
        // analog prototype pole-pair factor s^2 + 2*cos(psi)*s + 1
        double psi = kPi * (2.0 * p + 1.0) / (2.0 * order);
        double a = 2.0 * std::cos(psi);
        double n0 = 1.0 + a * k + k2;
        kernels::BiquadSection s;
        s.b0 = k2 / n0;
        s.b1 = 2.0 * k2 / n0;
        s.b2 = k2 / n0;
        s.a1 = 2.0 * (k2 - 1.0) / n0;
        s.a2 = (1.0 - a * k + k2) / n0;
        cascade.push_back(s);
    }
    if (order % 2 == 1) {
        // first-order section 1/(s + 1)
        double n0 = 1.0 + k;
        kernels::BiquadSection s;
        s.b0 = k / n0;
        s.b1 = k / n0;
        s.b2 = 0.0;
        s.a1 = (k - 1.0) / n0;
        s.a2 = 0.0;
        cascade.push_back(s);
    }
    return cascade;
}

double butterworth_magnitude(double f_hz, double cutoff_hz, double rate_hz, int order) {
    double w = std::tan(kPi * f_hz / rate_hz);
    double wc = std::tan(kPi * cutoff_hz / rate_hz);
    double ratio = w / wc;
    return 1.0 / std::sqrt(1.0 + std::pow(ratio * ratio, order));
}

UniformGrid make_grid(std::int64_t first_us, std::int64_t last_us, double rate_hz) {
    UniformGrid g;
    g.t0_us = first_us;
    g.step_us = 1e6 / rate_hz;
    double span = static_cast<double>(last_us - first_us);
    // grid point k is included iff time_at(k) <= last as doubles; the floor
    // estimate is corrected so batch and streaming admit identical points
    auto k = static_cast<std::int64_t>(std::floor(span / g.step_us));
    while (k > 0 && g.time_at(static_cast<std::size_t>(k)) > static_cast<double>(last_us)) --k;
    while (g.time_at(static_cast<std::size_t>(k + 1)) <= static_cast<double>(last_us)) ++k;
    g.size = static_cast<std::size_t>(k) + 1;
    return g;
}

CsiTrace interpolate_uniform(const CsiTrace& trace, double target_rate_hz) {
    if (trace.packets.size() < 2) fail(Errc::too_few_packets, "interpolation needs at least 2 packets");
    if (!(target_rate_hz > 0.0)) fail(Errc::bad_config, "target rate must be > 0");

    const std::size_t n_in = trace.packets.size();
    const std::size_t n_ch = trace.packets[0].samples.size() * 2;  // re and im per sample slot

    std::vector<std::int64_t> t_in(n_in);
    for (std::size_t i = 0; i < n_in; ++i) t_in[i] = trace.packets[i].t_us;

    // channel-major copy: channel 2*s holds re, 2*s+1 holds im of sample slot s
    std::vector<std::vector<double>> in(n_ch, std::vector<double>(n_in));
    for (std::size_t i = 0; i < n_in; ++i) {
        const auto& samples = trace.packets[i].samples;
        for (std::size_t s = 0; s < samples.size(); ++s) {
            in[2 * s][i] = samples[s].re;
            in[2 * s + 1][i] = samples[s].im;
        }
    }

    UniformGrid grid = make_grid(t_in.front(), t_in.back(), target_rate_hz);
    std::vector<double> grid_t(grid.size);
    std::vector<std::int64_t> bracket(grid.size);
    std::size_t b = 0;
    for (std::size_t k = 0; k < grid.size; ++k) {
        grid_t[k] = grid.time_at(k);
        while (b + 1 < n_in && static_cast<double>(t_in[b + 1]) <= grid_t[k]) ++b;
        bracket[k] = static_cast<std::int64_t>(b);
    }

    std::vector<std::vector<double>> out;
    kernels::interpolate_grid(in, t_in, bracket, grid_t, out);

    CsiTrace result;
    result.meta = trace.meta;
    result.meta.nominal_rate_hz = target_rate_hz;
    result.packets.resize(grid.size);
    const std::size_t n_slots = trace.packets[0].samples.size();
    for (std::size_t k = 0; k < grid.size; ++k) {
        CsiPacket& p = result.packets[k];
        p.t_us = grid.stamp_at(k);
        p.samples.resize(n_slots);
        for (std::size_t s = 0; s < n_slots; ++s) {
            p.samples[s].re = out[2 * s][k];
            p.samples[s].im = out[2 * s + 1][k];
        }
    }
    return result;
}

UniformSeries lowpass(const UniformSeries& series, const FilterSpec& spec) {
    if (!(spec.cutoff_hz < series.rate_hz / 2.0))
        fail(Errc::invalid_cutoff, "cutoff must be below the Nyquist rate");
    auto cascade = design_butterworth(spec.cutoff_hz, series.rate_hz, spec.order);

    UniformSeries out = series;
    std::vector<std::vector<double>> ch(1);
    ch[0] = std::move(out.values);
    kernels::filter_channels_serial(cascade, ch);
    out.values = std::move(ch[0]);
    return out;
}

CsiTrace lowpass_trace(const CsiTrace& trace, const FilterSpec& spec) {
    if (!(spec.cutoff_hz < trace.meta.nominal_rate_hz / 2.0))
        fail(Errc::invalid_cutoff, "cutoff must be below the Nyquist rate");
    auto cascade = design_butterworth(spec.cutoff_hz, trace.meta.nominal_rate_hz, spec.order);

    const std::size_t n = trace.packets.size();
    if (n == 0) return trace;
    const std::size_t n_slots = trace.packets[0].samples.size();

    std::vector<std::vector<double>> ch(n_slots * 2, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& samples = trace.packets[i].samples;
        for (std::size_t s = 0; s < n_slots; ++s) {
            ch[2 * s][i] = samples[s].re;
            ch[2 * s + 1][i] = samples[s].im;
        }
    }
    kernels::filter_channels(cascade, ch);

    CsiTrace out = trace;
    for (std::size_t i = 0; i < n; ++i) {
        auto& samples = out.packets[i].samples;
        for (std::size_t s = 0; s < n_slots; ++s) {
            samples[s].re = ch[2 * s][i];
            samples[s].im = ch[2 * s + 1][i];
        }
    }
    return out;
}

}  // namespace afd
