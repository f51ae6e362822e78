#include "afd/segmentation.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "afd/features.hpp"
#include "afd/kernels.hpp"
#include "afd/util.hpp"

namespace afd {

std::vector<UniformSeries> phase_difference_stream(const CsiTrace& trace, int link_a, int link_b,
                                                   const std::vector<int>& subcarriers) {
    if (link_a < 0 || link_a >= trace.meta.n_links || link_b < 0 || link_b >= trace.meta.n_links ||
        link_a == link_b)
        fail(Errc::bad_link_index, "phase difference needs two distinct valid link indices");
    for (int s : subcarriers)
        if (s < 0 || s >= trace.meta.n_subcarriers)
            fail(Errc::bad_subcarrier_index, "subcarrier index out of range: " + std::to_string(s));

    const std::size_t n = trace.packets.size();
    std::vector<std::vector<double>> pa(subcarriers.size(), std::vector<double>(n));
    std::vector<std::vector<double>> pb(subcarriers.size(), std::vector<double>(n));
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t k = 0; k < subcarriers.size(); ++k) {
            pa[k][t] = to_polar(trace.at(t, link_a, subcarriers[k])).phase;
            pb[k][t] = to_polar(trace.at(t, link_b, subcarriers[k])).phase;
        }
    }
    std::vector<std::vector<double>> diff;
    kernels::phase_difference(pa, pb, diff);

    std::vector<UniformSeries> out(subcarriers.size());
    for (std::size_t k = 0; k < subcarriers.size(); ++k) {
        out[k].rate_hz = trace.meta.nominal_rate_hz;
        out[k].t0_us = trace.start_us();
        out[k].values = std::move(diff[k]);
    }
    return out;
}

namespace {

std::size_t window_samples(double window_ms, double rate_hz) {
    return static_cast<std::size_t>(std::llround(window_ms * rate_hz / 1000.0));
}

}  // namespace

PhaseDiffVarianceStream log_variance_stream(const std::vector<UniformSeries>& diff, double var_window_ms) {
    if (diff.empty()) fail(Errc::window_too_short, "no phase-difference series given");
    const double rate = diff[0].rate_hz;
    const std::size_t w = window_samples(var_window_ms, rate);
    if (w < 2) fail(Errc::window_too_short, "variance window must span at least 2 samples");

    std::vector<std::vector<double>> values(diff.size());
    for (std::size_t k = 0; k < diff.size(); ++k) values[k] = diff[k].values;

    PhaseDiffVarianceStream out;
    out.rate_hz = rate;
    out.t0_us = diff[0].t0_us + static_cast<std::int64_t>(std::llround((w - 1) * 1e6 / rate));
    kernels::sliding_log_variance(values, w, out.log_var);
    return out;
}

StableThreshold calibrate_threshold(const CsiTrace& stable_trace, const SegmentationParams& params,
                                    double cutoff_hz, int filter_order) {
    if (stable_trace.duration_ms() < 10.0 * params.var_window_ms)
        fail(Errc::trace_too_short, "calibration trace must span at least 10 variance windows");

    CsiTrace uniform = interpolate_uniform(stable_trace, stable_trace.meta.nominal_rate_hz);
    CsiTrace smooth = lowpass_trace(uniform, FilterSpec{cutoff_hz, filter_order});

    std::vector<int> subs = params.subcarriers;
    if (subs.empty()) subs = select_subcarriers(smooth.meta.n_subcarriers, 4);
    auto diff = phase_difference_stream(smooth, 0, 1, subs);
    PhaseDiffVarianceStream stream = log_variance_stream(diff, params.var_window_ms);
    if (stream.log_var.empty()) fail(Errc::trace_too_short, "calibration trace shorter than the variance window");

    double mean = 0.0;
    for (double v : stream.log_var) mean += v;
    mean /= static_cast<double>(stream.log_var.size());
    double var = 0.0;
    for (double v : stream.log_var) {
        double d = v - mean;
        var += d * d;
    }
    var /= static_cast<double>(stream.log_var.size());

    StableThreshold th;
    th.mu_stable = mean;
    th.sigma_stable = std::sqrt(var);
    th.delta = th.mu_stable + 6.0 * th.sigma_stable;
    th.var_window_ms = params.var_window_ms;
    th.stable_window_ms = params.stable_window_ms;
    return th;
}

std::vector<std::size_t> detect_endpoint_indices(const std::vector<double>& stable_mean, double delta,
                                                 std::size_t min_fluct_samples, std::size_t min_spacing_samples) {
    std::vector<std::size_t> out;
    std::size_t nonstable_run = 0;
    bool prev_stable = false;
    bool have_prev_emit = false;
    std::size_t prev_emit = 0;
    for (std::size_t t = 0; t < stable_mean.size(); ++t) {
        bool stable = stable_mean[t] <= delta;
        if (stable) {
            bool run_start = (t == 0) || !prev_stable;
            if (run_start && nonstable_run >= min_fluct_samples) {
                if (!have_prev_emit || t - prev_emit >= min_spacing_samples) {
                    out.push_back(t);
                    prev_emit = t;
                    have_prev_emit = true;
                }
            }
            nonstable_run = 0;
        } else {
            ++nonstable_run;
        }
        prev_stable = stable;
    }
    return out;
}

std::vector<std::int64_t> detect_endpoints(const PhaseDiffVarianceStream& stream, const StableThreshold& th,
                                           double min_fluct_ms) {
    const std::size_t s = window_samples(th.stable_window_ms, stream.rate_hz);
    const std::size_t f = window_samples(min_fluct_ms, stream.rate_hz);
    if (s < 1) fail(Errc::window_too_short, "stable window must span at least 1 sample");

    std::vector<double> means;
    kernels::sliding_mean(stream.log_var, s, means);

    auto indices = detect_endpoint_indices(means, th.delta, f == 0 ? 1 : f, s);
    std::vector<std::int64_t> out;
    out.reserve(indices.size());
    const double step_us = 1e6 / stream.rate_hz;
    for (std::size_t t : indices)
        out.push_back(stream.t0_us + static_cast<std::int64_t>(std::llround(static_cast<double>(t) * step_us)));
    return out;
}

ActivitySegment extract_segment(const CsiTrace& preprocessed, std::int64_t end_us, double window_ms,
                                const std::vector<int>& subcarriers) {
    if (preprocessed.packets.empty()) fail(Errc::end_out_of_range, "empty trace");
    const double rate = preprocessed.meta.nominal_rate_hz;
    const double step_us = 1e6 / rate;
    const std::int64_t t0 = preprocessed.start_us();
    const auto n = static_cast<std::int64_t>(preprocessed.packets.size());

    std::int64_t i_end = std::llround(static_cast<double>(end_us - t0) / step_us);
    if (i_end <= 0 || i_end > n) fail(Errc::end_out_of_range, "segment end is outside the trace");

    const auto win = static_cast<std::int64_t>(window_samples(window_ms, rate));
    std::int64_t i_start = i_end - win;
    bool truncated = false;
    if (i_start < 0) {
        i_start = 0;
        truncated = true;
    }

    ActivitySegment seg;
    seg.start_us = preprocessed.packets[static_cast<std::size_t>(i_start)].t_us;
    seg.end_us = end_us;
    seg.window_ms = window_ms;
    seg.rate_hz = rate;
    seg.truncated = truncated;

    for (int link = 0; link < preprocessed.meta.n_links; ++link) {
        for (int sub : subcarriers) {
            if (sub < 0 || sub >= preprocessed.meta.n_subcarriers)
                fail(Errc::bad_subcarrier_index, "subcarrier index out of range: " + std::to_string(sub));
            SegmentChannel ch;
            ch.link = link;
            ch.subcarrier = sub;
            ch.amplitude.reserve(static_cast<std::size_t>(i_end - i_start));
            ch.phase.reserve(static_cast<std::size_t>(i_end - i_start));
            for (std::int64_t i = i_start; i < i_end; ++i) {
                Polar p = to_polar(preprocessed.at(static_cast<std::size_t>(i), link, sub));
                ch.amplitude.push_back(p.amplitude);
                ch.phase.push_back(p.phase);
            }
            seg.channels.push_back(std::move(ch));
        }
    }
    return seg;
}

void write_threshold(const StableThreshold& th, std::ostream& out) {
    out << "{\"mu_stable\":" << format_double(th.mu_stable) << ",\"sigma_stable\":" << format_double(th.sigma_stable)
        << ",\"delta\":" << format_double(th.delta) << ",\"var_window_ms\":" << format_double(th.var_window_ms)
        << ",\"stable_window_ms\":" << format_double(th.stable_window_ms) << "}\n";
}

StableThreshold read_threshold(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(Errc::malformed_line, "threshold file: not a JSON object");
    StableThreshold th;
    try {
        th.mu_stable = j.at("mu_stable").get<double>();
        th.sigma_stable = j.at("sigma_stable").get<double>();
        th.delta = j.at("delta").get<double>();
        th.var_window_ms = j.at("var_window_ms").get<double>();
        th.stable_window_ms = j.at("stable_window_ms").get<double>();
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::malformed_line, std::string("threshold file: ") + e.what());
    }
    return th;
}

StableThreshold read_threshold_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io_error, "cannot open threshold file: " + path);
    return read_threshold(in);
}

void write_threshold_file(const StableThreshold& th, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io_error, "cannot write threshold file: " + path);
    write_threshold(th, out);
}

namespace {

void dump_series(std::ostream& out, const std::vector<double>& v) {
    out << '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ',';
        out << format_double(v[i]);
    }
    out << ']';
}

}  // namespace

void write_segment(const ActivitySegment& seg, std::ostream& out) {
    out << "{\"start_us\":" << seg.start_us << ",\"end_us\":" << seg.end_us
        << ",\"window_ms\":" << format_double(seg.window_ms) << ",\"rate_hz\":" << format_double(seg.rate_hz)
        << ",\"truncated\":" << (seg.truncated ? "true" : "false") << ",\"channels\":[";
    for (std::size_t c = 0; c < seg.channels.size(); ++c) {
        if (c) out << ',';
        const SegmentChannel& ch = seg.channels[c];
        out << "{\"link\":" << ch.link << ",\"subcarrier\":" << ch.subcarrier << ",\"amplitude\":";
        dump_series(out, ch.amplitude);
        out << ",\"phase\":";
        dump_series(out, ch.phase);
        out << '}';
    }
    out << "]}\n";
}

ActivitySegment read_segment(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(Errc::malformed_line, "segment file: not a JSON object");
    ActivitySegment seg;
    try {
        seg.start_us = j.at("start_us").get<std::int64_t>();
        seg.end_us = j.at("end_us").get<std::int64_t>();
        seg.window_ms = j.at("window_ms").get<double>();
        seg.rate_hz = j.at("rate_hz").get<double>();
        seg.truncated = j.at("truncated").get<bool>();
        for (const auto& cj : j.at("channels")) {
            SegmentChannel ch;
            ch.link = cj.at("link").get<int>();
            ch.subcarrier = cj.at("subcarrier").get<int>();
            ch.amplitude = cj.at("amplitude").get<std::vector<double>>();
            ch.phase = cj.at("phase").get<std::vector<double>>();
            seg.channels.push_back(std::move(ch));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::malformed_line, std::string("segment file: ") + e.what());
    }
    return seg;
}

ActivitySegment read_segment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io_error, "cannot open segment file: " + path);
    return read_segment(in);
}

void write_segment_file(const ActivitySegment& seg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io_error, "cannot write segment file: " + path);
    write_segment(seg, out);
}

}  // namespace afd
