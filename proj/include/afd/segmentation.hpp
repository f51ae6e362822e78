#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "afd/preprocess.hpp"
#include "afd/trace.hpp"

namespace afd {

// log10 of the sliding variance of the antenna-pair phase difference,
// averaged over the selected subcarriers. This is the segmentation signal.
struct PhaseDiffVarianceStream {
    double rate_hz = 100.0;
    std::int64_t t0_us = 0;  // time of the first full trailing window
    std::vector<double> log_var;
};

struct StableThreshold {
    double delta = 0.0;  // mu_stable + 6*sigma_stable, log10-variance units
    double mu_stable = 0.0;
    double sigma_stable = 0.0;
    double var_window_ms = 200.0;
    double stable_window_ms = 1000.0;
};

struct SegmentChannel {
    int link = 0;
    int subcarrier = 0;
    std::vector<double> amplitude;
    std::vector<double> phase;  // wrapped per-link phase; features unwrap/detrend
};

// Fixed-duration window of preprocessed CSI ending at a detected
// fluctuation -> stable transition.
struct ActivitySegment {
    std::int64_t start_us = 0;
    std::int64_t end_us = 0;
    double window_ms = 3000.0;
    double rate_hz = 100.0;
    bool truncated = false;  // start clamped to trace start
    std::vector<SegmentChannel> channels;
};

struct SegmentationParams {
    double var_window_ms = 200.0;
    double stable_window_ms = 1000.0;
    double min_fluct_ms = 500.0;
    std::vector<int> subcarriers;  // empty -> evenly spread 4 (see features)
};

// Per-subcarrier wrapped phase difference between two links. Trace must be
// uniformly sampled (output of interpolate_uniform).
std::vector<UniformSeries> phase_difference_stream(const CsiTrace& trace, int link_a, int link_b,
                                                   const std::vector<int>& subcarriers);

// Trailing-window population variance per subcarrier, averaged, floored at
// 1e-12 and log10'd. Stream starts once the first full window is available.
PhaseDiffVarianceStream log_variance_stream(const std::vector<UniformSeries>& diff, double var_window_ms);

// Builds the log-variance stream of a known-still trace and freezes
// delta = mu + 6*sigma. The trace is preprocessed internally.
StableThreshold calibrate_threshold(const CsiTrace& stable_trace, const SegmentationParams& params,
                                    double cutoff_hz = 10.0, int filter_order = 2);

// Transitions from fluctuation to stability: time t is stable iff the mean of
// log_var over [t, t+stable_window) <= delta; a transition is the first sample
// of a maximal stable run preceded by >= min_fluct_ms of non-stable samples.
// Emitted transitions are strictly increasing and never closer than
// stable_window_ms (re-triggers inside one settling period are suppressed).
std::vector<std::int64_t> detect_endpoints(const PhaseDiffVarianceStream& stream, const StableThreshold& th,
                                           double min_fluct_ms = 500.0);

// Index-level state machine shared by batch and streaming paths.
std::vector<std::size_t> detect_endpoint_indices(const std::vector<double>& stable_mean, double delta,
                                                 std::size_t min_fluct_samples, std::size_t min_spacing_samples);

// Cuts [end - window, end) out of a preprocessed trace. end_us must land on
// the trace's grid; start is clamped to the trace start (truncated = true).
ActivitySegment extract_segment(const CsiTrace& preprocessed, std::int64_t end_us, double window_ms,
                                const std::vector<int>& subcarriers);

// Calibration file (JSON): mu_stable, sigma_stable, delta, window parameters.
void write_threshold(const StableThreshold& th, std::ostream& out);
StableThreshold read_threshold(std::istream& in);
StableThreshold read_threshold_file(const std::string& path);
void write_threshold_file(const StableThreshold& th, const std::string& path);

// Segment file (JSON) used by the train CLI.
void write_segment(const ActivitySegment& seg, std::ostream& out);
ActivitySegment read_segment(std::istream& in);
ActivitySegment read_segment_file(const std::string& path);
void write_segment_file(const ActivitySegment& seg, const std::string& path);

}  // namespace afd
