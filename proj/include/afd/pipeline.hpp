#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <vector>

#include "afd/config.hpp"
#include "afd/ocsvm.hpp"
#include "afd/preprocess.hpp"
#include "afd/segmentation.hpp"
#include "afd/synth.hpp"

namespace afd {

struct Detection {
    std::int64_t t_end_us = 0;  // alarm timestamp (the transition point)
    double score = 0.0;
    std::int64_t seg_start_us = 0;
    bool truncated = false;

    bool operator==(const Detection&) const = default;
};

// interpolate to the target rate, then lowpass every re/im channel
CsiTrace preprocess_trace(const CsiTrace& raw, const PipelineConfig& cfg);

// preprocess -> phase diff -> variance -> endpoints -> segments -> features
// -> standardize -> decision. One Detection per segment classified fall.
std::vector<Detection> run_detector(const CsiTrace& raw, const PipelineConfig& cfg, const StableThreshold& th,
                                    const OcSvmModel& model);

// Incremental detector; feeding the same packets in any chunking yields
// bit-identical detections to run_detector.
class StreamingDetector {
public:
    StreamingDetector(const TraceMeta& meta, const PipelineConfig& cfg, const StableThreshold& th,
                      const OcSvmModel& model);

    void push(const CsiPacket& packet);
    void push_chunk(const std::vector<CsiPacket>& packets);
    const std::vector<Detection>& detections() const { return detections_; }
    std::vector<Detection> finish() { return detections_; }

private:
    void emit_grid_packet(const CsiPacket& prev, const CsiPacket& next, double g);
    void process_grid_values(std::int64_t t_us, const std::vector<double>& values);
    void on_transition(std::size_t flag_index);

    PipelineConfig cfg_;
    StableThreshold th_;
    const OcSvmModel* model_;
    TraceMeta meta_;
    std::vector<int> subs_;
    double delta_ = 0.0;

    // interpolation
    bool have_first_ = false;
    CsiPacket prev_packet_;
    std::int64_t grid_t0_us_ = 0;
    double step_us_ = 0.0;
    std::size_t next_grid_k_ = 0;

    // filtering
    std::vector<BiquadCascade> filters_;  // per channel (2 per sample slot)
    std::vector<double> scratch_;

    // per selected subcarrier / link
    std::vector<std::vector<double>> amp_;    // [link*subs + k][t]
    std::vector<std::vector<double>> phase_;  // same layout
    std::vector<std::vector<double>> diff_;   // [k][t]
    std::vector<std::int64_t> stamps_;

    std::vector<double> log_var_;
    std::size_t var_w_ = 0;
    std::size_t stable_s_ = 0;
    std::size_t fluct_f_ = 0;
    std::size_t win_samples_ = 0;
    std::size_t next_flag_ = 0;

    // transition state machine (mirrors detect_endpoint_indices)
    std::size_t nonstable_run_ = 0;
    bool prev_stable_ = false;
    bool have_prev_emit_ = false;
    std::size_t prev_emit_ = 0;

    std::vector<Detection> detections_;
};

// -------- evaluation -----------------------------------------------------

struct EvalEventOutcome {
    ActivityKind kind = ActivityKind::still;
    std::int64_t end_us = 0;
    bool is_fall_event = false;
    bool is_fall_like = false;
    bool matched = false;
    std::int64_t detection_t_us = 0;
    double score = 0.0;
};

// FPR denominator: segmented non-fall (fall-like) candidates — only
// candidates can raise an alarm, so they are the trial unit.
struct EvalReport {
    double fdr = 0.0;
    double fpr = 0.0;
    int matched = 0;
    int missed = 0;
    int false_alarms = 0;
    int rejected_nonfall = 0;
    std::vector<EvalEventOutcome> per_event;
};

EvalReport evaluate(const std::vector<Detection>& detections, const GroundTruth& truth,
                    double match_tol_ms = 500.0);

// Aggregates counts over many traces into one report.
class EvalAccumulator {
public:
    void add(const std::vector<Detection>& detections, const GroundTruth& truth, double match_tol_ms = 500.0);
    EvalReport finalize() const;

private:
    EvalReport acc_;
};

void write_report(const EvalReport& report, std::ostream& out);

// -------- detections file -------------------------------------------------

void write_detections(const std::vector<Detection>& detections, std::ostream& out);
std::vector<Detection> read_detections(std::istream& in);
std::vector<Detection> read_detections_file(const std::string& path);
void write_detections_file(const std::vector<Detection>& detections, const std::string& path);

// -------- window-size search ------------------------------------------------

struct LabeledEndpoint {
    std::int64_t end_us = 0;
    bool is_fall = false;
};

struct CorpusEntry {
    CsiTrace preprocessed;
    std::vector<LabeledEndpoint> endpoints;
};

struct WindowSearchSpec {
    double lo_ms = 1000.0;
    double hi_ms = 5000.0;
    double step_ms = 500.0;
    double fine_step_ms = 100.0;
    int folds = 5;
    std::uint64_t split_seed = 1;
};

struct WindowScore {
    double window_ms = 0.0;
    double metric = 0.0;  // mean over folds of fdr - fpr
};

struct WindowSearchResult {
    double window_ms = 0.0;
    std::vector<WindowScore> coarse;
    std::vector<WindowScore> fine;
};

// Two-phase search: coarse sweep, then a fine sweep around the best coarse
// window. Ties break toward the smallest window.
WindowSearchResult search_window_size(const std::vector<CorpusEntry>& corpus, const WindowSearchSpec& spec,
                                      const PipelineConfig& cfg);

// -------- hyperparameter grid search -----------------------------------------

struct GridSearchResult {
    double nu = 0.1;
    double gamma = 0.0;
    double metric = 0.0;
};

GridSearchResult grid_search_svm(const std::vector<FeatureVector>& falls_raw,
                                 const std::vector<FeatureVector>& nonfalls_raw, const std::vector<double>& nus,
                                 const std::vector<double>& gammas, int folds, std::uint64_t split_seed);

}  // namespace afd
