#include "afd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "afd/kernels.hpp"
#include "afd/util.hpp"

namespace afd {

namespace {

std::size_t samples_of(double ms, double rate_hz) {
    return static_cast<std::size_t>(std::llround(ms * rate_hz / 1000.0));
}

}  // namespace

CsiTrace preprocess_trace(const CsiTrace& raw, const PipelineConfig& cfg) {
    CsiTrace uniform = interpolate_uniform(raw, cfg.preprocess.target_rate_hz);
    return lowpass_trace(uniform, FilterSpec{cfg.preprocess.cutoff_hz, cfg.preprocess.filter_order});
}

std::vector<Detection> run_detector(const CsiTrace& raw, const PipelineConfig& cfg, const StableThreshold& th,
                                    const OcSvmModel& model) {
    CsiTrace pre = preprocess_trace(raw, cfg);
    const double rate = pre.meta.nominal_rate_hz;
    const auto subs = cfg.segment_subcarriers(pre.meta.n_subcarriers);

    auto diff = phase_difference_stream(pre, 0, 1, subs);
    PhaseDiffVarianceStream stream = log_variance_stream(diff, th.var_window_ms);

    const double delta = cfg.segment.delta_override.value_or(th.delta);
    const std::size_t w = samples_of(th.var_window_ms, rate);
    const std::size_t s = std::max<std::size_t>(1, samples_of(th.stable_window_ms, rate));
    const std::size_t f = std::max<std::size_t>(1, samples_of(cfg.segment.min_fluct_ms, rate));

    std::vector<double> means;
    kernels::sliding_mean(stream.log_var, s, means);
    auto flags = detect_endpoint_indices(means, delta, f, s);

    std::vector<Detection> detections;
    for (std::size_t t : flags) {
        const std::size_t p = t + w - 1;
        const std::int64_t end_us = pre.packets[p].t_us;
        ActivitySegment seg = extract_segment(pre, end_us, cfg.segment.window_ms, subs);
        FeatureVector feat = extract_features(seg, cfg.features.channels);
        DecisionResult d = decide_raw(model, feat);
        if (d.is_fall) detections.push_back({end_us, d.score, seg.start_us, seg.truncated});
    }
    return detections;
}

// -------- streaming -------------------------------------------------------

StreamingDetector::StreamingDetector(const TraceMeta& meta, const PipelineConfig& cfg, const StableThreshold& th,
                                     const OcSvmModel& model)
    : cfg_(cfg), th_(th), model_(&model), meta_(meta) {
    meta_.validate();
    const double rate = cfg_.preprocess.target_rate_hz;
    subs_ = cfg_.segment_subcarriers(meta_.n_subcarriers);
    delta_ = cfg_.segment.delta_override.value_or(th_.delta);
    step_us_ = 1e6 / rate;

    var_w_ = samples_of(th_.var_window_ms, rate);
    if (var_w_ < 2) fail(Errc::window_too_short, "variance window must span at least 2 samples");
    stable_s_ = std::max<std::size_t>(1, samples_of(th_.stable_window_ms, rate));
    fluct_f_ = std::max<std::size_t>(1, samples_of(cfg_.segment.min_fluct_ms, rate));
    win_samples_ = samples_of(cfg_.segment.window_ms, rate);

    auto cascade = design_butterworth(cfg_.preprocess.cutoff_hz, rate, cfg_.preprocess.filter_order);
    const std::size_t n_channels = 2ull * meta_.n_links * meta_.n_subcarriers;
    filters_.assign(n_channels, BiquadCascade(cascade));
    scratch_.resize(n_channels);

    amp_.assign(static_cast<std::size_t>(meta_.n_links) * subs_.size(), {});
    phase_.assign(amp_.size(), {});
    diff_.assign(subs_.size(), {});
}

void StreamingDetector::push(const CsiPacket& packet) {
    const std::size_t n_channels = scratch_.size();
    if (packet.samples.size() * 2 != n_channels)
        fail(Errc::dimension_mismatch, "packet does not match the detector's trace metadata");

    if (!have_first_) {
        have_first_ = true;
        grid_t0_us_ = packet.t_us;
        for (std::size_t s = 0; s < packet.samples.size(); ++s) {
            scratch_[2 * s] = packet.samples[s].re;
            scratch_[2 * s + 1] = packet.samples[s].im;
        }
        process_grid_values(grid_t0_us_, scratch_);
        next_grid_k_ = 1;
        prev_packet_ = packet;
        return;
    }
    if (packet.t_us <= prev_packet_.t_us)
        fail(Errc::non_monotonic_timestamp, "packets must arrive in strictly increasing time order");

    const double t_new = static_cast<double>(packet.t_us);
    const double t_prev = static_cast<double>(prev_packet_.t_us);
    while (true) {
        double g = static_cast<double>(grid_t0_us_) + static_cast<double>(next_grid_k_) * step_us_;
        if (g > t_new) break;
        double u = (g - t_prev) / (t_new - t_prev);
        for (std::size_t s = 0; s < packet.samples.size(); ++s) {
            scratch_[2 * s] = kernels::lerp(prev_packet_.samples[s].re, packet.samples[s].re, u);
            scratch_[2 * s + 1] = kernels::lerp(prev_packet_.samples[s].im, packet.samples[s].im, u);
        }
        process_grid_values(static_cast<std::int64_t>(std::llround(g)), scratch_);
        ++next_grid_k_;
    }
    prev_packet_ = packet;
}

void StreamingDetector::push_chunk(const std::vector<CsiPacket>& packets) {
    for (const auto& p : packets) push(p);
}

void StreamingDetector::process_grid_values(std::int64_t t_us, const std::vector<double>& values) {
    // per-channel causal filter, one step
    std::vector<double> filtered(values.size());
    for (std::size_t c = 0; c < values.size(); ++c) filtered[c] = filters_[c].step(values[c]);

    stamps_.push_back(t_us);
    const int n_sub = meta_.n_subcarriers;
    for (int link = 0; link < meta_.n_links; ++link) {
        for (std::size_t k = 0; k < subs_.size(); ++k) {
            const std::size_t slot = static_cast<std::size_t>(link) * n_sub + subs_[k];
            Polar p = to_polar(CsiSample{filtered[2 * slot], filtered[2 * slot + 1]});
            amp_[static_cast<std::size_t>(link) * subs_.size() + k].push_back(p.amplitude);
            phase_[static_cast<std::size_t>(link) * subs_.size() + k].push_back(p.phase);
        }
    }
    for (std::size_t k = 0; k < subs_.size(); ++k) {
        double pa = phase_[k].back();
        double pb = phase_[subs_.size() + k].back();
        diff_[k].push_back(wrap_phase(pa - pb));
    }

    const std::size_t idx = stamps_.size() - 1;
    if (idx + 1 >= var_w_) {
        std::size_t j = idx + 1 - var_w_;
        log_var_.push_back(kernels::window_log_variance(diff_, j, var_w_));
    }

    // advance the stability state machine for every flag whose full window is in
    while (log_var_.size() >= next_flag_ + stable_s_) {
        double mean = kernels::window_mean(log_var_, next_flag_, stable_s_);
        bool stable = mean <= delta_;
        if (stable) {
            bool run_start = (next_flag_ == 0) || !prev_stable_;
            if (run_start && nonstable_run_ >= fluct_f_ &&
                (!have_prev_emit_ || next_flag_ - prev_emit_ >= stable_s_)) {
                on_transition(next_flag_);
                prev_emit_ = next_flag_;
                have_prev_emit_ = true;
            }
            nonstable_run_ = 0;
        } else {
            ++nonstable_run_;
        }
        prev_stable_ = stable;
        ++next_flag_;
    }
}

void StreamingDetector::on_transition(std::size_t flag_index) {
    const std::size_t p = flag_index + var_w_ - 1;
    const bool truncated = p < win_samples_;
    const std::size_t i_start = truncated ? 0 : p - win_samples_;

    ActivitySegment seg;
    seg.start_us = stamps_[i_start];
    seg.end_us = stamps_[p];
    seg.window_ms = cfg_.segment.window_ms;
    seg.rate_hz = cfg_.preprocess.target_rate_hz;
    seg.truncated = truncated;
    for (int link = 0; link < meta_.n_links; ++link) {
        for (std::size_t k = 0; k < subs_.size(); ++k) {
            SegmentChannel ch;
            ch.link = link;
            ch.subcarrier = subs_[k];
            const auto& a = amp_[static_cast<std::size_t>(link) * subs_.size() + k];
            const auto& ph = phase_[static_cast<std::size_t>(link) * subs_.size() + k];
            ch.amplitude.assign(a.begin() + static_cast<std::ptrdiff_t>(i_start),
                                a.begin() + static_cast<std::ptrdiff_t>(p));
            ch.phase.assign(ph.begin() + static_cast<std::ptrdiff_t>(i_start),
                            ph.begin() + static_cast<std::ptrdiff_t>(p));
            seg.channels.push_back(std::move(ch));
        }
    }

    FeatureVector feat = extract_features(seg, cfg_.features.channels);
    DecisionResult d = decide_raw(*model_, feat);
    if (d.is_fall) detections_.push_back({stamps_[p], d.score, seg.start_us, seg.truncated});
}

// -------- evaluation --------------------------------------------------------

namespace {

struct MatchPair {
    std::int64_t dist;
    std::size_t event;
    std::size_t det;
};

// greedy one-to-one nearest matching; order-independent because pairs are
// ranked globally by distance with index tie-breaks
void greedy_match(const std::vector<Detection>& dets, const std::vector<std::size_t>& event_idx,
                  const GroundTruth& truth, std::int64_t tol_us, std::vector<bool>& det_used,
                  std::vector<std::int64_t>& event_match /* -1 or det index */) {
    std::vector<MatchPair> pairs;
    for (std::size_t e = 0; e < event_idx.size(); ++e) {
        const TruthEvent& ev = truth.events[event_idx[e]];
        for (std::size_t d = 0; d < dets.size(); ++d) {
            if (det_used[d]) continue;
            std::int64_t dist = std::llabs(dets[d].t_end_us - ev.end_us);
            if (dist <= tol_us) pairs.push_back({dist, e, d});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const MatchPair& a, const MatchPair& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.event != b.event) return a.event < b.event;
        return a.det < b.det;
    });
    for (const MatchPair& p : pairs) {
        if (det_used[p.det] || event_match[p.event] >= 0) continue;
        det_used[p.det] = true;
        event_match[p.event] = static_cast<std::int64_t>(p.det);
    }
}

void finalize_rates(EvalReport& r) {
    int falls = r.matched + r.missed;
    r.fdr = falls == 0 ? 1.0 : static_cast<double>(r.matched) / falls;
    int nonfall_trials = r.false_alarms + r.rejected_nonfall;
    r.fpr = nonfall_trials == 0 ? 0.0 : static_cast<double>(r.false_alarms) / nonfall_trials;
}

}  // namespace

EvalReport evaluate(const std::vector<Detection>& detections, const GroundTruth& truth, double match_tol_ms) {
    EvalAccumulator acc;
    acc.add(detections, truth, match_tol_ms);
    return acc.finalize();
}

void EvalAccumulator::add(const std::vector<Detection>& detections, const GroundTruth& truth,
                          double match_tol_ms) {
    const auto tol_us = static_cast<std::int64_t>(std::llround(match_tol_ms * 1000.0));

    std::vector<std::size_t> fall_events, fall_like_events;
    for (std::size_t i = 0; i < truth.events.size(); ++i) {
        if (truth.events[i].kind == ActivityKind::fall) fall_events.push_back(i);
        else if (truth.events[i].expect_endpoint) fall_like_events.push_back(i);
    }

    std::vector<bool> det_used(detections.size(), false);
    std::vector<std::int64_t> fall_match(fall_events.size(), -1);
    greedy_match(detections, fall_events, truth, tol_us, det_used, fall_match);
    std::vector<std::int64_t> like_match(fall_like_events.size(), -1);
    greedy_match(detections, fall_like_events, truth, tol_us, det_used, like_match);

    int matched = 0;
    for (auto m : fall_match)
        if (m >= 0) ++matched;
    int like_alarms = 0;
    for (auto m : like_match)
        if (m >= 0) ++like_alarms;
    int unmatched_dets = 0;
    for (std::size_t d = 0; d < detections.size(); ++d)
        if (!det_used[d]) ++unmatched_dets;

    acc_.matched += matched;
    acc_.missed += static_cast<int>(fall_events.size()) - matched;
    // every detection not explained by a true fall is one false alarm
    acc_.false_alarms += like_alarms + unmatched_dets;
    acc_.rejected_nonfall += static_cast<int>(fall_like_events.size()) - like_alarms;

    auto outcome_for = [&](std::size_t truth_idx, std::int64_t det_idx) {
        EvalEventOutcome o;
        const TruthEvent& ev = truth.events[truth_idx];
        o.kind = ev.kind;
        o.end_us = ev.end_us;
        o.is_fall_event = ev.kind == ActivityKind::fall;
        o.is_fall_like = ev.expect_endpoint && !o.is_fall_event;
        if (det_idx >= 0) {
            o.matched = true;
            o.detection_t_us = detections[static_cast<std::size_t>(det_idx)].t_end_us;
            o.score = detections[static_cast<std::size_t>(det_idx)].score;
        }
        return o;
    };
    std::vector<std::int64_t> match_of(truth.events.size(), -1);
    for (std::size_t e = 0; e < fall_events.size(); ++e) match_of[fall_events[e]] = fall_match[e];
    for (std::size_t e = 0; e < fall_like_events.size(); ++e) match_of[fall_like_events[e]] = like_match[e];
    for (std::size_t i = 0; i < truth.events.size(); ++i) acc_.per_event.push_back(outcome_for(i, match_of[i]));
}

EvalReport EvalAccumulator::finalize() const {
    EvalReport r = acc_;
    finalize_rates(r);
    return r;
}

void write_report(const EvalReport& report, std::ostream& out) {
    out << "{\"fdr\":" << format_double(report.fdr) << ",\"fpr\":" << format_double(report.fpr)
        << ",\"matched\":" << report.matched << ",\"missed\":" << report.missed
        << ",\"false_alarms\":" << report.false_alarms << ",\"rejected_nonfall\":" << report.rejected_nonfall
        << ",\"fpr_denominator\":\"segmented non-fall candidates (false_alarms + rejected_nonfall)\""
        << ",\"reference\":{\"fdr\":0.89,\"fpr\":0.13,"
        << "\"note\":\"published Anti-Fall operating point on human-subject recordings; reference only\"}"
        << ",\"per_event\":[";
    for (std::size_t i = 0; i < report.per_event.size(); ++i) {
        if (i) out << ',';
        const EvalEventOutcome& o = report.per_event[i];
        out << "{\"kind\":\"" << activity_kind_name(o.kind) << "\",\"end_us\":" << o.end_us
            << ",\"matched\":" << (o.matched ? "true" : "false");
        if (o.matched) out << ",\"detection_t_us\":" << o.detection_t_us << ",\"score\":" << format_double(o.score);
        out << '}';
    }
    out << "]}\n";
}

void write_detections(const std::vector<Detection>& detections, std::ostream& out) {
    out << '[';
    for (std::size_t i = 0; i < detections.size(); ++i) {
        if (i) out << ',';
        out << "{\"t_end_us\":" << detections[i].t_end_us << ",\"score\":" << format_double(detections[i].score)
            << '}';
    }
    out << "]\n";
}

std::vector<Detection> read_detections(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_array()) fail(Errc::malformed_line, "detections file: not a JSON array");
    std::vector<Detection> out;
    try {
        for (const auto& dj : j) {
            Detection d;
            d.t_end_us = dj.at("t_end_us").get<std::int64_t>();
            d.score = dj.at("score").get<double>();
            out.push_back(d);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::malformed_line, std::string("detections file: ") + e.what());
    }
    return out;
}

std::vector<Detection> read_detections_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io_error, "cannot open detections file: " + path);
    return read_detections(in);
}

void write_detections_file(const std::vector<Detection>& detections, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io_error, "cannot write detections file: " + path);
    write_detections(detections, out);
}

// -------- window-size search --------------------------------------------------

namespace {

struct CorpusItem {
    std::size_t entry;
    std::int64_t end_us;
    bool is_fall;
};

// mean over folds of (validation FDR - validation FPR)
double score_window(const std::vector<CorpusEntry>& corpus, const std::vector<CorpusItem>& items,
                    const std::vector<int>& fold_of, int folds, double window_ms, const PipelineConfig& cfg) {
    std::vector<FeatureVector> feats(items.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(items.size()); ++i) {
        const CorpusItem& item = items[static_cast<std::size_t>(i)];
        ActivitySegment seg =
            extract_segment(corpus[item.entry].preprocessed, item.end_us, window_ms,
                            cfg.segment_subcarriers(corpus[item.entry].preprocessed.meta.n_subcarriers));
        feats[static_cast<std::size_t>(i)] = extract_features(seg, cfg.features.channels);
    }

    double metric_sum = 0.0;
    for (int f = 0; f < folds; ++f) {
        std::vector<FeatureVector> train_falls;
        std::vector<std::size_t> val_items;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (fold_of[i] == f) val_items.push_back(i);
            else if (items[i].is_fall) train_falls.push_back(feats[i]);
        }
        if (train_falls.empty()) fail(Errc::insufficient_data, "a training fold has no fall endpoints");

        const int dim = static_cast<int>(train_falls[0].values.size());
        OcSvmModel model = train_on_raw(train_falls, cfg.svm.nu, cfg.gamma_for_dimension(dim));

        int val_falls = 0, val_fall_hits = 0, val_nonfalls = 0, val_false_alarms = 0;
        for (std::size_t i : val_items) {
            DecisionResult d = decide_raw(model, feats[i]);
            if (items[i].is_fall) {
                ++val_falls;
                if (d.is_fall) ++val_fall_hits;
            } else {
                ++val_nonfalls;
                if (d.is_fall) ++val_false_alarms;
            }
        }
        if (val_falls == 0 || val_nonfalls == 0)
            fail(Errc::insufficient_data, "a validation fold lacks fall or fall-like endpoints");
        metric_sum += static_cast<double>(val_fall_hits) / val_falls -
                      static_cast<double>(val_false_alarms) / val_nonfalls;
    }
    return metric_sum / folds;
}

}  // namespace

WindowSearchResult search_window_size(const std::vector<CorpusEntry>& corpus, const WindowSearchSpec& spec,
                                      const PipelineConfig& cfg) {
    WindowSearchResult result;
    if (spec.lo_ms == spec.hi_ms) {
        result.window_ms = spec.lo_ms;
        return result;
    }
    if (!(spec.lo_ms < spec.hi_ms) || !(spec.step_ms > 0.0) || !(spec.fine_step_ms > 0.0) || spec.folds < 2)
        fail(Errc::bad_config, "invalid window search range");

    std::vector<CorpusItem> items;
    for (std::size_t e = 0; e < corpus.size(); ++e)
        for (const LabeledEndpoint& ep : corpus[e].endpoints) items.push_back({e, ep.end_us, ep.is_fall});

    int n_falls = 0, n_nonfalls = 0;
    for (const auto& it : items) (it.is_fall ? n_falls : n_nonfalls)++;
    if (n_falls < spec.folds || n_nonfalls < spec.folds)
        fail(Errc::insufficient_data, "window search needs at least one fall and one fall-like endpoint per fold");

    // seeded fold assignment, fixed across all evaluated windows; falls and
    // fall-like endpoints are striped separately so every fold sees both
    std::vector<int> fold_of(items.size(), 0);
    {
        Rng rng(splitmix64(spec.split_seed ^ 0xF01D000000000000ULL));
        std::vector<std::size_t> order(items.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t i = order.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(i));
            if (j >= i) j = i - 1;
            std::swap(order[i - 1], order[j]);
        }
        int fall_counter = 0, nonfall_counter = 0;
        for (std::size_t idx : order) {
            if (items[idx].is_fall) fold_of[idx] = fall_counter++ % spec.folds;
            else fold_of[idx] = nonfall_counter++ % spec.folds;
        }
    }

    auto sweep = [&](double lo, double hi, double step, std::vector<WindowScore>& scores) {
        double best_w = lo;
        double best_m = -1e300;
        for (double w = lo; w <= hi + 1e-9; w += step) {
            double m = score_window(corpus, items, fold_of, spec.folds, w, cfg);
            scores.push_back({w, m});
            if (m > best_m) {  // strict: ties keep the smallest window
                best_m = m;
                best_w = w;
            }
        }
        return best_w;
    };

    double coarse_best = sweep(spec.lo_ms, spec.hi_ms, spec.step_ms, result.coarse);
    double fine_lo = std::max(spec.fine_step_ms, coarse_best - spec.step_ms);
    double fine_hi = coarse_best + spec.step_ms;
    result.window_ms = sweep(fine_lo, fine_hi, spec.fine_step_ms, result.fine);
    return result;
}

GridSearchResult grid_search_svm(const std::vector<FeatureVector>& falls_raw,
                                 const std::vector<FeatureVector>& nonfalls_raw, const std::vector<double>& nus,
                                 const std::vector<double>& gammas, int folds, std::uint64_t split_seed) {
    if (falls_raw.size() < static_cast<std::size_t>(folds))
        fail(Errc::insufficient_data, "grid search needs at least one fall per fold");
    if (nonfalls_raw.empty()) fail(Errc::insufficient_data, "grid search needs fall-like vectors for FPR");

    std::vector<int> fold_of(falls_raw.size());
    {
        Rng rng(splitmix64(split_seed ^ 0x96D5EA2C00000000ULL));
        std::vector<std::size_t> order(falls_raw.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t i = order.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(i));
            if (j >= i) j = i - 1;
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t r = 0; r < order.size(); ++r) fold_of[order[r]] = static_cast<int>(r) % folds;
    }

    GridSearchResult best;
    best.metric = -1e300;
    for (double nu : nus) {
        for (double gamma : gammas) {
            double metric_sum = 0.0;
            for (int f = 0; f < folds; ++f) {
                std::vector<FeatureVector> train;
                std::vector<std::size_t> val;
                for (std::size_t i = 0; i < falls_raw.size(); ++i)
                    (fold_of[i] == f ? (void)val.push_back(i) : (void)train.push_back(falls_raw[i]));
                OcSvmModel model = train_on_raw(train, nu, gamma);
                int hits = 0;
                for (std::size_t i : val)
                    if (decide_raw(model, falls_raw[i]).is_fall) ++hits;
                int fa = 0;
                for (const auto& v : nonfalls_raw)
                    if (decide_raw(model, v).is_fall) ++fa;
                metric_sum += static_cast<double>(hits) / static_cast<double>(val.size()) -
                              static_cast<double>(fa) / static_cast<double>(nonfalls_raw.size());
            }
            double metric = metric_sum / folds;
            if (metric > best.metric) {  // ties keep the first (smallest nu, then gamma)
                best = {nu, gamma, metric};
            }
        }
    }
    return best;
}

}  // namespace afd
