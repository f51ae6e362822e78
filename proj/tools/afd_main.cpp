// afd — Anti-Fall detector command line: simulate, calibrate, segment,
// train, detect, eval, search-window.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "afd/benchmark.hpp"
#include "afd/pipeline.hpp"
#include "afd/util.hpp"

namespace fs = std::filesystem;
using namespace afd;

namespace {

std::string default_truth_path(const std::string& out_path) {
    std::string p = out_path;
    const std::string suffix = ".csi.jsonl";
    if (p.size() > suffix.size() && p.compare(p.size() - suffix.size(), suffix.size(), suffix) == 0)
        p.erase(p.size() - suffix.size());
    return p + ".truth.json";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io_error, "cannot write: " + path);
    out << text;
}

struct CommonOpts {
    std::string config_path;
    PipelineConfig cfg;

    void load() {
        if (!config_path.empty()) cfg = load_config_file(config_path);
    }
};

int cmd_simulate(const std::string& scenario_path, const std::string& out_path, std::string truth_path) {
    Scenario sc = load_scenario_file(scenario_path);
    auto [trace, truth] = generate_trace(sc);
    write_trace_file(trace, out_path);
    if (truth_path.empty()) truth_path = default_truth_path(out_path);
    write_truth_file(truth, truth_path);
    std::cout << "wrote " << trace.packets.size() << " packets to " << out_path << " and ground truth to "
              << truth_path << "\n";
    return 0;
}

int cmd_calibrate(CommonOpts& common, const std::string& trace_path, const std::string& out_path) {
    common.load();
    CsiTrace trace = read_trace_file(trace_path);
    SegmentationParams params;
    params.var_window_ms = common.cfg.segment.var_window_ms;
    params.stable_window_ms = common.cfg.segment.stable_window_ms;
    params.subcarriers = common.cfg.segment.subcarriers;
    StableThreshold th = calibrate_threshold(trace, params, common.cfg.preprocess.cutoff_hz,
                                             common.cfg.preprocess.filter_order);
    write_threshold_file(th, out_path);
    std::cout << "delta " << th.delta << " (mu " << th.mu_stable << ", sigma " << th.sigma_stable << ") -> "
              << out_path << "\n";
    return 0;
}

int cmd_segment(CommonOpts& common, const std::string& trace_path, const std::string& threshold_path,
                std::optional<double> window_ms, const std::string& out_dir, const std::string& out_path) {
    common.load();
    if (window_ms) common.cfg.segment.window_ms = *window_ms;
    CsiTrace raw = read_trace_file(trace_path);
    StableThreshold th = read_threshold_file(threshold_path);

    CsiTrace pre = preprocess_trace(raw, common.cfg);
    auto subs = common.cfg.segment_subcarriers(pre.meta.n_subcarriers);
    auto diff = phase_difference_stream(pre, 0, 1, subs);
    auto stream = log_variance_stream(diff, th.var_window_ms);
    if (common.cfg.segment.delta_override) th.delta = *common.cfg.segment.delta_override;
    auto endpoints = detect_endpoints(stream, th, common.cfg.segment.min_fluct_ms);

    std::ostringstream out;
    out << "{\"endpoints\":[";
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
        if (i) out << ',';
        out << endpoints[i];
    }
    out << "],\"segments\":[";
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
        ActivitySegment seg = extract_segment(pre, endpoints[i], common.cfg.segment.window_ms, subs);
        if (i) out << ',';
        out << "{\"start_us\":" << seg.start_us << ",\"end_us\":" << seg.end_us
            << ",\"truncated\":" << (seg.truncated ? "true" : "false") << "}";
        if (!out_dir.empty()) {
            fs::create_directories(out_dir);
            std::string name = pre.meta.trace_id + "-" + std::to_string(i) + ".segment.json";
            write_segment_file(seg, (fs::path(out_dir) / name).string());
        }
    }
    out << "]}\n";
    if (out_path.empty()) std::cout << out.str();
    else write_text_file(out_path, out.str());
    return 0;
}

int cmd_train(CommonOpts& common, const std::string& segments_dir, const std::string& labels_path,
              const std::string& out_path) {
    common.load();
    std::ifstream lin(labels_path);
    if (!lin) fail(Errc::io_error, "cannot open labels file: " + labels_path);
    nlohmann::json lj = nlohmann::json::parse(lin, nullptr, false);
    if (lj.is_discarded() || !lj.is_object()) fail(Errc::malformed_line, "labels file: not a JSON object");

    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(segments_dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path().filename().string());
    }
    std::sort(files.begin(), files.end());

    std::vector<FeatureVector> falls, nonfalls;
    for (const std::string& name : files) {
        auto it = lj.find(name);
        if (it == lj.end()) continue;
        std::string label = it->get<std::string>();
        ActivitySegment seg = read_segment_file((fs::path(segments_dir) / name).string());
        FeatureVector f = extract_features(seg, common.cfg.features.channels);
        if (label == "fall") falls.push_back(std::move(f));
        else nonfalls.push_back(std::move(f));
    }
    if (falls.empty()) fail(Errc::empty_training_set, "no fall-labeled segments found");

    const int dim = static_cast<int>(falls[0].values.size());
    double nu = common.cfg.svm.nu;
    double gamma = common.cfg.gamma_for_dimension(dim);
    if (common.cfg.svm.grid_search) {
        if (nonfalls.empty()) fail(Errc::insufficient_data, "grid search needs non-fall segments");
        double base = 1.0 / static_cast<double>(dim);
        auto best = grid_search_svm(falls, nonfalls, {0.05, 0.1, 0.2}, {0.5 * base, base, 2.0 * base}, 5, 1);
        nu = best.nu;
        gamma = best.gamma;
        std::cout << "grid search picked nu " << nu << ", gamma " << gamma << " (metric " << best.metric << ")\n";
    }

    OcSvmModel model = train_on_raw(falls, nu, gamma);
    save_model_file(model, out_path);
    std::cout << "trained on " << falls.size() << " fall segments, " << model.support_vectors.size()
              << " support vectors -> " << out_path << "\n";
    return 0;
}

int cmd_detect(CommonOpts& common, const std::string& trace_path, const std::string& threshold_path,
               const std::string& model_path, bool stream_mode, int chunk, const std::string& out_path) {
    common.load();
    CsiTrace raw = read_trace_file(trace_path);
    StableThreshold th = read_threshold_file(threshold_path);
    OcSvmModel model = load_model_file(model_path);

    std::vector<Detection> dets;
    if (stream_mode) {
        StreamingDetector sd(raw.meta, common.cfg, th, model);
        std::vector<CsiPacket> buf;
        for (const auto& p : raw.packets) {
            buf.push_back(p);
            if (static_cast<int>(buf.size()) == chunk) {
                sd.push_chunk(buf);
                buf.clear();
            }
        }
        sd.push_chunk(buf);
        dets = sd.finish();
    } else {
        dets = run_detector(raw, common.cfg, th, model);
    }

    std::ostringstream out;
    write_detections(dets, out);
    if (out_path.empty()) std::cout << out.str();
    else write_text_file(out_path, out.str());
    return 0;
}

int cmd_eval(const std::string& detections_path, const std::string& truth_path, double tol_ms,
             const std::string& out_path) {
    auto dets = read_detections_file(detections_path);
    GroundTruth truth = load_truth_file(truth_path);
    EvalReport report = evaluate(dets, truth, tol_ms);
    std::ostringstream out;
    write_report(report, out);
    if (out_path.empty()) std::cout << out.str();
    else write_text_file(out_path, out.str());
    return 0;
}

int cmd_search_window(CommonOpts& common, const std::string& corpus_dir, const std::string& threshold_path) {
    common.load();
    StableThreshold th = read_threshold_file(threshold_path);

    std::vector<std::string> traces;
    for (const auto& entry : fs::directory_iterator(corpus_dir)) {
        std::string name = entry.path().filename().string();
        if (name.size() > 10 && name.compare(name.size() - 10, 10, ".csi.jsonl") == 0)
            traces.push_back(entry.path().string());
    }
    std::sort(traces.begin(), traces.end());
    if (traces.empty()) fail(Errc::insufficient_data, "no .csi.jsonl traces in corpus dir");

    std::vector<CorpusEntry> corpus;
    for (const std::string& path : traces) {
        std::string truth_path = default_truth_path(path);
        CsiTrace raw = read_trace_file(path);
        GroundTruth truth = load_truth_file(truth_path);

        CorpusEntry entry;
        entry.preprocessed = preprocess_trace(raw, common.cfg);
        auto subs = common.cfg.segment_subcarriers(entry.preprocessed.meta.n_subcarriers);
        auto diff = phase_difference_stream(entry.preprocessed, 0, 1, subs);
        auto stream = log_variance_stream(diff, th.var_window_ms);
        for (std::int64_t e : detect_endpoints(stream, th, common.cfg.segment.min_fluct_ms)) {
            for (const auto& ev : truth.events) {
                if (!ev.expect_endpoint || std::llabs(e - ev.end_us) > 500000) continue;
                entry.endpoints.push_back({e, ev.kind == ActivityKind::fall});
                break;
            }
        }
        corpus.push_back(std::move(entry));
    }

    WindowSearchSpec spec;
    WindowSearchResult result = search_window_size(corpus, spec, common.cfg);
    std::cout << "{\"window_ms\":" << format_double(result.window_ms) << ",\"coarse\":[";
    for (std::size_t i = 0; i < result.coarse.size(); ++i) {
        if (i) std::cout << ',';
        std::cout << "{\"window_ms\":" << format_double(result.coarse[i].window_ms)
                  << ",\"metric\":" << format_double(result.coarse[i].metric) << '}';
    }
    std::cout << "],\"fine\":[";
    for (std::size_t i = 0; i < result.fine.size(); ++i) {
        if (i) std::cout << ',';
        std::cout << "{\"window_ms\":" << format_double(result.fine[i].window_ms)
                  << ",\"metric\":" << format_double(result.fine[i].metric) << '}';
    }
    std::cout << "]}\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anti-Fall: WiFi CSI fall detection pipeline"};
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("--config", common.config_path, "pipeline config JSON (flags override file values)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a synthetic CSI trace from a scenario");
    std::string sim_scenario, sim_out, sim_truth;
    sim->add_option("--scenario", sim_scenario, "scenario JSON")->required();
    sim->add_option("--out", sim_out, "output .csi.jsonl path")->required();
    sim->add_option("--truth", sim_truth, "ground-truth sidecar path (default: derived from --out)");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "fit the stability threshold from a still trace");
    std::string cal_trace, cal_out;
    cal->add_option("--trace", cal_trace, "still-state .csi.jsonl")->required();
    cal->add_option("--out", cal_out, "output threshold JSON")->required();

    // segment
    auto* seg = app.add_subcommand("segment", "detect activity endpoints and cut segments");
    std::string seg_trace, seg_threshold, seg_outdir, seg_out;
    std::optional<double> seg_window;
    seg->add_option("--trace", seg_trace, "input .csi.jsonl")->required();
    seg->add_option("--threshold", seg_threshold, "threshold JSON from calibrate")->required();
    seg->add_option("--window-ms", seg_window, "activity window size (default 3000)");
    seg->add_option("--out-dir", seg_outdir, "write .segment.json files here");
    seg->add_option("--out", seg_out, "write the endpoint summary JSON here (default: stdout)");

    // train
    auto* trn = app.add_subcommand("train", "train the one-class SVM on labeled segments");
    std::string trn_segments, trn_labels, trn_out;
    trn->add_option("--segments", trn_segments, "directory of .segment.json files")->required();
    trn->add_option("--labels", trn_labels, "JSON object mapping segment file name to fall/non_fall")->required();
    trn->add_option("--out", trn_out, "output model .ocsvm.json")->required();

    // detect
    auto* det = app.add_subcommand("detect", "run the full detector over a trace");
    std::string det_trace, det_threshold, det_model, det_out;
    bool det_stream = false;
    int det_chunk = 64;
    det->add_option("--trace", det_trace, "input .csi.jsonl")->required();
    det->add_option("--threshold", det_threshold, "threshold JSON")->required();
    det->add_option("--model", det_model, "model .ocsvm.json")->required();
    det->add_flag("--stream", det_stream, "use the chunked streaming path");
    det->add_option("--chunk", det_chunk, "streaming chunk size in packets (default 64)");
    det->add_option("--out", det_out, "write detections JSON here (default: stdout)");

    // eval
    auto* evl = app.add_subcommand("eval", "score detections against ground truth");
    std::string evl_detections, evl_truth, evl_out;
    double evl_tol = 500.0;
    evl->add_option("--detections", evl_detections, "detections JSON")->required();
    evl->add_option("--truth", evl_truth, "ground-truth JSON")->required();
    evl->add_option("--tol-ms", evl_tol, "match tolerance in ms (default 500)");
    evl->add_option("--out", evl_out, "write the report here (default: stdout)");

    // search-window
    auto* srch = app.add_subcommand("search-window", "two-phase optimal activity window search");
    std::string srch_corpus, srch_threshold;
    srch->add_option("--corpus", srch_corpus, "directory of .csi.jsonl + .truth.json pairs")->required();
    srch->add_option("--threshold", srch_threshold, "threshold JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) return cmd_simulate(sim_scenario, sim_out, sim_truth);
        if (*cal) return cmd_calibrate(common, cal_trace, cal_out);
        if (*seg) return cmd_segment(common, seg_trace, seg_threshold, seg_window, seg_outdir, seg_out);
        if (*trn) return cmd_train(common, trn_segments, trn_labels, trn_out);
        if (*det) return cmd_detect(common, det_trace, det_threshold, det_model, det_stream, det_chunk, det_out);
        if (*evl) return cmd_eval(evl_detections, evl_truth, evl_tol, evl_out);
        if (*srch) return cmd_search_window(common, srch_corpus, srch_threshold);
    } catch (const Error& e) {
        std::cerr << "error (" << errc_name(e.code()) << "): " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
