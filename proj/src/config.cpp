#include "afd/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "afd/error.hpp"

namespace afd {

std::vector<int> PipelineConfig::segment_subcarriers(int n_subcarriers) const {
    if (!segment.subcarriers.empty()) return segment.subcarriers;
    return select_subcarriers(n_subcarriers, 4);
}

double PipelineConfig::gamma_for_dimension(int dim) const {
    if (svm.gamma) return *svm.gamma;
    return 1.0 / static_cast<double>(dim);
}

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& scope) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) fail(Errc::bad_config, "unknown config key: " + scope + "." + it.key());
}

}  // namespace

PipelineConfig parse_config(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(Errc::bad_config, "config: not a JSON object");

    PipelineConfig cfg;
    try {
        check_keys(j, {"preprocess", "segment", "features", "svm"}, "");
        if (j.contains("preprocess")) {
            const auto& p = j["preprocess"];
            check_keys(p, {"target_rate_hz", "cutoff_hz", "filter_order"}, "preprocess");
            cfg.preprocess.target_rate_hz = p.value("target_rate_hz", cfg.preprocess.target_rate_hz);
            cfg.preprocess.cutoff_hz = p.value("cutoff_hz", cfg.preprocess.cutoff_hz);
            cfg.preprocess.filter_order = p.value("filter_order", cfg.preprocess.filter_order);
        }
        if (j.contains("segment")) {
            const auto& s = j["segment"];
            check_keys(s,
                       {"var_window_ms", "stable_window_ms", "min_fluct_ms", "window_ms", "delta_override",
                        "subcarriers"},
                       "segment");
            cfg.segment.var_window_ms = s.value("var_window_ms", cfg.segment.var_window_ms);
            cfg.segment.stable_window_ms = s.value("stable_window_ms", cfg.segment.stable_window_ms);
            cfg.segment.min_fluct_ms = s.value("min_fluct_ms", cfg.segment.min_fluct_ms);
            cfg.segment.window_ms = s.value("window_ms", cfg.segment.window_ms);
            if (s.contains("delta_override")) cfg.segment.delta_override = s["delta_override"].get<double>();
            if (s.contains("subcarriers")) cfg.segment.subcarriers = s["subcarriers"].get<std::vector<int>>();
        }
        if (j.contains("features")) {
            const auto& f = j["features"];
            check_keys(f, {"channels"}, "features");
            if (f.contains("channels")) {
                std::string mode = f["channels"].get<std::string>();
                if (mode == "amplitude_and_phase") cfg.features.channels = ChannelMode::amplitude_and_phase;
                else if (mode == "amplitude_only") cfg.features.channels = ChannelMode::amplitude_only;
                else fail(Errc::bad_config, "features.channels must be amplitude_and_phase or amplitude_only");
            }
        }
        if (j.contains("svm")) {
            const auto& s = j["svm"];
            check_keys(s, {"nu", "gamma", "grid_search"}, "svm");
            cfg.svm.nu = s.value("nu", cfg.svm.nu);
            if (s.contains("gamma")) cfg.svm.gamma = s["gamma"].get<double>();
            cfg.svm.grid_search = s.value("grid_search", cfg.svm.grid_search);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::bad_config, std::string("config: ") + e.what());
    }

    if (!(cfg.preprocess.target_rate_hz > 0.0)) fail(Errc::bad_config, "preprocess.target_rate_hz must be > 0");
    if (!(cfg.preprocess.cutoff_hz > 0.0) || cfg.preprocess.cutoff_hz >= cfg.preprocess.target_rate_hz / 2.0)
        fail(Errc::bad_config, "preprocess.cutoff_hz must be in (0, rate/2)");
    if (cfg.preprocess.filter_order < 1) fail(Errc::bad_config, "preprocess.filter_order must be >= 1");
    if (!(cfg.svm.nu > 0.0) || cfg.svm.nu > 1.0) fail(Errc::bad_config, "svm.nu must be in (0, 1]");
    if (cfg.svm.gamma && !(*cfg.svm.gamma > 0.0)) fail(Errc::bad_config, "svm.gamma must be > 0");
    return cfg;
}

PipelineConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io_error, "cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace afd
