#pragma once

#include <optional>
#include <string>
#include <vector>

#include "afd/features.hpp"

namespace afd {

// Pipeline configuration. JSON file layout mirrors the nesting:
//   {"preprocess": {"target_rate_hz": 100, ...}, "segment": {...},
//    "features": {"channels": "amplitude_and_phase"}, "svm": {...}}
// Unknown keys are rejected.
struct PipelineConfig {
    struct Preprocess {
        double target_rate_hz = 100.0;
        double cutoff_hz = 10.0;
        int filter_order = 2;
    } preprocess;

    struct Segment {
        double var_window_ms = 200.0;
        double stable_window_ms = 1000.0;
        double min_fluct_ms = 500.0;
        double window_ms = 3000.0;
        std::optional<double> delta_override;
        std::vector<int> subcarriers;  // empty -> evenly spread 4
    } segment;

    struct Features {
        ChannelMode channels = ChannelMode::amplitude_and_phase;
    } features;

    struct Svm {
        double nu = 0.1;
        std::optional<double> gamma;  // default 1/feature-dimension at train time
        bool grid_search = false;
    } svm;

    // Subcarriers used for segmentation and features (the config list, or the
    // even spread over this trace's subcarrier count).
    std::vector<int> segment_subcarriers(int n_subcarriers) const;
    double gamma_for_dimension(int dim) const;
};

PipelineConfig load_config_file(const std::string& path);
PipelineConfig parse_config(const std::string& json_text);

}  // namespace afd
