#pragma once

#include <array>
#include <span>
#include <vector>

#include "afd/segmentation.hpp"

namespace afd {

inline constexpr int kFeaturesPerSeries = 7;
inline constexpr int kFeatureLayoutVersion = 1;

enum class ChannelMode {
    amplitude_and_phase,  // 2 links x 4 subcarriers x {amplitude, phase} x 7 = 112
    amplitude_only,       // 56-dim WiFall-style subset, same layout minus phase rows
};

struct FeatureVector {
    std::vector<double> values;
};

// k indices spread evenly over [0, n_total): round(i*(n_total-1)/(k-1)),
// rounding half up. n=30, k=4 gives {0, 10, 19, 29}.
std::vector<int> select_subcarriers(int n_total, int k);

// The seven per-series statistics, frozen as this artifact's contract:
//   f1 sigma/(|mu|+1e-9)            f5 Q3-Q1 (linear-interp quantiles)
//   f2 median(|x - median(x)|)      f6 Shannon entropy, 16 equal-width bins
//   f3 activity period (ms)         f7 max |x[t+1]-x[t]| * rate
//   f4 mean(last 10%) - mean(first 10%)
std::array<double, kFeaturesPerSeries> series_features(std::span<const double> x, double rate_hz);

// Layout: (link, subcarrier, channel in {amplitude, phase}, feature),
// row-major. Phase series are unwrapped within the segment and linearly
// detrended before feature computation.
FeatureVector extract_features(const ActivitySegment& seg, ChannelMode mode = ChannelMode::amplitude_and_phase);

int feature_dimension(ChannelMode mode, int n_links = 2, int k_subcarriers = 4);

struct Scaler {
    std::vector<double> mean;
    std::vector<double> std;  // population std; entries <= kZeroStd are flagged zero-variance

    static constexpr double kZeroStd = 1e-12;

    static Scaler fit(const std::vector<FeatureVector>& vectors);
    FeatureVector transform(const FeatureVector& v) const;
    FeatureVector inverse(const FeatureVector& v) const;  // zero-variance dims map back to mean
};

std::vector<FeatureVector> standardize(const std::vector<FeatureVector>& vectors, const Scaler& scaler);

// Helpers shared with the feature definitions (exposed for tests).
std::vector<double> unwrap_phase_series(std::span<const double> wrapped);
std::vector<double> detrend_linear(std::span<const double> x);

}  // namespace afd
