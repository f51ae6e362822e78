#include "afd/features.hpp"

#include <algorithm>
#include <cmath>

#include "afd/error.hpp"
#include "afd/util.hpp"

namespace afd {

std::vector<int> select_subcarriers(int n_total, int k) {
    if (k < 2 || k > n_total) fail(Errc::bad_counts, "need 2 <= k <= n_total subcarriers");
    std::vector<int> out(k);
    for (int i = 0; i < k; ++i) {
        double pos = static_cast<double>(i) * (n_total - 1) / static_cast<double>(k - 1);
        out[i] = static_cast<int>(std::floor(pos + 0.5));  // round half up
    }
    return out;
}

int feature_dimension(ChannelMode mode, int n_links, int k_subcarriers) {
    int channels = mode == ChannelMode::amplitude_and_phase ? 2 : 1;
    return n_links * k_subcarriers * channels * kFeaturesPerSeries;
}

namespace {

double mean_of(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc / static_cast<double>(x.size());
}

double pop_std(std::span<const double> x, double mean) {
    double acc = 0.0;
    for (double v : x) {
        double d = v - mean;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(x.size()));
}

double median_sorted(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// linear-interpolation quantile over a sorted vector (R type-7)
double quantile_sorted(const std::vector<double>& sorted, double q) {
    double h = q * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::array<double, kFeaturesPerSeries> series_features(std::span<const double> x, double rate_hz) {
    if (x.empty()) fail(Errc::empty_channel, "feature extraction on empty series");
    const std::size_t n = x.size();
    std::array<double, kFeaturesPerSeries> f{};

    const double mu = mean_of(x);
    const double sigma = pop_std(x, mu);

    // f1: normalized standard deviation
    f[0] = sigma / (std::abs(mu) + 1e-9);

    // f2: median absolute deviation from the median
    {
        std::vector<double> tmp(x.begin(), x.end());
        double med = median_sorted(tmp);
        for (double& v : tmp) v = std::abs(v - med);
        f[1] = median_sorted(tmp);
    }

    // f3: activity period — duration of the smallest span containing all
    // samples deviating more than 2x the std of the first 10%
    {
        std::size_t head = std::max<std::size_t>(1, n / 10);
        double sigma_first = pop_std(x.subspan(0, head), mean_of(x.subspan(0, head)));
        double gate = 2.0 * sigma_first;
        std::size_t first = n, last = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(x[i] - mu) > gate) {
                if (first == n) first = i;
                last = i;
            }
        }
        f[2] = first == n ? 0.0 : static_cast<double>(last - first) * 1000.0 / rate_hz;
    }

    // f4: offset of signal strength
    {
        std::size_t head = std::max<std::size_t>(1, n / 10);
        f[3] = mean_of(x.subspan(n - head, head)) - mean_of(x.subspan(0, head));
    }

    // f5: interquartile range
    {
        std::vector<double> sorted(x.begin(), x.end());
        std::sort(sorted.begin(), sorted.end());
        f[4] = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    }

    // f6: signal entropy over a 16-bin equal-width histogram, in bits
    {
        double lo = *std::min_element(x.begin(), x.end());
        double hi = *std::max_element(x.begin(), x.end());
        if (hi == lo) {
            f[5] = 0.0;
        } else {
            constexpr int kBins = 16;
            std::array<std::size_t, kBins> counts{};
            for (double v : x) {
                int b = static_cast<int>((v - lo) / (hi - lo) * kBins);
                if (b >= kBins) b = kBins - 1;
                if (b < 0) b = 0;
                ++counts[static_cast<std::size_t>(b)];
            }
            double h = 0.0;
            for (std::size_t c : counts) {
                if (c == 0) continue;
                double p = static_cast<double>(c) / static_cast<double>(n);
                h -= p * std::log2(p);
            }
            f[5] = h;
        }
    }

    // f7: velocity of signal change
    {
        double vmax = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) vmax = std::max(vmax, std::abs(x[i + 1] - x[i]));
        f[6] = vmax * rate_hz;
    }

    return f;
}

std::vector<double> unwrap_phase_series(std::span<const double> wrapped) {
    std::vector<double> out(wrapped.begin(), wrapped.end());
    constexpr double pi = 3.14159265358979323846;
    double offset = 0.0;
    for (std::size_t i = 1; i < out.size(); ++i) {
        double d = wrapped[i] - wrapped[i - 1];
        if (d > pi) offset -= 2.0 * pi;
        else if (d < -pi) offset += 2.0 * pi;
        out[i] = wrapped[i] + offset;
    }
    return out;
}

std::vector<double> detrend_linear(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> out(x.begin(), x.end());
    if (n < 2) return out;
    // least-squares line over k = 0..n-1
    double k_mean = static_cast<double>(n - 1) / 2.0;
    double x_mean = mean_of(x);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dk = static_cast<double>(i) - k_mean;
        num += dk * (x[i] - x_mean);
        den += dk * dk;
    }
    double slope = den == 0.0 ? 0.0 : num / den;
    for (std::size_t i = 0; i < n; ++i) out[i] -= x_mean + slope * (static_cast<double>(i) - k_mean);
    return out;
}

FeatureVector extract_features(const ActivitySegment& seg, ChannelMode mode) {
    if (seg.channels.empty()) fail(Errc::empty_channel, "segment has no channels");
    FeatureVector out;
    out.values.reserve(seg.channels.size() * (mode == ChannelMode::amplitude_and_phase ? 2 : 1) *
                       kFeaturesPerSeries);
    for (const SegmentChannel& ch : seg.channels) {
        if (ch.amplitude.empty() || ch.phase.size() != ch.amplitude.size())
            fail(Errc::empty_channel, "segment channel is empty or inconsistent");
        auto fa = series_features(ch.amplitude, seg.rate_hz);
        out.values.insert(out.values.end(), fa.begin(), fa.end());
        if (mode == ChannelMode::amplitude_and_phase) {
            std::vector<double> ph = detrend_linear(unwrap_phase_series(ch.phase));
            auto fp = series_features(ph, seg.rate_hz);
            out.values.insert(out.values.end(), fp.begin(), fp.end());
        }
    }
    return out;
}

Scaler Scaler::fit(const std::vector<FeatureVector>& vectors) {
    if (vectors.empty()) fail(Errc::empty_training_set, "cannot fit scaler on empty set");
    const std::size_t dim = vectors[0].values.size();
    for (const auto& v : vectors)
        if (v.values.size() != dim) fail(Errc::length_mismatch, "inconsistent feature vector lengths");

    Scaler sc;
    sc.mean.assign(dim, 0.0);
    sc.std.assign(dim, 0.0);
    for (const auto& v : vectors)
        for (std::size_t d = 0; d < dim; ++d) sc.mean[d] += v.values[d];
    for (double& m : sc.mean) m /= static_cast<double>(vectors.size());
    for (const auto& v : vectors)
        for (std::size_t d = 0; d < dim; ++d) {
            double diff = v.values[d] - sc.mean[d];
            sc.std[d] += diff * diff;
        }
    for (double& s : sc.std) s = std::sqrt(s / static_cast<double>(vectors.size()));
    return sc;
}

FeatureVector Scaler::transform(const FeatureVector& v) const {
    if (v.values.size() != mean.size()) fail(Errc::length_mismatch, "feature vector length does not match scaler");
    FeatureVector out;
    out.values.resize(v.values.size());
    for (std::size_t d = 0; d < v.values.size(); ++d)
        out.values[d] = std[d] <= kZeroStd ? 0.0 : (v.values[d] - mean[d]) / std[d];
    return out;
}

FeatureVector Scaler::inverse(const FeatureVector& v) const {
    if (v.values.size() != mean.size()) fail(Errc::length_mismatch, "feature vector length does not match scaler");
    FeatureVector out;
    out.values.resize(v.values.size());
    for (std::size_t d = 0; d < v.values.size(); ++d)
        out.values[d] = std[d] <= kZeroStd ? mean[d] : v.values[d] * std[d] + mean[d];
    return out;
}

std::vector<FeatureVector> standardize(const std::vector<FeatureVector>& vectors, const Scaler& scaler) {
    std::vector<FeatureVector> out;
    out.reserve(vectors.size());
    for (const auto& v : vectors) out.push_back(scaler.transform(v));
    return out;
}

}  // namespace afd
