#include "afd/kernels.hpp"

#include <cmath>
#include <cstddef>

#include "afd/util.hpp"

namespace afd::kernels {

namespace {

inline double lerp_at(const std::vector<double>& ch, const std::vector<std::int64_t>& t_in, std::int64_t i,
                      double g) {
    const std::size_t n = ch.size();
    std::size_t a = static_cast<std::size_t>(i);
    if (a + 1 >= n) return ch[n - 1];  // grid never extends past the last sample
    double ta = static_cast<double>(t_in[a]);
    double tb = static_cast<double>(t_in[a + 1]);
    double u = (g - ta) / (tb - ta);
    return lerp(ch[a], ch[a + 1], u);
}

}  // namespace

void interpolate_grid_serial(const std::vector<std::vector<double>>& in, const std::vector<std::int64_t>& t_in,
                             const std::vector<std::int64_t>& bracket, const std::vector<double>& grid_t,
                             std::vector<std::vector<double>>& out) {
    const std::size_t n_ch = in.size();
    const std::size_t n_out = grid_t.size();
    out.assign(n_ch, std::vector<double>(n_out));
    for (std::size_t c = 0; c < n_ch; ++c) {
        for (std::size_t k = 0; k < n_out; ++k) {
            double g = grid_t[k];
            if (g == static_cast<double>(t_in[static_cast<std::size_t>(bracket[k])]))
                out[c][k] = in[c][static_cast<std::size_t>(bracket[k])];
            else
                out[c][k] = lerp_at(in[c], t_in, bracket[k], g);
        }
    }
}

void interpolate_grid(const std::vector<std::vector<double>>& in, const std::vector<std::int64_t>& t_in,
                      const std::vector<std::int64_t>& bracket, const std::vector<double>& grid_t,
                      std::vector<std::vector<double>>& out) {
    const std::size_t n_ch = in.size();
    const std::size_t n_out = grid_t.size();
    out.assign(n_ch, std::vector<double>(n_out));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_ch); ++c) {
        for (std::size_t k = 0; k < n_out; ++k) {
            double g = grid_t[k];
            if (g == static_cast<double>(t_in[static_cast<std::size_t>(bracket[k])]))
                out[c][k] = in[c][static_cast<std::size_t>(bracket[k])];
            else
                out[c][k] = lerp_at(in[c], t_in, bracket[k], g);
        }
    }
}

namespace {

inline void filter_one(const std::vector<BiquadSection>& cascade, std::vector<double>& ch) {
    if (ch.empty()) return;
    std::vector<BiquadState> st(cascade.size());
    for (std::size_t s = 0; s < cascade.size(); ++s) st[s] = biquad_steady_state(cascade[s], ch[0]);
    for (double& x : ch) {
        double y = x;
        for (std::size_t s = 0; s < cascade.size(); ++s) y = biquad_step(cascade[s], st[s], y);
        x = y;
    }
}

}  // namespace

void filter_channels_serial(const std::vector<BiquadSection>& cascade, std::vector<std::vector<double>>& channels) {
    for (auto& ch : channels) filter_one(cascade, ch);
}

void filter_channels(const std::vector<BiquadSection>& cascade, std::vector<std::vector<double>>& channels) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(channels.size()); ++c)
        filter_one(cascade, channels[static_cast<std::size_t>(c)]);
}

void phase_difference_serial(const std::vector<std::vector<double>>& phase_a,
                             const std::vector<std::vector<double>>& phase_b,
                             std::vector<std::vector<double>>& diff) {
    diff.assign(phase_a.size(), {});
    for (std::size_t s = 0; s < phase_a.size(); ++s) {
        diff[s].resize(phase_a[s].size());
        for (std::size_t t = 0; t < phase_a[s].size(); ++t) diff[s][t] = wrap_phase(phase_a[s][t] - phase_b[s][t]);
    }
}

void phase_difference(const std::vector<std::vector<double>>& phase_a,
                      const std::vector<std::vector<double>>& phase_b, std::vector<std::vector<double>>& diff) {
    diff.assign(phase_a.size(), {});
    for (std::size_t s = 0; s < phase_a.size(); ++s) diff[s].resize(phase_a[s].size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(phase_a.size()); ++s) {
        const auto& pa = phase_a[static_cast<std::size_t>(s)];
        const auto& pb = phase_b[static_cast<std::size_t>(s)];
        auto& d = diff[static_cast<std::size_t>(s)];
        for (std::size_t t = 0; t < pa.size(); ++t) d[t] = wrap_phase(pa[t] - pb[t]);
    }
}

double window_log_variance(const std::vector<std::vector<double>>& diff, std::size_t j, std::size_t w) {
    double acc = 0.0;
    for (const auto& sub : diff) {
        double mean = 0.0;
        for (std::size_t i = j; i < j + w; ++i) mean += sub[i];
        mean /= static_cast<double>(w);
        double var = 0.0;
        for (std::size_t i = j; i < j + w; ++i) {
            double d = sub[i] - mean;
            var += d * d;
        }
        acc += var / static_cast<double>(w);
    }
    double v = acc / static_cast<double>(diff.size());
    return std::log10(v < kVarianceFloor ? kVarianceFloor : v);
}

void sliding_log_variance_serial(const std::vector<std::vector<double>>& diff, std::size_t w,
                                 std::vector<double>& out) {
    const std::size_t n = diff.empty() ? 0 : diff[0].size();
    if (n < w) {
        out.clear();
        return;
    }
    out.resize(n - w + 1);
    for (std::size_t j = 0; j + w <= n; ++j) out[j] = window_log_variance(diff, j, w);
}

void sliding_log_variance(const std::vector<std::vector<double>>& diff, std::size_t w, std::vector<double>& out) {
    const std::size_t n = diff.empty() ? 0 : diff[0].size();
    if (n < w) {
        out.clear();
        return;
    }
    out.resize(n - w + 1);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j <= static_cast<std::ptrdiff_t>(n - w); ++j)
        out[static_cast<std::size_t>(j)] = window_log_variance(diff, static_cast<std::size_t>(j), w);
}

double window_mean(const std::vector<double>& values, std::size_t start, std::size_t w) {
    double acc = 0.0;
    for (std::size_t i = start; i < start + w; ++i) acc += values[i];
    return acc / static_cast<double>(w);
}

void sliding_mean_serial(const std::vector<double>& values, std::size_t w, std::vector<double>& out) {
    const std::size_t n = values.size();
    if (n < w) {
        out.clear();
        return;
    }
    out.resize(n - w + 1);
    for (std::size_t t = 0; t + w <= n; ++t) out[t] = window_mean(values, t, w);
}

void sliding_mean(const std::vector<double>& values, std::size_t w, std::vector<double>& out) {
    const std::size_t n = values.size();
    if (n < w) {
        out.clear();
        return;
    }
    out.resize(n - w + 1);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t <= static_cast<std::ptrdiff_t>(n - w); ++t)
        out[static_cast<std::size_t>(t)] = window_mean(values, static_cast<std::size_t>(t), w);
}

namespace {

inline double score_one(const std::vector<std::vector<double>>& svs, const std::vector<double>& alpha, double gamma,
                        double rho, const std::vector<double>& x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < svs.size(); ++i) {
        double d2 = 0.0;
        const auto& sv = svs[i];
        for (std::size_t k = 0; k < sv.size(); ++k) {
            double d = sv[k] - x[k];
            d2 += d * d;
        }
        acc += alpha[i] * std::exp(-gamma * d2);
    }
    return acc - rho;
}

}  // namespace

void rbf_scores_serial(const std::vector<std::vector<double>>& svs, const std::vector<double>& alpha, double gamma,
                       double rho, const std::vector<std::vector<double>>& queries, std::vector<double>& scores) {
    scores.resize(queries.size());
    for (std::size_t q = 0; q < queries.size(); ++q) scores[q] = score_one(svs, alpha, gamma, rho, queries[q]);
}

void rbf_scores(const std::vector<std::vector<double>>& svs, const std::vector<double>& alpha, double gamma,
                double rho, const std::vector<std::vector<double>>& queries, std::vector<double>& scores) {
    scores.resize(queries.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(queries.size()); ++q)
        scores[static_cast<std::size_t>(q)] = score_one(svs, alpha, gamma, rho, queries[static_cast<std::size_t>(q)]);
}

}  // namespace afd::kernels
