#pragma once

// Data-parallel inner loops of the pipeline. Each kernel comes in two
// variants with identical per-element arithmetic: the OpenMP one used by the
// batch path and a serial reference used by tests and the streaming path.
// Because parallelism is only ever across independent elements, both variants
// produce bit-identical output.

#include <cstdint>
#include <vector>

namespace afd::kernels {

// ---- linear interpolation onto a uniform grid -----------------------------

// v = a + u*(b - a); u == 0 and u == 1 short-circuit to exact copies so that
// grid points that coincide with input samples reproduce them bitwise.
inline double lerp(double a, double b, double u) {
    if (u == 0.0) return a;
    if (u == 1.0) return b;
    return a + u * (b - a);
}

// in: channel-major matrix [n_channels][n_in] sampled at times t_in (us).
// out: [n_channels][n_out] at grid times t0 + k*step_us (step_us real).
// bracket[k] is the input index i with t_in[i] <= grid_k, precomputed by the caller.
void interpolate_grid(const std::vector<std::vector<double>>& in, const std::vector<std::int64_t>& t_in,
                      const std::vector<std::int64_t>& bracket, const std::vector<double>& grid_t,
                      std::vector<std::vector<double>>& out);
void interpolate_grid_serial(const std::vector<std::vector<double>>& in, const std::vector<std::int64_t>& t_in,
                             const std::vector<std::int64_t>& bracket, const std::vector<double>& grid_t,
                             std::vector<std::vector<double>>& out);

// ---- biquad cascade filtering ---------------------------------------------

struct BiquadSection {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;  // numerator
    double a1 = 0.0, a2 = 0.0;            // denominator (monic)
};

// Per-channel streaming state, transposed direct form II.
struct BiquadState {
    double s1 = 0.0, s2 = 0.0;
};

inline double biquad_step(const BiquadSection& c, BiquadState& st, double x) {
    double y = c.b0 * x + st.s1;
    st.s1 = c.b1 * x - c.a1 * y + st.s2;
    st.s2 = c.b2 * x - c.a2 * y;
    return y;
}

// Initialize state so a constant input x0 passes through unchanged from the
// first sample (steady-state solution of the recurrence, unity DC gain).
inline BiquadState biquad_steady_state(const BiquadSection& c, double x0) {
    BiquadState st;
    double y0 = x0;  // each section is normalized to DC gain 1
    st.s2 = c.b2 * x0 - c.a2 * y0;
    st.s1 = c.b1 * x0 - c.a1 * y0 + st.s2;
    return st;
}

// Filters every channel in place; channels are independent recurrences.
void filter_channels(const std::vector<BiquadSection>& cascade, std::vector<std::vector<double>>& channels);
void filter_channels_serial(const std::vector<BiquadSection>& cascade, std::vector<std::vector<double>>& channels);

// ---- wrapped phase difference ----------------------------------------------

// diff[s][t] = wrap(phase_a[s][t] - phase_b[s][t]) into (-pi, pi].
void phase_difference(const std::vector<std::vector<double>>& phase_a,
                      const std::vector<std::vector<double>>& phase_b,
                      std::vector<std::vector<double>>& diff);
void phase_difference_serial(const std::vector<std::vector<double>>& phase_a,
                             const std::vector<std::vector<double>>& phase_b,
                             std::vector<std::vector<double>>& diff);

// ---- sliding-window variance -> log10 --------------------------------------

inline constexpr double kVarianceFloor = 1e-12;

// One output value: population variance of each subcarrier's trailing window
// [j, j+w), averaged across subcarriers, floored and log10'd. Shared by the
// batch kernels and the streaming detector so both produce identical bits.
double window_log_variance(const std::vector<std::vector<double>>& diff, std::size_t j, std::size_t w);

// out[j] = window_log_variance(diff, j, w) for j in [0, n-w].
void sliding_log_variance(const std::vector<std::vector<double>>& diff, std::size_t w, std::vector<double>& out);
void sliding_log_variance_serial(const std::vector<std::vector<double>>& diff, std::size_t w,
                                 std::vector<double>& out);

// ---- sliding-window mean (leading window, for the stability predicate) -----

double window_mean(const std::vector<double>& values, std::size_t start, std::size_t w);

// out[t] = mean(values[t, t+w)) for t in [0, n-w].
void sliding_mean(const std::vector<double>& values, std::size_t w, std::vector<double>& out);
void sliding_mean_serial(const std::vector<double>& values, std::size_t w, std::vector<double>& out);

// ---- RBF decision scores ----------------------------------------------------

// scores[q] = sum_i alpha[i] * exp(-gamma*||sv_i - x_q||^2) - rho
void rbf_scores(const std::vector<std::vector<double>>& svs, const std::vector<double>& alpha, double gamma,
                double rho, const std::vector<std::vector<double>>& queries, std::vector<double>& scores);
void rbf_scores_serial(const std::vector<std::vector<double>>& svs, const std::vector<double>& alpha, double gamma,
                       double rho, const std::vector<std::vector<double>>& queries, std::vector<double>& scores);

}  // namespace afd::kernels
