// Benchmark comparing the OpenMP kernels against their serial references.
// Each kernel is timed on the same seeded workload; outputs are checksummed
// to confirm the two paths agree bit for bit.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "afd/kernels.hpp"
#include "afd/preprocess.hpp"
#include "afd/synth.hpp"
#include "afd/trace.hpp"
#include "afd/util.hpp"

using namespace afd;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm-up
    auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count() / reps;
}

double checksum(const std::vector<std::vector<double>>& m) {
    double acc = 0.0;
    for (const auto& row : m)
        for (double v : row) acc += v;
    return acc;
}

double checksum(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
}

std::vector<std::vector<double>> random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
    for (auto& r : m)
        for (double& v : r) v = rng.gauss();
    return m;
}

void report(const char* name, double serial_ms, double parallel_ms, bool equal) {
    std::printf("%-24s serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, equal ? "outputs identical" : "OUTPUTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
    int scale = 1;
    if (argc > 1) scale = std::max(1, std::atoi(argv[1]));
    const std::size_t n_time = 60000ull * scale;

#ifdef _OPENMP
    std::printf("OpenMP threads: %d, workload scale %dx\n\n", omp_get_max_threads(), scale);
#else
    std::printf("built without OpenMP, workload scale %dx\n\n", scale);
#endif

    {  // biquad filtering, 120 channels
        auto cascade = design_butterworth(10.0, 100.0, 2);
        auto base = random_matrix(120, n_time, 1);
        std::vector<std::vector<double>> a, b;
        double ts = time_ms([&] { a = base; kernels::filter_channels_serial(cascade, a); }, 3);
        double tp = time_ms([&] { b = base; kernels::filter_channels(cascade, b); }, 3);
        report("filter_channels", ts, tp, a == b);
    }
    {  // sliding log-variance over 4 subcarriers, 200 ms window
        auto diff = random_matrix(4, n_time, 2);
        std::vector<double> a, b;
        double ts = time_ms([&] { kernels::sliding_log_variance_serial(diff, 20, a); }, 3);
        double tp = time_ms([&] { kernels::sliding_log_variance(diff, 20, b); }, 3);
        report("sliding_log_variance", ts, tp, a == b);
    }
    {  // stability means, 1 s window
        auto v = random_matrix(1, n_time, 3);
        std::vector<double> a, b;
        double ts = time_ms([&] { kernels::sliding_mean_serial(v[0], 100, a); }, 3);
        double tp = time_ms([&] { kernels::sliding_mean(v[0], 100, b); }, 3);
        report("sliding_mean", ts, tp, a == b);
    }
    {  // phase differences over 30 subcarriers
        auto pa = random_matrix(30, n_time, 4);
        auto pb = random_matrix(30, n_time, 5);
        std::vector<std::vector<double>> a, b;
        double ts = time_ms([&] { kernels::phase_difference_serial(pa, pb, a); }, 3);
        double tp = time_ms([&] { kernels::phase_difference(pa, pb, b); }, 3);
        report("phase_difference", ts, tp, a == b);
    }
    {  // interpolation of 120 channels onto a 100 Hz grid
        const std::size_t n_in = n_time / 4;
        Rng rng(6);
        std::vector<std::int64_t> t_in;
        std::int64_t t = 0;
        for (std::size_t i = 0; i < n_in; ++i) {
            t_in.push_back(t);
            t += 8000 + static_cast<std::int64_t>(rng.uniform(0.0, 4000.0));
        }
        auto in = random_matrix(120, n_in, 7);
        UniformGrid grid = make_grid(t_in.front(), t_in.back(), 100.0);
        std::vector<double> grid_t(grid.size);
        std::vector<std::int64_t> bracket(grid.size);
        std::size_t b_idx = 0;
        for (std::size_t k = 0; k < grid.size; ++k) {
            grid_t[k] = grid.time_at(k);
            while (b_idx + 1 < n_in && static_cast<double>(t_in[b_idx + 1]) <= grid_t[k]) ++b_idx;
            bracket[k] = static_cast<std::int64_t>(b_idx);
        }
        std::vector<std::vector<double>> a, b;
        double ts = time_ms([&] { kernels::interpolate_grid_serial(in, t_in, bracket, grid_t, a); }, 3);
        double tp = time_ms([&] { kernels::interpolate_grid(in, t_in, bracket, grid_t, b); }, 3);
        report("interpolate_grid", ts, tp, a == b);
    }
    {  // RBF decision scores, 200 SVs x 112 dims
        auto svs = random_matrix(200, 112, 8);
        auto queries = random_matrix(2000ull * scale, 112, 9);
        Rng rng(10);
        std::vector<double> alpha(svs.size());
        double sum = 0.0;
        for (double& x : alpha) {
            x = rng.uniform(0.0, 1.0);
            sum += x;
        }
        for (double& x : alpha) x /= sum;
        std::vector<double> a, b;
        double ts = time_ms([&] { kernels::rbf_scores_serial(svs, alpha, 1.0 / 112, 0.3, queries, a); }, 3);
        double tp = time_ms([&] { kernels::rbf_scores(svs, alpha, 1.0 / 112, 0.3, queries, b); }, 3);
        report("rbf_scores", ts, tp, a == b);
    }
    {  // end-to-end synthetic generation (parallel over packets inside)
        Scenario sc;
        sc.seed = 42;
        sc.duration_ms = 60000.0 * scale;
        sc.noise_sigma = 0.03;
        sc.events.push_back({ActivityKind::walk, 1000.0, sc.duration_ms - 1000.0});
        double tg = time_ms([&] { auto r = generate_trace(sc); (void)r; }, 3);
        std::printf("%-24s %9.3f ms per %.0f s trace\n", "generate_trace", tg, sc.duration_ms / 1000.0);
    }
    return 0;
}
