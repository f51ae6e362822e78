#include <doctest.h>

#include <cmath>

#include "afd/kernels.hpp"
#include "afd/preprocess.hpp"
#include "afd/util.hpp"

using namespace afd;

// The OpenMP kernels parallelize across independent elements with identical
// per-element arithmetic, so they must agree with the serial references
// bit for bit.

namespace {

std::vector<std::vector<double>> random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
    for (auto& r : m)
        for (double& v : r) v = rng.gauss();
    return m;
}

}  // namespace

TEST_CASE("filter_channels: parallel == serial (bitwise)") {
    auto cascade = design_butterworth(10.0, 100.0, 4);
    auto a = random_matrix(64, 3000, 101);
    auto b = a;
    kernels::filter_channels(cascade, a);
    kernels::filter_channels_serial(cascade, b);
    CHECK(a == b);
}

TEST_CASE("phase_difference: parallel == serial (bitwise)") {
    auto pa = random_matrix(8, 5000, 102);
    auto pb = random_matrix(8, 5000, 103);
    std::vector<std::vector<double>> d1, d2;
    kernels::phase_difference(pa, pb, d1);
    kernels::phase_difference_serial(pa, pb, d2);
    CHECK(d1 == d2);
}

TEST_CASE("sliding_log_variance: parallel == serial (bitwise)") {
    auto diff = random_matrix(4, 4000, 104);
    std::vector<double> v1, v2;
    kernels::sliding_log_variance(diff, 20, v1);
    kernels::sliding_log_variance_serial(diff, 20, v2);
    CHECK(v1 == v2);
    CHECK(v1.size() == 4000 - 20 + 1);
}

TEST_CASE("sliding_mean: parallel == serial (bitwise)") {
    auto m = random_matrix(1, 6000, 105);
    std::vector<double> v1, v2;
    kernels::sliding_mean(m[0], 100, v1);
    kernels::sliding_mean_serial(m[0], 100, v2);
    CHECK(v1 == v2);
}

TEST_CASE("interpolate_grid: parallel == serial (bitwise)") {
    Rng rng(106);
    const std::size_t n_in = 500;
    std::vector<std::int64_t> t_in;
    std::int64_t t = 0;
    for (std::size_t i = 0; i < n_in; ++i) {
        t_in.push_back(t);
        t += 8000 + static_cast<std::int64_t>(rng.uniform(0.0, 4000.0));
    }
    auto in = random_matrix(24, n_in, 107);

    UniformGrid grid = make_grid(t_in.front(), t_in.back(), 100.0);
    std::vector<double> grid_t(grid.size);
    std::vector<std::int64_t> bracket(grid.size);
    std::size_t b = 0;
    for (std::size_t k = 0; k < grid.size; ++k) {
        grid_t[k] = grid.time_at(k);
        while (b + 1 < n_in && static_cast<double>(t_in[b + 1]) <= grid_t[k]) ++b;
        bracket[k] = static_cast<std::int64_t>(b);
    }
    std::vector<std::vector<double>> o1, o2;
    kernels::interpolate_grid(in, t_in, bracket, grid_t, o1);
    kernels::interpolate_grid_serial(in, t_in, bracket, grid_t, o2);
    CHECK(o1 == o2);
}

TEST_CASE("rbf_scores: parallel == serial (bitwise)") {
    auto svs = random_matrix(100, 16, 108);
    auto queries = random_matrix(500, 16, 109);
    Rng rng(110);
    std::vector<double> alpha(100);
    double sum = 0.0;
    for (double& a : alpha) {
        a = rng.uniform(0.0, 1.0);
        sum += a;
    }
    for (double& a : alpha) a /= sum;

    std::vector<double> s1, s2;
    kernels::rbf_scores(svs, alpha, 1.0 / 16.0, 0.4, queries, s1);
    kernels::rbf_scores_serial(svs, alpha, 1.0 / 16.0, 0.4, queries, s2);
    CHECK(s1 == s2);
}

TEST_CASE("biquad steady-state seeding passes constants unchanged") {
    auto cascade = design_butterworth(10.0, 100.0, 2);
    for (double x0 : {0.0, 1.0, -3.7, 1e6}) {
        std::vector<kernels::BiquadState> st(cascade.size());
        for (std::size_t s = 0; s < cascade.size(); ++s) st[s] = kernels::biquad_steady_state(cascade[s], x0);
        for (int i = 0; i < 50; ++i) {
            double y = x0;
            for (std::size_t s = 0; s < cascade.size(); ++s) y = kernels::biquad_step(cascade[s], st[s], y);
            CHECK(y == doctest::Approx(x0).epsilon(1e-12));
        }
    }
}
