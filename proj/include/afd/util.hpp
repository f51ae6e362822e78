#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>

#include "afd/error.hpp"

namespace afd {

// Shortest decimal form that round-trips the exact double. Used for every
// number we persist so that parse(write(x)) == x bitwise.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    std::string s(buf, ptr);
    // to_chars may emit "1e+20"; that is already valid JSON. Ensure we never
    // emit nan/inf into files.
    if (!std::isfinite(v)) fail(Errc::io_error, "non-finite number cannot be serialized");
    return s;
}

// Wrap an angle into (-pi, pi]. Inputs here are differences of atan2 results,
// so at most one full turn off.
inline double wrap_phase(double d) {
    constexpr double pi = 3.14159265358979323846;
    constexpr double two_pi = 2.0 * pi;
    while (d > pi) d -= two_pi;
    while (d <= -pi) d += two_pi;
    return d;
}

// splitmix64: seed derivation and counter-based random streams. All synthetic
// data flows through this so that traces are bit-reproducible across builds
// (std::normal_distribution's sequence is implementation-defined; this is not).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Small deterministic RNG over splitmix64 with explicit double mappings.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // uniform in [0, 1): 53 mantissa bits
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller; returns one sample, caches the pair partner.
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stateless gaussian pair keyed by an index; safe to evaluate in parallel.
inline void gauss_pair_at(std::uint64_t key, double& g0, double& g1) {
    std::uint64_t h1 = splitmix64(key);
    std::uint64_t h2 = splitmix64(h1);
    double u1 = 1.0 - static_cast<double>(h1 >> 11) * 0x1.0p-53;
    double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    g0 = r * std::cos(a);
    g1 = r * std::sin(a);
}

}  // namespace afd
