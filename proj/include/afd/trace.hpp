#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "afd/error.hpp"

namespace afd {

// One complex channel coefficient for one link x subcarrier.
struct CsiSample {
    double re = 0.0;
    double im = 0.0;
};

struct Polar {
    double amplitude;  // sqrt(re^2 + im^2), >= 0
    double phase;      // atan2(im, re), in (-pi, pi]
};

Polar to_polar(const CsiSample& s);

// Samples are stored row-major: index = link * n_subcarriers + subcarrier.
struct CsiPacket {
    std::int64_t t_us = 0;  // microseconds since trace start
    std::vector<CsiSample> samples;
};

struct TraceMeta {
    int n_links = 2;
    int n_subcarriers = 30;
    double nominal_rate_hz = 100.0;
    std::string trace_id;

    void validate() const;
};

struct CsiTrace {
    TraceMeta meta;
    std::vector<CsiPacket> packets;

    const CsiSample& at(std::size_t packet, int link, int subcarrier) const {
        return packets[packet].samples[static_cast<std::size_t>(link) * meta.n_subcarriers + subcarrier];
    }
    CsiSample& at(std::size_t packet, int link, int subcarrier) {
        return packets[packet].samples[static_cast<std::size_t>(link) * meta.n_subcarriers + subcarrier];
    }

    std::int64_t start_us() const { return packets.empty() ? 0 : packets.front().t_us; }
    std::int64_t end_us() const { return packets.empty() ? 0 : packets.back().t_us; }
    double duration_ms() const { return packets.empty() ? 0.0 : (end_us() - start_us()) / 1000.0; }

    // Checks all invariants (dimensions, strict timestamp order, finite values).
    void validate() const;
};

// Canonical .csi.jsonl format. Line 1 is the header object, every further
// line one packet. Numbers round-trip bit-exactly.
CsiTrace parse_trace(std::istream& in);
CsiTrace parse_trace(const std::string& text);

void write_trace(const CsiTrace& trace, std::ostream& out);
std::string write_trace(const CsiTrace& trace);

CsiTrace read_trace_file(const std::string& path);
void write_trace_file(const CsiTrace& trace, const std::string& path);

}  // namespace afd
