#include "afd/trace.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "afd/util.hpp"

namespace afd {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::malformed_line: return "MalformedLine";
        case Errc::non_monotonic_timestamp: return "NonMonotonicTimestamp";
        case Errc::dimension_mismatch: return "DimensionMismatch";
        case Errc::missing_header: return "MissingHeader";
        case Errc::too_few_packets: return "TooFewPackets";
        case Errc::invalid_cutoff: return "InvalidCutoff";
        case Errc::window_too_short: return "WindowTooShort";
        case Errc::trace_too_short: return "TraceTooShort";
        case Errc::bad_link_index: return "BadLinkIndex";
        case Errc::bad_subcarrier_index: return "BadSubcarrierIndex";
        case Errc::end_out_of_range: return "EndOutOfRange";
        case Errc::bad_counts: return "BadCounts";
        case Errc::empty_channel: return "EmptyChannel";
        case Errc::length_mismatch: return "LengthMismatch";
        case Errc::empty_training_set: return "EmptyTrainingSet";
        case Errc::layout_mismatch: return "LayoutMismatch";
        case Errc::version_mismatch: return "VersionMismatch";
        case Errc::corrupt_model: return "CorruptModel";
        case Errc::empty_resulting_set: return "EmptyResultingSet";
        case Errc::invalid_scenario: return "InvalidScenario";
        case Errc::malformed_scenario: return "MalformedScenario";
        case Errc::overlapping_events: return "OverlappingEvents";
        case Errc::insufficient_data: return "InsufficientData";
        case Errc::bad_config: return "BadConfig";
        case Errc::io_error: return "IoError";
    }
    return "UnknownError";
}

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::malformed_line:
        case Errc::non_monotonic_timestamp:
        case Errc::dimension_mismatch:
        case Errc::missing_header:
        case Errc::end_out_of_range:
        case Errc::version_mismatch:
        case Errc::corrupt_model:
        case Errc::invalid_scenario:
        case Errc::malformed_scenario:
        case Errc::overlapping_events:
        case Errc::io_error:
            return 2;
        case Errc::invalid_cutoff:
        case Errc::window_too_short:
        case Errc::bad_link_index:
        case Errc::bad_subcarrier_index:
        case Errc::bad_counts:
        case Errc::length_mismatch:
        case Errc::layout_mismatch:
        case Errc::bad_config:
            return 3;
        case Errc::too_few_packets:
        case Errc::trace_too_short:
        case Errc::empty_channel:
        case Errc::empty_training_set:
        case Errc::empty_resulting_set:
        case Errc::insufficient_data:
            return 4;
    }
    return 1;
}

Polar to_polar(const CsiSample& s) {
    double amplitude = std::hypot(s.re, s.im);
    double phase = std::atan2(s.im, s.re);
    if (phase == -kPi) phase = kPi;  // keep the contract range (-pi, pi]
    return {amplitude, phase};
}

void TraceMeta::validate() const {
    if (n_links < 2) fail(Errc::dimension_mismatch, "n_links must be >= 2 (phase difference needs an antenna pair)");
    if (n_subcarriers < 2) fail(Errc::dimension_mismatch, "n_subcarriers must be >= 2");
    if (!(nominal_rate_hz > 0.0) || !std::isfinite(nominal_rate_hz))
        fail(Errc::dimension_mismatch, "nominal_rate_hz must be > 0");
}

void CsiTrace::validate() const {
    meta.validate();
    const std::size_t expect = static_cast<std::size_t>(meta.n_links) * meta.n_subcarriers;
    std::int64_t prev_t = -1;
    for (std::size_t i = 0; i < packets.size(); ++i) {
        const CsiPacket& p = packets[i];
        if (p.t_us < 0) fail(Errc::non_monotonic_timestamp, "packet timestamp must be >= 0");
        if (p.t_us <= prev_t)
            fail(Errc::non_monotonic_timestamp,
                 "packet timestamps must be strictly increasing at packet " + std::to_string(i));
        prev_t = p.t_us;
        if (p.samples.size() != expect)
            fail(Errc::dimension_mismatch, "packet " + std::to_string(i) + " sample count does not match header");
        for (const CsiSample& s : p.samples) {
            if (!std::isfinite(s.re) || !std::isfinite(s.im))
                fail(Errc::malformed_line, "non-finite CSI value in packet " + std::to_string(i));
        }
    }
}

namespace {

nlohmann::json parse_json_line(const std::string& line, std::size_t lineno) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        fail(Errc::malformed_line, "line " + std::to_string(lineno) + ": not a JSON object");
    return j;
}

double require_number(const nlohmann::json& j, const char* key, std::size_t lineno) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number())
        fail(Errc::malformed_line, "line " + std::to_string(lineno) + ": missing numeric field '" + key + "'");
    return it->get<double>();
}

}  // namespace

CsiTrace parse_trace(std::istream& in) {
    CsiTrace trace;
    std::string line;
    std::size_t lineno = 0;

    // header
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json h = parse_json_line(line, lineno);
        if (!h.contains("type") || h["type"] != "header")
            fail(Errc::missing_header, "first line must be the header object");
        auto id = h.find("trace_id");
        if (id == h.end() || !id->is_string())
            fail(Errc::malformed_line, "header: missing string field 'trace_id'");
        trace.meta.trace_id = id->get<std::string>();
        trace.meta.n_links = static_cast<int>(require_number(h, "n_links", lineno));
        trace.meta.n_subcarriers = static_cast<int>(require_number(h, "n_subcarriers", lineno));
        trace.meta.nominal_rate_hz = require_number(h, "rate_hz", lineno);
        trace.meta.validate();
        have_header = true;
        break;
    }
    if (!have_header) fail(Errc::missing_header, "empty input: no header line");

    const std::size_t n_links = static_cast<std::size_t>(trace.meta.n_links);
    const std::size_t n_sub = static_cast<std::size_t>(trace.meta.n_subcarriers);
    std::int64_t prev_t = -1;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = parse_json_line(line, lineno);

        CsiPacket pkt;
        auto t_it = j.find("t_us");
        if (t_it == j.end() || !t_it->is_number_integer())
            fail(Errc::malformed_line, "line " + std::to_string(lineno) + ": missing integer field 't_us'");
        pkt.t_us = t_it->get<std::int64_t>();
        if (pkt.t_us < 0) fail(Errc::malformed_line, "line " + std::to_string(lineno) + ": t_us must be >= 0");
        if (pkt.t_us <= prev_t)
            fail(Errc::non_monotonic_timestamp,
                 "line " + std::to_string(lineno) + ": timestamps must be strictly increasing");
        prev_t = pkt.t_us;

        auto csi_it = j.find("csi");
        if (csi_it == j.end() || !csi_it->is_array())
            fail(Errc::malformed_line, "line " + std::to_string(lineno) + ": missing array field 'csi'");
        if (csi_it->size() != n_links)
            fail(Errc::dimension_mismatch, "line " + std::to_string(lineno) + ": link count does not match header");

        pkt.samples.reserve(n_links * n_sub);
        for (const auto& link : *csi_it) {
            if (!link.is_array() || link.size() != n_sub)
                fail(Errc::dimension_mismatch,
                     "line " + std::to_string(lineno) + ": subcarrier count does not match header");
            for (const auto& cell : link) {
                if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() || !cell[1].is_number())
                    fail(Errc::malformed_line, "line " + std::to_string(lineno) + ": csi cell must be [re, im]");
                CsiSample s{cell[0].get<double>(), cell[1].get<double>()};
                if (!std::isfinite(s.re) || !std::isfinite(s.im))
                    fail(Errc::malformed_line, "line " + std::to_string(lineno) + ": non-finite csi value");
                pkt.samples.push_back(s);
            }
        }
        trace.packets.push_back(std::move(pkt));
    }
    return trace;
}

CsiTrace parse_trace(const std::string& text) {
    std::istringstream in(text);
    return parse_trace(in);
}

void write_trace(const CsiTrace& trace, std::ostream& out) {
    trace.validate();
    out << "{\"type\":\"header\",\"trace_id\":" << nlohmann::json(trace.meta.trace_id).dump()
        << ",\"n_links\":" << trace.meta.n_links << ",\"n_subcarriers\":" << trace.meta.n_subcarriers
        << ",\"rate_hz\":" << format_double(trace.meta.nominal_rate_hz) << "}\n";

    const int n_links = trace.meta.n_links;
    const int n_sub = trace.meta.n_subcarriers;
    std::string buf;
    for (const CsiPacket& p : trace.packets) {
        buf.clear();
        buf += "{\"t_us\":";
        buf += std::to_string(p.t_us);
        buf += ",\"csi\":[";
        for (int l = 0; l < n_links; ++l) {
            if (l) buf += ',';
            buf += '[';
            for (int s = 0; s < n_sub; ++s) {
                if (s) buf += ',';
                const CsiSample& c = p.samples[static_cast<std::size_t>(l) * n_sub + s];
                buf += '[';
                buf += format_double(c.re);
                buf += ',';
                buf += format_double(c.im);
                buf += ']';
            }
            buf += ']';
        }
        buf += "]}\n";
        out << buf;
    }
}

std::string write_trace(const CsiTrace& trace) {
    std::ostringstream out;
    write_trace(trace, out);
    return out.str();
}

CsiTrace read_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io_error, "cannot open trace file: " + path);
    return parse_trace(in);
}

void write_trace_file(const CsiTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io_error, "cannot write trace file: " + path);
    write_trace(trace, out);
}

}  // namespace afd
