#pragma once

#include <stdexcept>
#include <string>

namespace afd {

// Every recoverable failure in the library is one of these codes. The CLI
// maps them to process exit codes (see exit_code_for).
enum class Errc {
    // trace-model
    malformed_line,
    non_monotonic_timestamp,
    dimension_mismatch,
    missing_header,
    // preprocess
    too_few_packets,
    invalid_cutoff,
    // segmentation
    window_too_short,
    trace_too_short,
    bad_link_index,
    bad_subcarrier_index,
    end_out_of_range,
    // features
    bad_counts,
    empty_channel,
    length_mismatch,
    // ocsvm
    empty_training_set,
    layout_mismatch,
    version_mismatch,
    corrupt_model,
    empty_resulting_set,
    // synth
    invalid_scenario,
    malformed_scenario,
    overlapping_events,
    // harness
    insufficient_data,
    bad_config,
    io_error,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

const char* errc_name(Errc code);

// CLI contract: 0 ok, 2 bad input file, 3 config error, 4 insufficient data.
int exit_code_for(Errc code);

}  // namespace afd
