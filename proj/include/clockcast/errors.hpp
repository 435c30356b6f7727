#pragma once

#include <stdexcept>
#include <string>

namespace clockcast {

/// Structured error codes. Every failure surfaced by the library carries one
/// of these plus a human-readable message; parse errors also carry a 1-based
/// line number.
enum class Errc {
  // ingestion
  malformed_line,
  non_monotonic_epoch,
  empty_input,
  missing_header_terminator,
  malformed_record,
  satellite_not_found,
  invalid_config,
  // series transforms
  too_short,
  invalid_step,
  degenerate_series,
  // neural engine
  dimension_mismatch,
  empty_window,
  cache_mismatch,
  empty_dataset,
  degenerate_split,
  nonfinite_loss,
  // arima
  non_stationary_estimate,
  // evaluation
  insufficient_span,
  length_mismatch,
  all_skipped,
  // io / cli
  io_failure,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::malformed_line: return "malformed_line";
    case Errc::non_monotonic_epoch: return "non_monotonic_epoch";
    case Errc::empty_input: return "empty_input";
    case Errc::missing_header_terminator: return "missing_header_terminator";
    case Errc::malformed_record: return "malformed_record";
    case Errc::satellite_not_found: return "satellite_not_found";
    case Errc::invalid_config: return "invalid_config";
    case Errc::too_short: return "too_short";
    case Errc::invalid_step: return "invalid_step";
    case Errc::degenerate_series: return "degenerate_series";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::empty_window: return "empty_window";
    case Errc::cache_mismatch: return "cache_mismatch";
    case Errc::empty_dataset: return "empty_dataset";
    case Errc::degenerate_split: return "degenerate_split";
    case Errc::nonfinite_loss: return "nonfinite_loss";
    case Errc::non_stationary_estimate: return "non_stationary_estimate";
    case Errc::insufficient_span: return "insufficient_span";
    case Errc::length_mismatch: return "length_mismatch";
    case Errc::all_skipped: return "all_skipped";
    case Errc::io_failure: return "io_failure";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, long line = -1)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        line_(line) {}

  Errc code() const noexcept { return code_; }

  /// 1-based input line for parse errors, -1 elsewhere.
  long line() const noexcept { return line_; }

 private:
  Errc code_;
  long line_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message, long line = -1) {
  throw Error(code, message, line);
}

}  // namespace clockcast
