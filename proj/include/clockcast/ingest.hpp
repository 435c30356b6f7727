#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "clockcast/errors.hpp"
#include "clockcast/rng.hpp"
#include "clockcast/text.hpp"

namespace clockcast {

/// One clock solution: epoch in whole seconds on the GNSS time scale
/// (relative origin, no leap-second handling), bias in seconds.
struct ClockRecord {
  std::int64_t epoch_s = 0;
  double bias_s = 0.0;

  friend bool operator==(const ClockRecord&, const ClockRecord&) = default;
};

struct ClockBiasSeries {
  std::string satellite_id;
  std::vector<ClockRecord> records;  // epochs strictly increasing

  std::size_t size() const { return records.size(); }

  friend bool operator==(const ClockBiasSeries&, const ClockBiasSeries&) = default;
};

struct ClockJump {
  std::int64_t epoch_s = 0;
  double delta_s = 0.0;
};

/// Deterministic synthetic clock model: quadratic polynomial + random walk +
/// white noise + sinusoid + step jumps.
struct SynthConfig {
  double a0_s = 0.0;            // initial bias
  double a1_s_per_s = 0.0;      // drift
  double a2_s_per_s2 = 0.0;     // aging
  double white_sigma_s = 0.0;
  double rw_sigma_s = 0.0;
  double periodic_amp_s = 0.0;
  double periodic_period_s = 0.0;
  std::vector<ClockJump> jumps;
  std::int64_t step_s = 600;
  std::int64_t duration_s = 0;  // samples at k*step for k*step < duration
  std::uint64_t seed = 0;
  std::string satellite_id = "SYNTH";
};

// ---------------------------------------------------------------------------
// CSV (header `epoch_s,bias_s`, decimal or scientific values, '\n' endings)

inline ClockBiasSeries parse_clock_csv(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) fail(Errc::empty_input, "empty document");
  if (lines[0] != "epoch_s,bias_s")
    fail(Errc::malformed_line, "expected header 'epoch_s,bias_s'", 1);

  ClockBiasSeries series;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const long line_no = static_cast<long>(li + 1);
    std::string_view line = lines[li];
    if (line.empty()) {
      if (li + 1 == lines.size()) break;  // trailing newline
      fail(Errc::malformed_line, "blank line", line_no);
    }
    const auto fields = detail::split_char(line, ',');
    if (fields.size() != 2) fail(Errc::malformed_line, "expected two fields", line_no);
    double epoch_raw = 0.0;
    double bias = 0.0;
    if (!detail::parse_double(fields[0], epoch_raw) || !std::isfinite(epoch_raw) ||
        epoch_raw != std::floor(epoch_raw) || std::abs(epoch_raw) > 9.0e18)
      fail(Errc::malformed_line, "epoch is not a whole-second value", line_no);
    if (!detail::parse_double(fields[1], bias) || !std::isfinite(bias))
      fail(Errc::malformed_line, "bias is not a finite number", line_no);
    ClockRecord rec{static_cast<std::int64_t>(epoch_raw), bias};
    if (!series.records.empty() && rec.epoch_s <= series.records.back().epoch_s)
      fail(Errc::non_monotonic_epoch, "epochs must be strictly increasing", line_no);
    series.records.push_back(rec);
  }
  if (series.records.empty()) fail(Errc::empty_input, "no data records");
  return series;
}

inline std::string write_clock_csv(const ClockBiasSeries& series) {
  std::string out = "epoch_s,bias_s\n";
  for (const auto& rec : series.records) {
    out += detail::format_epoch(rec.epoch_s);
    out += ',';
    out += detail::format_double(rec.bias_s);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// RINEX 3.x clock files, `AS` records only

namespace detail {

/// Days since 1970-01-01 for a proleptic Gregorian date (Hinnant's algorithm).
inline std::int64_t days_from_civil(long y, long m, long d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const std::int64_t yoe = y - era * 400;
  const std::int64_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

}  // namespace detail

/// Parses `AS` records for one satellite. Epochs come out in seconds relative
/// to the first AS record in the file; sub-second fractions are rounded.
/// Sigma/rate fields and non-AS lines (AR records, continuations) are ignored.
inline ClockBiasSeries parse_rinex_clk(std::string_view text, std::string_view satellite_id) {
  const auto lines = detail::split_lines(text);
  std::size_t body_start = 0;
  bool header_terminated = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find("END OF HEADER") != std::string_view::npos) {
      body_start = i + 1;
      header_terminated = true;
      break;
    }
  }
  if (!header_terminated) fail(Errc::missing_header_terminator, "no END OF HEADER line");

  ClockBiasSeries series;
  series.satellite_id = std::string(satellite_id);
  bool have_reference = false;
  double reference_epoch = 0.0;
  bool saw_any_as = false;

  for (std::size_t li = body_start; li < lines.size(); ++li) {
    const long line_no = static_cast<long>(li + 1);
    const auto tokens = detail::split_ws(lines[li]);
    if (tokens.empty() || tokens[0] != "AS") continue;
    saw_any_as = true;
    if (tokens.size() < 10) fail(Errc::malformed_record, "truncated AS record", line_no);

    long year = 0, month = 0, day = 0, hour = 0, minute = 0, value_count = 0;
    double second = 0.0, bias = 0.0;
    const bool fields_ok = detail::parse_long(tokens[2], year) &&
                           detail::parse_long(tokens[3], month) &&
                           detail::parse_long(tokens[4], day) &&
                           detail::parse_long(tokens[5], hour) &&
                           detail::parse_long(tokens[6], minute) &&
                           detail::parse_double(tokens[7], second) &&
                           detail::parse_long(tokens[8], value_count);
    if (!fields_ok || month < 1 || month > 12 || day < 1 || day > 31 || value_count < 1)
      fail(Errc::malformed_record, "bad epoch or value count", line_no);
    if (!detail::parse_double(tokens[9], bias) || !std::isfinite(bias))
      fail(Errc::malformed_record, "bad clock bias value", line_no);

    const double abs_seconds =
        static_cast<double>(detail::days_from_civil(year, month, day)) * 86400.0 +
        static_cast<double>(hour) * 3600.0 + static_cast<double>(minute) * 60.0 + second;
    if (!have_reference) {
      reference_epoch = abs_seconds;
      have_reference = true;
    }
    if (tokens[1] != satellite_id) continue;

    const std::int64_t epoch = std::llround(abs_seconds - reference_epoch);
    if (!series.records.empty() && epoch <= series.records.back().epoch_s)
      fail(Errc::malformed_record, "epochs out of order for satellite", line_no);
    series.records.push_back({epoch, bias});
  }

  if (series.records.empty()) {
    fail(Errc::satellite_not_found,
         saw_any_as ? "no AS records for satellite '" + std::string(satellite_id) + "'"
                    : "file contains no AS records");
  }
  return series;
}

// ---------------------------------------------------------------------------
// Synthetic generation

inline void validate(const SynthConfig& cfg) {
  if (cfg.step_s <= 0) fail(Errc::invalid_config, "step must be positive");
  if (cfg.duration_s < 2 * cfg.step_s) fail(Errc::invalid_config, "duration must cover at least two samples");
  if (cfg.white_sigma_s < 0 || cfg.rw_sigma_s < 0 || cfg.periodic_amp_s < 0)
    fail(Errc::invalid_config, "noise sigmas and amplitude must be nonnegative");
  if (cfg.periodic_amp_s > 0 && cfg.periodic_period_s <= 0)
    fail(Errc::invalid_config, "periodic_period must be positive when periodic_amp > 0");
}

/// bias(t) = a0 + a1 t + a2 t^2 / 2 + random_walk + white + sinusoid + jumps.
/// Samples sit at t = k*step for k*step < duration. Bit-identical for a given
/// seed: the generator draws white then (for k > 0) the walk step, every
/// sample, regardless of which sigmas are zero.
inline ClockBiasSeries generate_synthetic_clock(const SynthConfig& cfg) {
  validate(cfg);
  ClockBiasSeries series;
  series.satellite_id = cfg.satellite_id;
  Rng rng(cfg.seed);
  double walk = 0.0;
  for (std::int64_t k = 0;; ++k) {
    const std::int64_t epoch = k * cfg.step_s;
    if (epoch >= cfg.duration_s) break;
    const double t = static_cast<double>(epoch);
    const double white = rng.normal() * cfg.white_sigma_s;
    if (k > 0) walk += rng.normal() * cfg.rw_sigma_s;

    double bias = cfg.a0_s + cfg.a1_s_per_s * t + 0.5 * cfg.a2_s_per_s2 * t * t + walk + white;
    if (cfg.periodic_amp_s > 0)
      bias += cfg.periodic_amp_s * std::sin(2.0 * std::numbers::pi * t / cfg.periodic_period_s);
    for (const auto& jump : cfg.jumps)
      if (jump.epoch_s <= epoch) bias += jump.delta_s;

    series.records.push_back({epoch, bias});
  }
  return series;
}

/// Canonical preset: a Galileo-like rubidium signature. Drift and aging, a
/// 6-hour thermal sinusoid, white phase noise, a slow random walk and one
/// frequency jump mid-series. 31 days at 10-minute cadence.
inline SynthConfig default_synth_preset(std::uint64_t seed = 0) {
  SynthConfig cfg;
  cfg.a0_s = 2.5e-4;
  cfg.a1_s_per_s = 6.7e-12;
  cfg.a2_s_per_s2 = 0.0;  // aging off: keeps the difference sequence stationary
  cfg.white_sigma_s = 1.0e-11;
  cfg.rw_sigma_s = 3.0e-12;
  cfg.periodic_amp_s = 2.0e-9;
  cfg.periodic_period_s = 21600.0;
  cfg.jumps = {{302400, 5.0e-10}};
  cfg.step_s = 600;
  cfg.duration_s = 31 * 86400;
  cfg.seed = seed;
  cfg.satellite_id = "E08";
  return cfg;
}

inline SynthConfig synth_preset(std::string_view name, std::uint64_t seed = 0) {
  if (name == "default" || name == "galileo") return default_synth_preset(seed);
  fail(Errc::invalid_config, "unknown synth preset '" + std::string(name) + "'");
}

}  // namespace clockcast
