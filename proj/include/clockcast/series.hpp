#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "clockcast/errors.hpp"
#include "clockcast/ingest.hpp"
#include "clockcast/text.hpp"

namespace clockcast {

/// Consecutive differences of a clock series plus the base record needed to
/// restore it. diffs[i] = bias[i+1] - bias[i]; step_epochs[i] is the epoch of
/// the later sample.
struct DifferenceSeries {
  std::string satellite_id;
  std::int64_t base_epoch_s = 0;
  double base_value_s = 0.0;
  std::vector<std::int64_t> step_epochs;
  std::vector<double> diffs;
};

/// Evenly spaced values; the epoch of values[i] is start_epoch + i*step.
struct UniformSeries {
  std::int64_t start_epoch_s = 0;
  std::int64_t step_s = 600;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  std::int64_t epoch_at(std::size_t i) const {
    return start_epoch_s + static_cast<std::int64_t>(i) * step_s;
  }
  /// Duration covered, counting one step per sample.
  std::int64_t span_s() const { return static_cast<std::int64_t>(values.size()) * step_s; }

  friend bool operator==(const UniformSeries&, const UniformSeries&) = default;
};

struct ScaleParams {
  double mean = 0.0;
  double std = 1.0;
};

inline DifferenceSeries single_difference(const ClockBiasSeries& series) {
  if (series.size() < 2) fail(Errc::too_short, "need at least two records to difference");
  DifferenceSeries diff;
  diff.satellite_id = series.satellite_id;
  diff.base_epoch_s = series.records[0].epoch_s;
  diff.base_value_s = series.records[0].bias_s;
  diff.step_epochs.reserve(series.size() - 1);
  diff.diffs.reserve(series.size() - 1);
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    diff.step_epochs.push_back(series.records[i + 1].epoch_s);
    diff.diffs.push_back(series.records[i + 1].bias_s - series.records[i].bias_s);
  }
  return diff;
}

/// Exact inverse of single_difference: left-to-right cumulative sum from the
/// base value.
inline ClockBiasSeries restore_from_difference(const DifferenceSeries& diff) {
  if (diff.diffs.size() != diff.step_epochs.size())
    fail(Errc::length_mismatch, "diffs and step_epochs lengths differ");
  ClockBiasSeries series;
  series.satellite_id = diff.satellite_id;
  series.records.reserve(diff.diffs.size() + 1);
  series.records.push_back({diff.base_epoch_s, diff.base_value_s});
  double value = diff.base_value_s;
  for (std::size_t i = 0; i < diff.diffs.size(); ++i) {
    value += diff.diffs[i];
    series.records.push_back({diff.step_epochs[i], value});
  }
  return series;
}

inline std::int64_t min_epoch_interval(const ClockBiasSeries& series) {
  if (series.size() < 2) fail(Errc::too_short, "need at least two records");
  std::int64_t best = series.records[1].epoch_s - series.records[0].epoch_s;
  for (std::size_t i = 1; i + 1 < series.size(); ++i)
    best = std::min(best, series.records[i + 1].epoch_s - series.records[i].epoch_s);
  return best;
}

/// Uniform grid from the first to the last epoch, spacing `step`. A grid
/// point takes the value of the nearest raw sample within step/2 (ties to the
/// earlier sample); otherwise linear interpolation between the bracketing raw
/// samples. No extrapolation: the grid never leaves the raw span.
inline UniformSeries resample_uniform(const ClockBiasSeries& series, std::int64_t step_s) {
  if (step_s <= 0) fail(Errc::invalid_step, "step must be positive");
  if (series.size() < 2) fail(Errc::too_short, "need at least two records to resample");

  const auto& recs = series.records;
  const std::int64_t first = recs.front().epoch_s;
  const std::int64_t last = recs.back().epoch_s;
  const std::size_t count = static_cast<std::size_t>((last - first) / step_s) + 1;

  UniformSeries out;
  out.start_epoch_s = first;
  out.step_s = step_s;
  out.values.reserve(count);

  std::size_t hi = 0;  // first record with epoch >= grid point
  for (std::size_t k = 0; k < count; ++k) {
    const std::int64_t g = first + static_cast<std::int64_t>(k) * step_s;
    while (hi < recs.size() && recs[hi].epoch_s < g) ++hi;

    double value;
    if (hi == 0) {
      value = recs[0].bias_s;  // g == first
    } else if (hi == recs.size()) {
      value = recs.back().bias_s;  // g == last (grid cannot pass it)
    } else {
      const auto& lo_rec = recs[hi - 1];
      const auto& hi_rec = recs[hi];
      const std::int64_t d_lo = g - lo_rec.epoch_s;
      const std::int64_t d_hi = hi_rec.epoch_s - g;
      const std::int64_t d_near = std::min(d_lo, d_hi);
      if (2 * d_near <= step_s) {
        value = (d_lo <= d_hi) ? lo_rec.bias_s : hi_rec.bias_s;
      } else {
        const double span = static_cast<double>(hi_rec.epoch_s - lo_rec.epoch_s);
        value = lo_rec.bias_s +
                static_cast<double>(d_lo) / span * (hi_rec.bias_s - lo_rec.bias_s);
      }
    }
    out.values.push_back(value);
  }
  return out;
}

/// Zero-mean unit-variance transform (sample mean, population std).
inline std::pair<UniformSeries, ScaleParams> standardize(const UniformSeries& u) {
  if (u.values.empty()) fail(Errc::too_short, "empty series");
  double mean = 0.0;
  for (double v : u.values) mean += v;
  mean /= static_cast<double>(u.values.size());
  double var = 0.0;
  for (double v : u.values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(u.values.size());
  const double std_dev = std::sqrt(var);
  if (!(std_dev > 0.0)) fail(Errc::degenerate_series, "zero variance");

  UniformSeries out = u;
  for (double& v : out.values) v = (v - mean) / std_dev;
  return {out, ScaleParams{mean, std_dev}};
}

inline UniformSeries unstandardize(const UniformSeries& u, const ScaleParams& params) {
  if (!(params.std > 0.0)) fail(Errc::degenerate_series, "scale std must be positive");
  UniformSeries out = u;
  for (double& v : out.values) v = v * params.std + params.mean;
  return out;
}

// UniformSeries uses the clock CSV schema with implied epochs materialized.
inline std::string write_uniform_csv(const UniformSeries& u) {
  std::string out = "epoch_s,bias_s\n";
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    out += detail::format_epoch(u.epoch_at(i));
    out += ',';
    out += detail::format_double(u.values[i]);
    out += '\n';
  }
  return out;
}

/// Difference series viewed as a (epoch, value) series so it can be resampled
/// with the same machinery as raw biases.
inline ClockBiasSeries as_point_series(const DifferenceSeries& diff) {
  ClockBiasSeries series;
  series.satellite_id = diff.satellite_id;
  series.records.reserve(diff.diffs.size());
  for (std::size_t i = 0; i < diff.diffs.size(); ++i)
    series.records.push_back({diff.step_epochs[i], diff.diffs[i]});
  return series;
}

}  // namespace clockcast
