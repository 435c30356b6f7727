#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "clockcast/errors.hpp"
#include "clockcast/linalg.hpp"
#include "clockcast/series.hpp"

namespace clockcast {

/// Reference values below this magnitude are excluded from MAPE (division
/// blow-up guard); exclusions are counted, never silently zeroed.
inline constexpr double kMapeEpsilon = 1e-15;

/// Supervised framing: window i holds values[i..i+window_len), target i is
/// values[i + window_len]. One feature per step.
struct WindowedDataset {
  std::vector<std::vector<Vector>> windows;
  std::vector<double> targets;
  std::size_t window_len = 0;
  std::int64_t step_s = 0;

  std::size_t size() const { return windows.size(); }
};

inline WindowedDataset make_windows(const UniformSeries& u, std::size_t window_len) {
  if (window_len == 0) fail(Errc::invalid_config, "window length must be positive");
  if (u.values.size() < window_len + 1)
    fail(Errc::too_short, "series shorter than window length + 1");
  WindowedDataset ds;
  ds.window_len = window_len;
  ds.step_s = u.step_s;
  const std::size_t count = u.values.size() - window_len;
  ds.windows.reserve(count);
  ds.targets.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<Vector> window;
    window.reserve(window_len);
    for (std::size_t j = 0; j < window_len; ++j) window.push_back(Vector{u.values[i + j]});
    ds.windows.push_back(std::move(window));
    ds.targets.push_back(u.values[i + window_len]);
  }
  return ds;
}

/// Chronological cut: train keeps epochs before start + train_duration, the
/// boundary sample goes to test.
struct SplitSpec {
  std::int64_t train_duration_s = 4 * 86400;
  std::int64_t total_duration_s = 0;
};

inline std::pair<UniformSeries, UniformSeries> split_by_duration(const UniformSeries& u,
                                                                 const SplitSpec& spec) {
  if (spec.train_duration_s <= 0 || spec.train_duration_s >= spec.total_duration_s)
    fail(Errc::invalid_config, "need 0 < train_duration < total_duration");
  if (u.span_s() < spec.total_duration_s)
    fail(Errc::insufficient_span, "series shorter than requested total duration");

  const std::int64_t cut = u.start_epoch_s + spec.train_duration_s;
  const std::int64_t end = u.start_epoch_s + spec.total_duration_s;
  std::size_t split_idx = 0;
  while (split_idx < u.values.size() && u.epoch_at(split_idx) < cut) ++split_idx;
  // The test slice stops at total_duration, so a longer input still yields
  // the requested frame. An epoch exactly on the cut goes to the test side.
  std::size_t end_idx = split_idx;
  while (end_idx < u.values.size() && u.epoch_at(end_idx) < end) ++end_idx;
  if (split_idx == 0 || split_idx == end_idx)
    fail(Errc::insufficient_span, "split leaves an empty side");

  UniformSeries train{u.start_epoch_s, u.step_s,
                      {u.values.begin(), u.values.begin() + static_cast<std::ptrdiff_t>(split_idx)}};
  UniformSeries test{u.epoch_at(split_idx), u.step_s,
                     {u.values.begin() + static_cast<std::ptrdiff_t>(split_idx),
                      u.values.begin() + static_cast<std::ptrdiff_t>(end_idx)}};
  return {std::move(train), std::move(test)};
}

struct Metrics {
  double rmse = 0.0;
  double mae = 0.0;
  double mape_pct = 0.0;
  std::size_t n = 0;        // points included in MAPE
  std::size_t skipped = 0;  // points excluded by the zero guard
};

namespace detail {

inline Metrics compute_metrics_impl(std::span<const double> truth, std::span<const double> pred,
                                    bool allow_all_skipped) {
  if (truth.size() != pred.size()) fail(Errc::length_mismatch, "truth/pred lengths differ");
  if (truth.empty()) fail(Errc::empty_input, "no points to evaluate");

  double sq_sum = 0.0;
  double abs_sum = 0.0;
  double pct_sum = 0.0;
  std::size_t included = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double err = truth[i] - pred[i];
    sq_sum += err * err;
    abs_sum += std::abs(err);
    if (std::abs(truth[i]) > kMapeEpsilon) {
      pct_sum += std::abs(err) / std::abs(truth[i]);
      ++included;
    }
  }

  Metrics m;
  const double count = static_cast<double>(truth.size());
  m.rmse = std::sqrt(sq_sum / count);
  m.mae = abs_sum / count;
  m.n = included;
  m.skipped = truth.size() - included;
  if (included == 0) {
    if (!allow_all_skipped)
      fail(Errc::all_skipped, "every reference value is below the MAPE guard");
    m.mape_pct = std::numeric_limits<double>::quiet_NaN();
  } else {
    m.mape_pct = 100.0 * pct_sum / static_cast<double>(included);
  }
  return m;
}

}  // namespace detail

/// RMSE, MAE and guarded MAPE over aligned vectors. Throws AllSkipped when no
/// reference value clears the MAPE guard.
inline Metrics compute_metrics(std::span<const double> truth, std::span<const double> pred) {
  return detail::compute_metrics_impl(truth, pred, /*allow_all_skipped=*/false);
}

/// Elementwise truth - predicted with epochs attached.
inline std::vector<std::pair<std::int64_t, double>> error_series(
    std::span<const double> truth, std::span<const double> pred,
    std::span<const std::int64_t> epochs) {
  if (truth.size() != pred.size() || truth.size() != epochs.size())
    fail(Errc::length_mismatch, "error_series input lengths differ");
  std::vector<std::pair<std::int64_t, double>> out;
  out.reserve(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) out.emplace_back(epochs[i], truth[i] - pred[i]);
  return out;
}

}  // namespace clockcast
