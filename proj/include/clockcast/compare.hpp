#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "clockcast/arima.hpp"
#include "clockcast/checkpoint.hpp"
#include "clockcast/errors.hpp"
#include "clockcast/eval.hpp"
#include "clockcast/neural.hpp"
#include "clockcast/rng.hpp"
#include "clockcast/series.hpp"
#include "clockcast/text.hpp"
#include "clockcast/training.hpp"

namespace clockcast {

/// Architecture widths for the three neural models. Defaults are the
/// full-scale profile; tiny() is the desk-scale profile used by tests.
struct NeuralHyper {
  std::size_t window_len = 12;
  std::vector<std::size_t> lstm_units{512, 256};
  std::vector<std::size_t> lstm_dense{128, 64, 32};
  std::vector<std::size_t> rnn_units{64};
  std::vector<std::size_t> rnn_dense{};  // head goes straight to the linear unit
  std::vector<std::size_t> mlp_hidden{64, 32};

  static NeuralHyper tiny() {
    NeuralHyper h;
    h.lstm_units = {32, 16};
    h.lstm_dense = {16, 8, 4};
    h.rnn_units = {16};
    h.rnn_dense = {};
    h.mlp_hidden = {16, 8};
    return h;
  }
};

// ---------------------------------------------------------------------------
// Input scaling around training statistics
//
// Networks train in standardized space (difference values are ~1e-11 s;
// untransformed they are invisible to a 0.001 learning rate). std == 0 marks
// a constant training series: scaled space collapses to zero and unscaling
// returns the constant, making the fitted model an exact mean predictor.

inline ScaleParams fit_scale(const std::vector<double>& values) {
  ScaleParams s;
  if (values.empty()) return s;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  s.mean = mean;
  s.std = std::sqrt(var);
  return s;
}

inline double scale_value(double v, const ScaleParams& s) {
  return s.std > 0.0 ? (v - s.mean) / s.std : 0.0;
}

inline double unscale_value(double z, const ScaleParams& s) { return s.mean + z * s.std; }

// ---------------------------------------------------------------------------
// Seed derivation: one master seed fans out to independent per-purpose
// streams through SplitMix64, so adding a model never perturbs another
// model's draws.

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  SplitMix64 sm(master);
  std::uint64_t s = sm.next();
  for (std::uint64_t i = 0; i < stream; ++i) s = sm.next();
  return s;
}

// ---------------------------------------------------------------------------
// Fit / forecast wrappers over the checkpoint representation

/// Trains one neural model on a uniform (difference-domain) series. The seed
/// splits into an init stream and a batch-shuffle stream.
inline Checkpoint fit_neural(ModelKind kind, const UniformSeries& train,
                             const NeuralHyper& hyper, TrainConfig cfg, std::uint64_t seed) {
  const ScaleParams scale = fit_scale(train.values);
  UniformSeries scaled = train;
  for (double& v : scaled.values) v = scale_value(v, scale);

  WindowedDataset data = make_windows(scaled, hyper.window_len);

  SplitMix64 sm(seed);
  const std::uint64_t init_seed = sm.next();
  cfg.seed = sm.next();

  Checkpoint cp;
  cp.scale = scale;
  cp.window_len = hyper.window_len;
  cp.step_s = train.step_s;

  switch (kind) {
    case ModelKind::lstm: {
      LstmNetwork net = make_lstm_network(1, hyper.lstm_units, hyper.lstm_dense, init_seed);
      cp.history = clockcast::train(net, data, cfg);
      cp.model = std::move(net);
      break;
    }
    case ModelKind::rnn: {
      RnnNetwork net = make_rnn_network(1, hyper.rnn_units, hyper.rnn_dense, init_seed);
      cp.history = clockcast::train(net, data, cfg);
      cp.model = std::move(net);
      break;
    }
    case ModelKind::mlp: {
      MlpNetwork net = make_mlp_network(hyper.window_len, hyper.mlp_hidden, init_seed);
      cp.history = clockcast::train(net, data, cfg);
      cp.model = std::move(net);
      break;
    }
    default:
      fail(Errc::invalid_config, "fit_neural handles lstm/rnn/mlp only");
  }
  cp.train_config = cfg;
  return cp;
}

inline Checkpoint fit_arima(const UniformSeries& train, const ArimaOrder& order,
                            std::int64_t step_s) {
  Checkpoint cp;
  cp.model = arima_fit(train, order);
  cp.scale = ScaleParams{0.0, 1.0};
  cp.window_len = 0;
  cp.step_s = step_s;
  return cp;
}

/// Closed-loop forecast. Neural models seed from the last window of
/// `context` (scaled, predictions fed back, outputs unscaled); ARIMA
/// continues from its stored training tail and ignores `context`.
inline std::vector<double> forecast(const Checkpoint& cp, const UniformSeries& context,
                                    std::size_t horizon) {
  if (horizon == 0) fail(Errc::invalid_config, "horizon must be at least 1");
  if (std::holds_alternative<ArimaModel>(cp.model))
    return arima_forecast(std::get<ArimaModel>(cp.model), horizon);

  if (context.values.size() < cp.window_len)
    fail(Errc::too_short, "context shorter than the model window");
  std::vector<Vector> window;
  window.reserve(cp.window_len);
  for (std::size_t i = context.values.size() - cp.window_len; i < context.values.size(); ++i)
    window.push_back(Vector{scale_value(context.values[i], cp.scale)});

  std::vector<double> scaled = std::visit(
      [&](const auto& net) -> std::vector<double> {
        using T = std::decay_t<decltype(net)>;
        if constexpr (std::is_same_v<T, ArimaModel>)
          return {};
        else
          return predict_recursive(net, window, horizon);
      },
      cp.model);

  for (double& v : scaled) v = unscale_value(v, cp.scale);
  return scaled;
}

// ---------------------------------------------------------------------------
// Comparison protocol

enum class MetricDomain { difference, bias };

inline const char* domain_name(MetricDomain d) {
  return d == MetricDomain::difference ? "difference" : "bias";
}

inline MetricDomain domain_from_name(const std::string& name) {
  if (name == "difference") return MetricDomain::difference;
  if (name == "bias") return MetricDomain::bias;
  fail(Errc::invalid_config, "domain must be 'difference' or 'bias'");
}

struct CompareOptions {
  std::vector<ModelKind> models{ModelKind::lstm, ModelKind::rnn, ModelKind::mlp,
                                ModelKind::arima};
  NeuralHyper hyper{};
  TrainConfig train{};
  ArimaOrder arima_order{1, 1, 1};
  bool arima_auto = false;
  std::uint64_t seed = 0;
  MetricDomain domain = MetricDomain::difference;
  double base_bias = 0.0;  // restored bias preceding the first difference (bias domain only)
};

struct ForecastReport {
  ModelKind model = ModelKind::persistence;
  double time_frame_days = 0.0;
  Metrics metrics{};
  std::vector<std::pair<std::int64_t, double>> errors;  // (epoch, truth - predicted)
  std::string error;  // nonempty: the model failed and metrics are NaN
};

namespace detail {

inline std::vector<double> cumulative_from(double base, const std::vector<double>& diffs) {
  std::vector<double> out;
  out.reserve(diffs.size());
  double acc = base;
  for (double d : diffs) {
    acc += d;
    out.push_back(acc);
  }
  return out;
}

inline std::uint64_t kind_stream(ModelKind k) {
  switch (k) {
    case ModelKind::lstm: return 0;
    case ModelKind::rnn: return 1;
    case ModelKind::mlp: return 2;
    case ModelKind::arima: return 3;
    case ModelKind::persistence: return 4;
  }
  return 5;
}

}  // namespace detail

/// Fits every requested model on the chronological training slice, forecasts
/// the whole test span closed-loop, and scores in the requested domain. A
/// PERSISTENCE row (repeat the last training value) is always appended.
/// Per-model failures become error rows, never a global abort. Rows are
/// sorted by RMSE ascending with failed rows last.
inline std::vector<ForecastReport> compare_models(const UniformSeries& diffs,
                                                  const SplitSpec& split,
                                                  const CompareOptions& opt) {
  auto [train_series, test_series] = split_by_duration(diffs, split);
  const std::size_t horizon = test_series.values.size();
  const double frame_days = static_cast<double>(split.total_duration_s) / 86400.0;

  std::vector<std::int64_t> epochs(horizon);
  for (std::size_t i = 0; i < horizon; ++i) epochs[i] = test_series.epoch_at(i);

  // Bias the test span restores from: base_bias plus everything in train.
  double restored_base = opt.base_bias;
  for (double v : train_series.values) restored_base += v;

  const std::vector<double> truth =
      opt.domain == MetricDomain::difference
          ? test_series.values
          : detail::cumulative_from(restored_base, test_series.values);

  std::vector<ModelKind> kinds = opt.models;
  kinds.push_back(ModelKind::persistence);

  std::vector<ForecastReport> reports;
  reports.reserve(kinds.size());
  for (ModelKind kind : kinds) {
    ForecastReport report;
    report.model = kind;
    report.time_frame_days = frame_days;
    try {
      std::vector<double> preds;
      if (kind == ModelKind::persistence) {
        preds.assign(horizon, train_series.values.back());
      } else if (kind == ModelKind::arima) {
        const ArimaOrder order =
            opt.arima_auto ? arima_auto_order(train_series) : opt.arima_order;
        Checkpoint cp = fit_arima(train_series, order, train_series.step_s);
        preds = forecast(cp, train_series, horizon);
      } else {
        const std::uint64_t seed = derive_seed(opt.seed, detail::kind_stream(kind));
        Checkpoint cp = fit_neural(kind, train_series, opt.hyper, opt.train, seed);
        preds = forecast(cp, train_series, horizon);
      }
      if (opt.domain == MetricDomain::bias)
        preds = detail::cumulative_from(restored_base, preds);

      report.metrics = detail::compute_metrics_impl(truth, preds, /*allow_all_skipped=*/true);
      report.errors = error_series(truth, preds, epochs);
    } catch (const Error& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      report.metrics = Metrics{nan, nan, nan, 0, 0};
      report.error = e.what();  // what() already carries the errc name
    }
    reports.push_back(std::move(report));
  }

  std::stable_sort(reports.begin(), reports.end(),
                   [](const ForecastReport& a, const ForecastReport& b) {
                     const double ra = a.error.empty() ? a.metrics.rmse
                                                       : std::numeric_limits<double>::infinity();
                     const double rb = b.error.empty() ? b.metrics.rmse
                                                       : std::numeric_limits<double>::infinity();
                     return ra < rb;
                   });
  return reports;
}

// ---------------------------------------------------------------------------
// Report rendering

/// `model,time_frame_days,rmse,mae,mape_pct,n,skipped`; one row per report,
/// frames in input order. Failed rows carry nan metrics.
inline std::string render_report_csv(const std::vector<ForecastReport>& reports) {
  std::string out = "model,time_frame_days,rmse,mae,mape_pct,n,skipped\n";
  for (const auto& r : reports) {
    out += report_name(r.model);
    out += ',';
    out += detail::format_double(r.time_frame_days);
    out += ',';
    out += detail::format_double(r.metrics.rmse);
    out += ',';
    out += detail::format_double(r.metrics.mae);
    out += ',';
    out += detail::format_double(r.metrics.mape_pct);
    out += ',';
    out += std::to_string(r.metrics.n);
    out += ',';
    out += std::to_string(r.metrics.skipped);
    out += '\n';
  }
  return out;
}

/// Plot data: `epoch_s,model,error_s`, models in report order.
inline std::string render_error_series_csv(const std::vector<ForecastReport>& reports) {
  std::string out = "epoch_s,model,error_s\n";
  for (const auto& r : reports) {
    const std::string name = report_name(r.model);
    for (const auto& [epoch, err] : r.errors) {
      out += detail::format_epoch(epoch);
      out += ',';
      out += name;
      out += ',';
      out += detail::format_double(err);
      out += '\n';
    }
  }
  return out;
}

}  // namespace clockcast
