#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "clockcast/clockcast.hpp"

namespace clockcast {

namespace cli_detail {

/// Flat JSON config: top-level object, one key per long option name, flags
/// as booleans, everything else as strings. Keys starting with '_' are
/// manifest metadata; '_subcommand' routes every key to that subcommand, so
/// a run manifest doubles as a config file for the same subcommand.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool /*write_description*/,
                        std::string /*prefix*/) const override {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    emit_options(app, default_also, j);
    for (const CLI::App* grp : app->get_subcommands([](const CLI::App* s) {
           return s->get_name().empty();  // option groups
         }))
      emit_options(grp, default_also, j);
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConfigError("config file must hold a JSON object");

    std::vector<std::string> parents;
    if (j.contains("_subcommand") && j["_subcommand"].is_string())
      parents.push_back(j["_subcommand"].get<std::string>());

    std::vector<CLI::ConfigItem> items;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!it.key().empty() && it.key()[0] == '_') continue;
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      const auto& v = it.value();
      if (v.is_array()) {
        for (const auto& e : v) item.inputs.push_back(e.is_string() ? e.get<std::string>() : e.dump());
      } else if (v.is_boolean()) {
        item.inputs.push_back(v.get<bool>() ? "true" : "false");
      } else if (v.is_string()) {
        item.inputs.push_back(v.get<std::string>());
      } else if (!v.is_null()) {
        item.inputs.push_back(v.dump());
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static void emit_options(const CLI::App* app, bool default_also, nlohmann::ordered_json& j) {
    for (const CLI::Option* opt : app->get_options({})) {
      if (!opt->get_configurable()) continue;
      const std::string name = opt->get_single_name();
      if (name.empty() || name == "config") continue;

      if (opt->get_expected_min() == 0) {  // flag
        bool on = opt->count() > 0;
        if (on) {
          const auto res = opt->reduced_results();
          if (!res.empty() && (res[0] == "false" || res[0] == "0")) on = false;
        }
        j[name] = on;
        continue;
      }

      const auto results = opt->reduced_results();
      if (!results.empty()) {
        if (results.size() == 1)
          j[name] = results[0];
        else
          j[name] = results;
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Small parsers for comma-joined option values

inline std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  for (auto tok : detail::split_char(text, ',')) {
    long v = 0;
    if (!detail::parse_long(tok, v) || v <= 0)
      fail(Errc::invalid_config, std::string(what) + ": expected positive integers, got '" +
                                     std::string(tok) + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) fail(Errc::invalid_config, std::string(what) + ": empty list");
  return out;
}

inline std::vector<double> parse_frames(const std::string& text) {
  std::vector<double> out;
  for (auto tok : detail::split_char(text, ',')) {
    double v = 0;
    if (!detail::parse_double(tok, v) || !(v > 0))
      fail(Errc::invalid_config, "frames: expected positive day counts, got '" + std::string(tok) + "'");
    out.push_back(v);
  }
  if (out.empty()) fail(Errc::invalid_config, "frames: empty list");
  return out;
}

inline ArimaOrder parse_order(const std::string& text) {
  const auto parts = detail::split_char(text, ',');
  if (parts.size() != 3) fail(Errc::invalid_config, "arima-order must be 'p,d,q'");
  long v[3];
  for (int i = 0; i < 3; ++i)
    if (!detail::parse_long(parts[i], v[i]) || v[i] < 0)
      fail(Errc::invalid_config, "arima-order components must be non-negative integers");
  ArimaOrder order{static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1]),
                   static_cast<std::size_t>(v[2])};
  validate(order);
  return order;
}

inline std::vector<ModelKind> parse_models(const std::string& text) {
  std::vector<ModelKind> out;
  for (auto tok : detail::split_char(text, ',')) {
    const ModelKind k = kind_from_name(std::string(tok));
    if (k == ModelKind::persistence)
      fail(Errc::invalid_config, "persistence is always included; do not request it");
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  if (out.empty()) fail(Errc::invalid_config, "models: empty list");
  return out;
}

/// Strict view of an already-preprocessed CSV: equal spacing required.
inline UniformSeries uniform_from_records(const ClockBiasSeries& s) {
  if (s.records.size() < 2) fail(Errc::too_short, "need at least 2 samples");
  const std::int64_t step = s.records[1].epoch_s - s.records[0].epoch_s;
  for (std::size_t i = 1; i + 1 < s.records.size(); ++i)
    if (s.records[i + 1].epoch_s - s.records[i].epoch_s != step)
      fail(Errc::invalid_config, "input is not uniformly spaced; run preprocess first");
  UniformSeries u{s.records[0].epoch_s, step, {}};
  u.values.reserve(s.records.size());
  for (const auto& r : s.records) u.values.push_back(r.bias_s);
  return u;
}

// ---------------------------------------------------------------------------
// Shared option bundles

struct SourceOpts {
  std::string csv;
  std::string rinex;
  std::string satellite;
  std::string synth;  // preset name; compare only
};

inline void add_file_source(CLI::App* sub, SourceOpts& src, bool with_synth) {
  auto* grp = sub->add_option_group("source", "exactly one data source");
  auto* csv = grp->add_option("--csv", src.csv, "clock bias CSV (epoch_s,bias_s)");
  auto* rinex = grp->add_option("--rinex", src.rinex, "RINEX 3.x clock file");
  if (with_synth) grp->add_option("--synth", src.synth, "synthetic preset (default|galileo)");
  grp->require_option(1);
  auto* sat = sub->add_option("--satellite", src.satellite, "satellite id for --rinex (e.g. E08)");
  sat->needs(rinex);
  rinex->needs(sat);
  (void)csv;
}

inline ClockBiasSeries load_file_source(const SourceOpts& src) {
  if (!src.csv.empty()) return parse_clock_csv(detail::read_text_file(src.csv));
  return parse_rinex_clk(detail::read_text_file(src.rinex), src.satellite);
}

struct HyperOpts {
  bool tiny = false;
  std::size_t window = 12;
  std::string lstm_units, lstm_dense, rnn_units, mlp_hidden;

  NeuralHyper resolve() const {
    NeuralHyper h = tiny ? NeuralHyper::tiny() : NeuralHyper{};
    h.window_len = window;
    if (!lstm_units.empty()) h.lstm_units = parse_size_list(lstm_units, "lstm-units");
    if (!lstm_dense.empty()) h.lstm_dense = parse_size_list(lstm_dense, "lstm-dense");
    if (!rnn_units.empty()) h.rnn_units = parse_size_list(rnn_units, "rnn-units");
    if (!mlp_hidden.empty()) h.mlp_hidden = parse_size_list(mlp_hidden, "mlp-hidden");
    return h;
  }
};

inline void add_hyper(CLI::App* sub, HyperOpts& h) {
  sub->add_flag("--tiny", h.tiny, "desk-scale profile (lstm 32,16; dense 16,8,4; rnn 16; mlp 16,8)");
  sub->add_option("--window", h.window, "input window length in steps")->capture_default_str();
  sub->add_option("--lstm-units", h.lstm_units, "comma-joined LSTM layer widths");
  sub->add_option("--lstm-dense", h.lstm_dense, "comma-joined dense hidden widths (LSTM head)");
  sub->add_option("--rnn-units", h.rnn_units, "comma-joined RNN layer widths");
  sub->add_option("--mlp-hidden", h.mlp_hidden, "comma-joined MLP hidden widths");
}

struct TrainOpts {
  double lr = 0.001;
  std::size_t epochs = 10;
  std::size_t patience = 3;
  std::size_t batch = 32;
  double val_fraction = 0.1;
  double clip = 5.0;
  bool no_clip = false;

  TrainConfig resolve() const {
    TrainConfig cfg;
    cfg.learning_rate = lr;
    cfg.max_epochs = epochs;
    cfg.patience = patience;
    cfg.batch_size = batch;
    cfg.validation_fraction = val_fraction;
    if (no_clip)
      cfg.clip_norm.reset();
    else
      cfg.clip_norm = clip;
    return cfg;
  }
};

inline void add_train(CLI::App* sub, TrainOpts& t) {
  sub->add_option("--lr", t.lr, "Adam learning rate")->capture_default_str();
  sub->add_option("--epochs", t.epochs, "maximum training epochs")->capture_default_str();
  sub->add_option("--patience", t.patience, "early-stopping patience")->capture_default_str();
  sub->add_option("--batch", t.batch, "mini-batch size")->capture_default_str();
  sub->add_option("--val-fraction", t.val_fraction, "chronological validation fraction")
      ->capture_default_str();
  sub->add_option("--clip", t.clip, "global gradient-norm clip")->capture_default_str();
  sub->add_flag("--no-clip", t.no_clip, "disable gradient clipping");
}

struct ArimaOpts {
  std::string order = "1,1,1";
  bool auto_order = false;
};

inline void add_arima(CLI::App* sub, ArimaOpts& a) {
  sub->add_option("--arima-order", a.order, "p,d,q")->capture_default_str();
  sub->add_flag("--arima-auto", a.auto_order, "pick p,d,q by AIC grid (p,q in 0..3, d in 0..2)");
}

inline std::string artifact_path(const std::string& out_dir, const std::string& name) {
  return (std::filesystem::path(out_dir) / name).string();
}

inline void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(Errc::io_failure, "cannot create out-dir '" + out_dir + "': " + ec.message());
}

/// Resolved config + metadata; rereading it as --config reproduces the run.
inline void write_manifest(const CLI::App* sub, const std::string& out_dir) {
  nlohmann::ordered_json manifest;
  manifest["_schema"] = "clockcast-run-manifest";
  manifest["_version"] = 1;
  manifest["_toolkit"] = kVersion;
  manifest["_subcommand"] = sub->get_name();
  const auto opts = nlohmann::ordered_json::parse(sub->config_to_str(/*default_also=*/true, false));
  for (const auto& [k, v] : opts.items()) manifest[k] = v;
  detail::write_text_file(artifact_path(out_dir, "run-manifest.json"), manifest.dump(2) + "\n");
}

inline std::string render_history_csv(const TrainHistory& h) {
  std::string out = "epoch,train_loss,val_loss\n";
  for (std::size_t i = 0; i < h.train_loss.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += detail::format_double(h.train_loss[i]);
    out += ',';
    out += detail::format_double(h.val_loss[i]);
    out += '\n';
  }
  return out;
}

inline std::string render_metrics_csv(const std::vector<ForecastReport>& reports) {
  return render_report_csv(reports);
}

}  // namespace cli_detail

/// Entry point shared by the binary and the tests. `args` excludes the
/// program name. Exit codes: 0 success, 1 runtime failure (message names the
/// stage), 2 usage error.
inline int run_cli(std::vector<std::string> args) {
  using namespace cli_detail;

  CLI::App app{"satellite clock bias forecasting toolkit"};
  app.name("clockcast");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  // Subcommands inherit the formatter and fallthrough; --config lives on the
  // root because CLI11 only reads config files there, and fallthrough lets
  // `clockcast <sub> --config file` reach it. from_config routes keys to the
  // subcommand named by the file's _subcommand entry.
  auto formatter = std::make_shared<JsonConfig>();
  app.config_formatter(formatter);
  app.fallthrough();
  app.set_config("--config", "", "JSON config or run manifest (command line wins)");

  std::string stage = "cli";

  // --- synth ---------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "emit a synthetic clock-bias CSV");
  struct {
    std::string preset = "default";
    std::uint64_t seed = 0;
    double duration_days = 31.0;
    std::int64_t step = 600;
    std::string satellite = "E08";
    double a0 = 2.5e-4, a1 = 6.7e-12, a2 = 0.0;
    double white = 1.0e-11, rw = 3.0e-12, amp = 2.0e-9, period = 21600.0;
    std::string out_dir = ".";
  } sy;
  synth->add_option("--preset", sy.preset, "parameter preset")
      ->check(CLI::IsMember({"default", "galileo"}))
      ->capture_default_str();
  synth->add_option("--seed", sy.seed, "PRNG seed")->capture_default_str();
  synth->add_option("--duration-days", sy.duration_days, "series length in days")
      ->capture_default_str();
  synth->add_option("--step", sy.step, "sample spacing in seconds")->capture_default_str();
  synth->add_option("--satellite-id", sy.satellite, "id written into the series")
      ->capture_default_str();
  synth->add_option("--a0", sy.a0, "initial bias, s")->capture_default_str();
  synth->add_option("--a1", sy.a1, "drift, s/s")->capture_default_str();
  synth->add_option("--a2", sy.a2, "aging, s/s^2")->capture_default_str();
  synth->add_option("--white-sigma", sy.white, "white noise sigma, s")->capture_default_str();
  synth->add_option("--rw-sigma", sy.rw, "random-walk step sigma, s")->capture_default_str();
  synth->add_option("--amp", sy.amp, "periodic amplitude, s")->capture_default_str();
  synth->add_option("--period", sy.period, "periodic period, s")->capture_default_str();
  synth->add_option("--out-dir", sy.out_dir, "output directory")->capture_default_str();
  synth->callback([&] {
    stage = "synth";
    SynthConfig cfg = synth_preset(sy.preset, sy.seed);
    cfg.a0_s = sy.a0;
    cfg.a1_s_per_s = sy.a1;
    cfg.a2_s_per_s2 = sy.a2;
    cfg.white_sigma_s = sy.white;
    cfg.rw_sigma_s = sy.rw;
    cfg.periodic_amp_s = sy.amp;
    cfg.periodic_period_s = sy.period;
    cfg.step_s = sy.step;
    cfg.duration_s = static_cast<std::int64_t>(std::llround(sy.duration_days * 86400.0));
    cfg.satellite_id = sy.satellite;
    const ClockBiasSeries series = generate_synthetic_clock(cfg);
    ensure_out_dir(sy.out_dir);
    detail::write_text_file(artifact_path(sy.out_dir, "synthetic.csv"), write_clock_csv(series));
    write_manifest(synth, sy.out_dir);
  });

  // --- preprocess ----------------------------------------------------------
  auto* pre = app.add_subcommand("preprocess", "difference and resample onto a uniform grid");
  struct {
    SourceOpts src;
    std::int64_t step = 0;
    bool standardize_flag = false;
    std::string out_dir = ".";
  } pp;
  add_file_source(pre, pp.src, /*with_synth=*/false);
  pre->add_option("--step", pp.step, "grid step in seconds (0 = smallest raw interval)")
      ->capture_default_str();
  pre->add_flag("--standardize", pp.standardize_flag, "standardize the output values");
  pre->add_option("--out-dir", pp.out_dir, "output directory")->capture_default_str();
  pre->callback([&] {
    stage = "preprocess";
    const ClockBiasSeries raw = load_file_source(pp.src);
    const DifferenceSeries diff = single_difference(raw);
    const std::int64_t step = pp.step > 0 ? pp.step : min_epoch_interval(raw);
    UniformSeries u = resample_uniform(as_point_series(diff), step);
    if (pp.standardize_flag) u = standardize(u).first;
    ensure_out_dir(pp.out_dir);
    detail::write_text_file(artifact_path(pp.out_dir, "preprocessed.csv"), write_uniform_csv(u));
    write_manifest(pre, pp.out_dir);
  });

  // --- train ---------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "fit one model on a preprocessed series");
  struct {
    std::string csv;
    std::string model = "lstm";
    HyperOpts hyper;
    TrainOpts train;
    ArimaOpts arima;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
  } tr;
  train_cmd->add_option("--csv", tr.csv, "preprocessed uniform CSV")->required();
  train_cmd->add_option("--model", tr.model, "lstm|rnn|mlp|arima")
      ->check(CLI::IsMember({"lstm", "rnn", "mlp", "arima"}))
      ->capture_default_str();
  add_hyper(train_cmd, tr.hyper);
  add_train(train_cmd, tr.train);
  add_arima(train_cmd, tr.arima);
  train_cmd->add_option("--seed", tr.seed, "master seed (required: no silent entropy)")->required();
  train_cmd->add_option("--out-dir", tr.out_dir, "output directory")->capture_default_str();
  train_cmd->callback([&] {
    stage = "train";
    const UniformSeries u = uniform_from_records(parse_clock_csv(detail::read_text_file(tr.csv)));
    const ModelKind kind = kind_from_name(tr.model);
    Checkpoint cp;
    if (kind == ModelKind::arima) {
      const ArimaOrder order =
          tr.arima.auto_order ? arima_auto_order(u) : parse_order(tr.arima.order);
      cp = fit_arima(u, order, u.step_s);
    } else {
      cp = fit_neural(kind, u, tr.hyper.resolve(), tr.train.resolve(), tr.seed);
    }
    ensure_out_dir(tr.out_dir);
    save_checkpoint(artifact_path(tr.out_dir, "checkpoint.json"), cp);
    detail::write_text_file(artifact_path(tr.out_dir, "history.csv"),
                            render_history_csv(cp.history));
    write_manifest(train_cmd, tr.out_dir);
  });

  // --- predict ---------------------------------------------------------------
  auto* predict = app.add_subcommand("predict", "closed-loop forecast from a checkpoint");
  struct {
    std::string checkpoint;
    std::string csv;
    std::size_t horizon = 0;
    std::string out_dir = ".";
  } pr;
  predict->add_option("--checkpoint", pr.checkpoint, "checkpoint JSON")->required();
  predict->add_option("--csv", pr.csv, "context series (seed window; grid source)")->required();
  predict->add_option("--horizon", pr.horizon, "steps to forecast")
      ->required()
      ->check(CLI::PositiveNumber);
  predict->add_option("--out-dir", pr.out_dir, "output directory")->capture_default_str();
  predict->callback([&] {
    stage = "predict";
    const Checkpoint cp = load_checkpoint(pr.checkpoint);
    const UniformSeries ctx = uniform_from_records(parse_clock_csv(detail::read_text_file(pr.csv)));
    const std::vector<double> preds = forecast(cp, ctx, pr.horizon);
    UniformSeries out{ctx.epoch_at(ctx.values.size()), ctx.step_s, preds};
    ensure_out_dir(pr.out_dir);
    detail::write_text_file(artifact_path(pr.out_dir, "forecast.csv"), write_uniform_csv(out));
    write_manifest(predict, pr.out_dir);
  });

  // --- evaluate --------------------------------------------------------------
  auto* evaluate = app.add_subcommand("evaluate", "score a checkpoint against a truth series");
  struct {
    std::string checkpoint;
    std::string csv;
    std::string out_dir = ".";
  } ev;
  evaluate->add_option("--checkpoint", ev.checkpoint, "checkpoint JSON")->required();
  evaluate->add_option("--csv", ev.csv, "truth series; first window_len rows seed the model")
      ->required();
  evaluate->add_option("--out-dir", ev.out_dir, "output directory")->capture_default_str();
  evaluate->callback([&] {
    stage = "evaluate";
    const Checkpoint cp = load_checkpoint(ev.checkpoint);
    const UniformSeries u = uniform_from_records(parse_clock_csv(detail::read_text_file(ev.csv)));
    if (u.values.size() <= cp.window_len)
      fail(Errc::too_short, "series does not extend past the model window");
    const std::size_t horizon = u.values.size() - cp.window_len;
    UniformSeries ctx{u.start_epoch_s, u.step_s,
                      {u.values.begin(), u.values.begin() + static_cast<std::ptrdiff_t>(cp.window_len)}};
    const std::vector<double> preds = forecast(cp, ctx, horizon);
    const std::vector<double> truth(u.values.begin() + static_cast<std::ptrdiff_t>(cp.window_len),
                                    u.values.end());

    ForecastReport report;
    report.model = cp.kind();
    report.time_frame_days =
        static_cast<double>(static_cast<std::int64_t>(horizon) * u.step_s) / 86400.0;
    report.metrics = compute_metrics(truth, preds);
    ensure_out_dir(ev.out_dir);
    detail::write_text_file(artifact_path(ev.out_dir, "metrics.csv"), render_metrics_csv({report}));
    write_manifest(evaluate, ev.out_dir);
  });

  // --- compare ---------------------------------------------------------------
  auto* compare = app.add_subcommand("compare", "multi-model, multi-frame comparison protocol");
  struct {
    SourceOpts src;
    std::string frames = "7,14,21,31";
    double train_days = 4.0;
    std::string models = "lstm,rnn,mlp,arima";
    HyperOpts hyper;
    TrainOpts train;
    ArimaOpts arima;
    std::string domain = "difference";
    std::int64_t step = 0;
    std::uint64_t seed = 0;
    std::uint64_t data_seed = 7;
    std::string out_dir = ".";
  } cm;
  add_file_source(compare, cm.src, /*with_synth=*/true);
  compare->add_option("--frames", cm.frames, "comma-joined frame lengths in days")
      ->capture_default_str();
  compare->add_option("--train-days", cm.train_days, "training span in days")
      ->capture_default_str();
  compare->add_option("--models", cm.models, "comma-joined subset of lstm,rnn,mlp,arima")
      ->capture_default_str();
  add_hyper(compare, cm.hyper);
  add_train(compare, cm.train);
  add_arima(compare, cm.arima);
  compare->add_option("--domain", cm.domain, "metric domain")
      ->check(CLI::IsMember({"difference", "bias"}))
      ->capture_default_str();
  compare->add_option("--step", cm.step, "grid step in seconds (0 = auto)")->capture_default_str();
  compare->add_option("--seed", cm.seed, "master seed (required: no silent entropy)")->required();
  compare->add_option("--data-seed", cm.data_seed, "synthetic data seed (--synth only)")
      ->capture_default_str();
  compare->add_option("--out-dir", cm.out_dir, "output directory")->capture_default_str();
  compare->callback([&] {
    stage = "compare";
    const std::vector<double> frames = parse_frames(cm.frames);
    const double max_frame = *std::max_element(frames.begin(), frames.end());

    ClockBiasSeries raw;
    if (!cm.src.synth.empty()) {
      SynthConfig cfg = synth_preset(cm.src.synth, cm.data_seed);
      if (cm.step > 0) cfg.step_s = cm.step;
      // one extra step so the difference series spans the largest frame
      cfg.duration_s = static_cast<std::int64_t>(std::llround(max_frame * 86400.0)) + cfg.step_s;
      raw = generate_synthetic_clock(cfg);
    } else {
      raw = load_file_source(cm.src);
    }

    const DifferenceSeries diff = single_difference(raw);
    const std::int64_t step = cm.step > 0 ? cm.step : min_epoch_interval(raw);
    const UniformSeries u = resample_uniform(as_point_series(diff), step);

    CompareOptions opt;
    opt.models = parse_models(cm.models);
    opt.hyper = cm.hyper.resolve();
    opt.train = cm.train.resolve();
    opt.arima_auto = cm.arima.auto_order;
    opt.arima_order = parse_order(cm.arima.order);
    opt.domain = domain_from_name(cm.domain);
    opt.base_bias = diff.base_value_s;

    ensure_out_dir(cm.out_dir);
    std::vector<ForecastReport> all;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const std::int64_t frame_s = static_cast<std::int64_t>(std::llround(frames[i] * 86400.0));
      const std::size_t want = static_cast<std::size_t>((frame_s + step - 1) / step);
      UniformSeries slice{u.start_epoch_s, u.step_s,
                          {u.values.begin(),
                           u.values.begin() + static_cast<std::ptrdiff_t>(
                                                  std::min(u.values.size(), want))}};
      const SplitSpec split{static_cast<std::int64_t>(std::llround(cm.train_days * 86400.0)),
                            frame_s};
      opt.seed = derive_seed(cm.seed, i);
      std::vector<ForecastReport> reports = compare_models(slice, split, opt);
      for (const auto& r : reports)
        if (!r.error.empty())
          std::cerr << "clockcast compare: " << report_name(r.model) << " at "
                    << detail::format_double(frames[i]) << "d failed: " << r.error << "\n";
      detail::write_text_file(
          artifact_path(cm.out_dir,
                        "errors_" + detail::format_double(frames[i]) + "d.csv"),
          render_error_series_csv(reports));
      all.insert(all.end(), std::make_move_iterator(reports.begin()),
                 std::make_move_iterator(reports.end()));
    }
    detail::write_text_file(artifact_path(cm.out_dir, "report.csv"), render_report_csv(all));
    write_manifest(compare, cm.out_dir);
  });

  // --- inspect ---------------------------------------------------------------
  auto* inspect = app.add_subcommand("inspect", "print a checkpoint summary");
  struct {
    std::string checkpoint;
  } in;
  inspect->add_option("--checkpoint", in.checkpoint, "checkpoint JSON")->required();
  inspect->callback([&] {
    stage = "inspect";
    std::cout << describe(load_checkpoint(in.checkpoint));
  });

  // --- dispatch ----------------------------------------------------------------
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("clockcast");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "clockcast: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "clockcast " << stage << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "clockcast " << stage << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace clockcast
