#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "clockcast/arima.hpp"
#include "clockcast/errors.hpp"
#include "clockcast/neural.hpp"
#include "clockcast/series.hpp"
#include "clockcast/training.hpp"
#include "clockcast/version.hpp"

namespace clockcast {

inline constexpr const char* kCheckpointSchema = "clockcast-checkpoint";
inline constexpr int kCheckpointVersion = 1;

enum class ModelKind { lstm, rnn, mlp, arima, persistence };

inline const char* kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::lstm: return "lstm";
    case ModelKind::rnn: return "rnn";
    case ModelKind::mlp: return "mlp";
    case ModelKind::arima: return "arima";
    case ModelKind::persistence: return "persistence";
  }
  return "?";
}

/// Upper-case label used in report rows.
inline std::string report_name(ModelKind k) {
  std::string name = kind_name(k);
  for (char& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return name;
}

inline ModelKind kind_from_name(const std::string& name) {
  for (ModelKind k : {ModelKind::lstm, ModelKind::rnn, ModelKind::mlp, ModelKind::arima,
                      ModelKind::persistence})
    if (name == kind_name(k)) return k;
  fail(Errc::invalid_config, "unknown model kind '" + name + "'");
}

/// Everything needed to reload and run a fitted model: the parameters, the
/// input scaling, the windowing, and the training configuration that
/// produced it. Serializes to versioned JSON; doubles round-trip exactly
/// (shortest-round-trip decimal form).
struct Checkpoint {
  std::variant<LstmNetwork, RnnNetwork, MlpNetwork, ArimaModel> model;
  ScaleParams scale;       // neural input/output scaling; identity for ARIMA
  std::size_t window_len = 12;
  std::int64_t step_s = 600;
  TrainConfig train_config;  // neural only; defaults for ARIMA
  TrainHistory history;      // empty for ARIMA

  ModelKind kind() const {
    switch (model.index()) {
      case 0: return ModelKind::lstm;
      case 1: return ModelKind::rnn;
      case 2: return ModelKind::mlp;
      default: return ModelKind::arima;
    }
  }
};

namespace detail {

using nlohmann::json;

inline json to_json(const Vector& v) { return json(v.raw()); }

inline json to_json(const Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.raw()}};
}

inline Vector vector_from_json(const json& j) {
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

inline Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto& data = j.at("data");
  if (data.size() != m.raw().size()) fail(Errc::invalid_config, "matrix payload size mismatch");
  for (std::size_t i = 0; i < data.size(); ++i) m.raw()[i] = data[i].get<double>();
  return m;
}

inline const char* activation_name(Activation a) {
  switch (a) {
    case Activation::selu: return "selu";
    case Activation::linear: return "linear";
    case Activation::tanh: return "tanh";
  }
  return "?";
}

inline Activation activation_from_name(const std::string& name) {
  for (Activation a : {Activation::selu, Activation::linear, Activation::tanh})
    if (name == activation_name(a)) return a;
  fail(Errc::invalid_config, "unknown activation '" + name + "'");
}

inline json to_json(const DenseLayerParams& d) {
  return json{{"w", to_json(d.w)}, {"b", to_json(d.b)}, {"activation", activation_name(d.activation)}};
}

inline DenseLayerParams dense_from_json(const json& j) {
  DenseLayerParams d;
  d.w = matrix_from_json(j.at("w"));
  d.b = vector_from_json(j.at("b"));
  d.activation = activation_from_name(j.at("activation").get<std::string>());
  return d;
}

inline json to_json(const LstmLayerParams& l) {
  return json{{"w_i", to_json(l.w_i)}, {"u_i", to_json(l.u_i)}, {"b_i", to_json(l.b_i)},
              {"w_f", to_json(l.w_f)}, {"u_f", to_json(l.u_f)}, {"b_f", to_json(l.b_f)},
              {"w_o", to_json(l.w_o)}, {"u_o", to_json(l.u_o)}, {"b_o", to_json(l.b_o)},
              {"w_g", to_json(l.w_g)}, {"u_g", to_json(l.u_g)}, {"b_g", to_json(l.b_g)}};
}

inline LstmLayerParams lstm_layer_from_json(const json& j) {
  LstmLayerParams l;
  l.w_i = matrix_from_json(j.at("w_i"));
  l.u_i = matrix_from_json(j.at("u_i"));
  l.b_i = vector_from_json(j.at("b_i"));
  l.w_f = matrix_from_json(j.at("w_f"));
  l.u_f = matrix_from_json(j.at("u_f"));
  l.b_f = vector_from_json(j.at("b_f"));
  l.w_o = matrix_from_json(j.at("w_o"));
  l.u_o = matrix_from_json(j.at("u_o"));
  l.b_o = vector_from_json(j.at("b_o"));
  l.w_g = matrix_from_json(j.at("w_g"));
  l.u_g = matrix_from_json(j.at("u_g"));
  l.b_g = vector_from_json(j.at("b_g"));
  return l;
}

inline json model_to_json(const LstmNetwork& net) {
  json layers = json::array();
  for (const auto& l : net.lstm_layers) layers.push_back(to_json(l));
  json dense = json::array();
  for (const auto& d : net.dense_layers) dense.push_back(to_json(d));
  return json{{"input_size", net.input_size}, {"lstm_layers", layers}, {"dense_layers", dense}};
}

inline json model_to_json(const RnnNetwork& net) {
  json layers = json::array();
  for (const auto& l : net.layers)
    layers.push_back(json{{"w", to_json(l.w)}, {"u", to_json(l.u)}, {"b", to_json(l.b)}});
  json dense = json::array();
  for (const auto& d : net.dense_layers) dense.push_back(to_json(d));
  return json{{"input_size", net.input_size}, {"rnn_layers", layers}, {"dense_layers", dense}};
}

inline json model_to_json(const MlpNetwork& net) {
  json dense = json::array();
  for (const auto& d : net.dense_layers) dense.push_back(to_json(d));
  return json{{"input_size", net.input_size}, {"dense_layers", dense}};
}

inline json model_to_json(const ArimaModel& m) {
  return json{{"order", {{"p", m.order.p}, {"d", m.order.d}, {"q", m.order.q}}},
              {"phi", m.phi},
              {"theta", m.theta},
              {"intercept", m.intercept},
              {"sigma2", m.sigma2},
              {"tail", {{"w", m.tail.w}, {"e", m.tail.e}, {"levels", m.tail.levels}}}};
}

inline LstmNetwork lstm_from_json(const json& j) {
  LstmNetwork net;
  net.input_size = j.at("input_size").get<std::size_t>();
  for (const auto& l : j.at("lstm_layers")) net.lstm_layers.push_back(lstm_layer_from_json(l));
  for (const auto& d : j.at("dense_layers")) net.dense_layers.push_back(dense_from_json(d));
  return net;
}

inline RnnNetwork rnn_from_json(const json& j) {
  RnnNetwork net;
  net.input_size = j.at("input_size").get<std::size_t>();
  for (const auto& l : j.at("rnn_layers")) {
    RnnLayerParams layer;
    layer.w = matrix_from_json(l.at("w"));
    layer.u = matrix_from_json(l.at("u"));
    layer.b = vector_from_json(l.at("b"));
    net.layers.push_back(std::move(layer));
  }
  for (const auto& d : j.at("dense_layers")) net.dense_layers.push_back(dense_from_json(d));
  return net;
}

inline MlpNetwork mlp_from_json(const json& j) {
  MlpNetwork net;
  net.input_size = j.at("input_size").get<std::size_t>();
  for (const auto& d : j.at("dense_layers")) net.dense_layers.push_back(dense_from_json(d));
  return net;
}

inline ArimaModel arima_from_json(const json& j) {
  ArimaModel m;
  m.order.p = j.at("order").at("p").get<std::size_t>();
  m.order.d = j.at("order").at("d").get<std::size_t>();
  m.order.q = j.at("order").at("q").get<std::size_t>();
  m.phi = j.at("phi").get<std::vector<double>>();
  m.theta = j.at("theta").get<std::vector<double>>();
  m.intercept = j.at("intercept").get<double>();
  m.sigma2 = j.at("sigma2").get<double>();
  m.tail.w = j.at("tail").at("w").get<std::vector<double>>();
  m.tail.e = j.at("tail").at("e").get<std::vector<double>>();
  m.tail.levels = j.at("tail").at("levels").get<std::vector<double>>();
  return m;
}

inline json train_config_to_json(const TrainConfig& cfg) {
  json j{{"learning_rate", cfg.learning_rate}, {"max_epochs", cfg.max_epochs},
         {"patience", cfg.patience},           {"batch_size", cfg.batch_size},
         {"validation_fraction", cfg.validation_fraction}, {"seed", cfg.seed}};
  if (cfg.clip_norm)
    j["clip_norm"] = *cfg.clip_norm;
  else
    j["clip_norm"] = nullptr;
  return j;
}

inline TrainConfig train_config_from_json(const json& j) {
  TrainConfig cfg;
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.max_epochs = j.at("max_epochs").get<std::size_t>();
  cfg.patience = j.at("patience").get<std::size_t>();
  cfg.batch_size = j.at("batch_size").get<std::size_t>();
  cfg.validation_fraction = j.at("validation_fraction").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.at("clip_norm").is_null())
    cfg.clip_norm.reset();
  else
    cfg.clip_norm = j.at("clip_norm").get<double>();
  return cfg;
}

inline json history_to_json(const TrainHistory& h) {
  return json{{"train_loss", h.train_loss},
              {"val_loss", h.val_loss},
              {"stopped_early", h.stopped_early},
              {"best_epoch", h.best_epoch}};
}

inline TrainHistory history_from_json(const json& j) {
  TrainHistory h;
  h.train_loss = j.at("train_loss").get<std::vector<double>>();
  h.val_loss = j.at("val_loss").get<std::vector<double>>();
  h.stopped_early = j.at("stopped_early").get<bool>();
  h.best_epoch = j.at("best_epoch").get<std::size_t>();
  return h;
}

}  // namespace detail

inline nlohmann::json checkpoint_to_json(const Checkpoint& cp) {
  nlohmann::json model =
      std::visit([](const auto& m) { return detail::model_to_json(m); }, cp.model);
  return nlohmann::json{{"schema", kCheckpointSchema},
                        {"version", kCheckpointVersion},
                        {"toolkit_version", kVersion},
                        {"kind", kind_name(cp.kind())},
                        {"window_len", cp.window_len},
                        {"step_s", cp.step_s},
                        {"scale", {{"mean", cp.scale.mean}, {"std", cp.scale.std}}},
                        {"train_config", detail::train_config_to_json(cp.train_config)},
                        {"history", detail::history_to_json(cp.history)},
                        {"model", model}};
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema", std::string{}) != kCheckpointSchema)
    fail(Errc::invalid_config, "not a checkpoint document");
  if (j.value("version", -1) != kCheckpointVersion)
    fail(Errc::invalid_config, "unsupported checkpoint version");

  Checkpoint cp;
  const std::string kind = j.at("kind").get<std::string>();
  const auto& model = j.at("model");
  if (kind == "lstm")
    cp.model = detail::lstm_from_json(model);
  else if (kind == "rnn")
    cp.model = detail::rnn_from_json(model);
  else if (kind == "mlp")
    cp.model = detail::mlp_from_json(model);
  else if (kind == "arima")
    cp.model = detail::arima_from_json(model);
  else
    fail(Errc::invalid_config, "unknown checkpoint kind '" + kind + "'");

  cp.window_len = j.at("window_len").get<std::size_t>();
  cp.step_s = j.at("step_s").get<std::int64_t>();
  cp.scale.mean = j.at("scale").at("mean").get<double>();
  cp.scale.std = j.at("scale").at("std").get<double>();
  cp.train_config = detail::train_config_from_json(j.at("train_config"));
  cp.history = detail::history_from_json(j.at("history"));
  return cp;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& cp) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_failure, "cannot open '" + path + "' for writing");
  out << checkpoint_to_json(cp).dump(2) << '\n';
  if (!out) fail(Errc::io_failure, "failed writing '" + path + "'");
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_failure, "cannot open '" + path + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::invalid_config, std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    return checkpoint_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::invalid_config, std::string("malformed checkpoint: ") + e.what());
  }
}

/// Human-readable architecture summary for `inspect`.
inline std::string describe(const Checkpoint& cp) {
  std::ostringstream out;
  out << "kind: " << kind_name(cp.kind()) << "\n";
  out << "window_len: " << cp.window_len << "\n";
  out << "step_s: " << cp.step_s << "\n";
  out << "scale: mean=" << cp.scale.mean << " std=" << cp.scale.std << "\n";

  std::size_t params = 0;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ArimaModel>) {
          out << "order: (" << m.order.p << "," << m.order.d << "," << m.order.q << ")\n";
          out << "phi: " << m.phi.size() << " theta: " << m.theta.size()
              << " sigma2: " << m.sigma2 << "\n";
          params = 1 + m.phi.size() + m.theta.size();
        } else {
          if constexpr (std::is_same_v<T, LstmNetwork>) {
            out << "lstm units:";
            for (const auto& l : m.lstm_layers) out << ' ' << l.hidden_size();
            out << "\n";
          } else if constexpr (std::is_same_v<T, RnnNetwork>) {
            out << "rnn units:";
            for (const auto& l : m.layers) out << ' ' << l.hidden_size();
            out << "\n";
          }
          out << "dense:";
          for (const auto& d : m.dense_layers)
            out << ' ' << d.out_size() << '(' << detail::activation_name(d.activation) << ')';
          out << "\n";
          for (const auto* arr : param_arrays_const(m)) params += arr->size();
        }
      },
      cp.model);
  out << "parameters: " << params << "\n";

  if (!cp.history.train_loss.empty()) {
    out << "epochs: " << cp.history.train_loss.size()
        << (cp.history.stopped_early ? " (early stop)" : "")
        << " best_epoch: " << cp.history.best_epoch << "\n";
    out << "final train_loss: " << cp.history.train_loss.back()
        << " val_loss: " << cp.history.val_loss.back() << "\n";
  }
  return out.str();
}

}  // namespace clockcast
