#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clockcast/errors.hpp"
#include "clockcast/linalg.hpp"
#include "clockcast/rng.hpp"

namespace clockcast {

// ---------------------------------------------------------------------------
// Activations

inline constexpr double kSeluLambda = 1.0507009873554805;
inline constexpr double kSeluAlpha = 1.6732632423543772;

enum class Activation { selu, linear, tanh };

inline double apply_activation(Activation act, double z) {
  switch (act) {
    case Activation::selu:
      return z > 0.0 ? kSeluLambda * z : kSeluLambda * kSeluAlpha * (std::exp(z) - 1.0);
    case Activation::linear:
      return z;
    case Activation::tanh:
      return std::tanh(z);
  }
  return z;
}

/// Derivative with respect to the pre-activation.
inline double activation_grad(Activation act, double z) {
  switch (act) {
    case Activation::selu:
      return z > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(z);
    case Activation::linear:
      return 1.0;
    case Activation::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// ---------------------------------------------------------------------------
// Parameter blocks

/// One LSTM layer: per gate g in {input, forget, output, candidate} an input
/// map W_g (hidden x input), a recurrent map U_g (hidden x hidden) and a bias.
struct LstmLayerParams {
  Matrix w_i, w_f, w_o, w_g;
  Matrix u_i, u_f, u_o, u_g;
  Vector b_i, b_f, b_o, b_g;

  std::size_t hidden_size() const { return b_i.size(); }
  std::size_t input_size() const { return w_i.cols(); }
};

struct DenseLayerParams {
  Matrix w;  // out x in
  Vector b;
  Activation activation = Activation::linear;

  std::size_t out_size() const { return b.size(); }
  std::size_t in_size() const { return w.cols(); }
};

struct RnnLayerParams {
  Matrix w;  // hidden x input
  Matrix u;  // hidden x hidden
  Vector b;

  std::size_t hidden_size() const { return b.size(); }
  std::size_t input_size() const { return w.cols(); }
};

// ---------------------------------------------------------------------------
// Caches (pre-activations and states kept for backpropagation)

struct LstmStepCache {
  Vector x, h_prev, c_prev;
  Vector i, f, o, g;  // post-activation gate values
  Vector c, tanh_c, h;
};

struct DenseCache {
  Vector input;
  Vector pre;  // W x + b
};

struct LstmForwardCache {
  std::vector<std::vector<LstmStepCache>> layers;  // [layer][step]
  std::vector<DenseCache> dense;
  double prediction = 0.0;
};

struct RnnStepCache {
  Vector x, h_prev, h;
};

struct RnnForwardCache {
  std::vector<std::vector<RnnStepCache>> layers;
  std::vector<DenseCache> dense;
  double prediction = 0.0;
};

struct MlpForwardCache {
  Vector input;
  std::vector<DenseCache> dense;
  double prediction = 0.0;
};

// ---------------------------------------------------------------------------
// Networks

/// Stacked LSTM layers feeding a dense head; the head reads the top layer's
/// hidden state at the final step and ends in a single linear unit.
struct LstmNetwork {
  using ForwardCache = LstmForwardCache;

  std::size_t input_size = 1;
  std::vector<LstmLayerParams> lstm_layers;
  std::vector<DenseLayerParams> dense_layers;

  std::vector<std::vector<double>*> param_arrays() {
    std::vector<std::vector<double>*> out;
    for (auto& l : lstm_layers) {
      out.push_back(&l.w_i.raw());
      out.push_back(&l.u_i.raw());
      out.push_back(&l.b_i.raw());
      out.push_back(&l.w_f.raw());
      out.push_back(&l.u_f.raw());
      out.push_back(&l.b_f.raw());
      out.push_back(&l.w_o.raw());
      out.push_back(&l.u_o.raw());
      out.push_back(&l.b_o.raw());
      out.push_back(&l.w_g.raw());
      out.push_back(&l.u_g.raw());
      out.push_back(&l.b_g.raw());
    }
    for (auto& d : dense_layers) {
      out.push_back(&d.w.raw());
      out.push_back(&d.b.raw());
    }
    return out;
  }
};

struct RnnNetwork {
  using ForwardCache = RnnForwardCache;

  std::size_t input_size = 1;
  std::vector<RnnLayerParams> layers;
  std::vector<DenseLayerParams> dense_layers;

  std::vector<std::vector<double>*> param_arrays() {
    std::vector<std::vector<double>*> out;
    for (auto& l : layers) {
      out.push_back(&l.w.raw());
      out.push_back(&l.u.raw());
      out.push_back(&l.b.raw());
    }
    for (auto& d : dense_layers) {
      out.push_back(&d.w.raw());
      out.push_back(&d.b.raw());
    }
    return out;
  }
};

/// Dense stack over the flattened window.
struct MlpNetwork {
  using ForwardCache = MlpForwardCache;

  std::size_t input_size = 1;  // window_len * features
  std::vector<DenseLayerParams> dense_layers;

  std::vector<std::vector<double>*> param_arrays() {
    std::vector<std::vector<double>*> out;
    for (auto& d : dense_layers) {
      out.push_back(&d.w.raw());
      out.push_back(&d.b.raw());
    }
    return out;
  }
};

template <typename Net>
std::vector<const std::vector<double>*> param_arrays_const(const Net& net) {
  auto arrays = const_cast<Net&>(net).param_arrays();
  return {arrays.begin(), arrays.end()};
}

/// Same shapes as `net`, every parameter zero. Gradients use the network's
/// own type.
template <typename Net>
Net zeros_like(const Net& net) {
  Net z = net;
  for (auto* arr : z.param_arrays()) arr->assign(arr->size(), 0.0);
  return z;
}

// ---------------------------------------------------------------------------
// Initialization

namespace detail {

inline double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

inline void glorot_fill(Matrix& m, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = glorot_bound(fan_in, fan_out);
  for (double& v : m.raw()) v = rng.uniform(-bound, bound);
}

inline void init_gate(Matrix& w, Matrix& u, Vector& b, std::size_t input, std::size_t hidden,
                      Rng& rng, double bias_value) {
  w = Matrix(hidden, input);
  u = Matrix(hidden, hidden);
  b = Vector(hidden, bias_value);
  glorot_fill(w, input, hidden, rng);
  glorot_fill(u, hidden, hidden, rng);
}

inline DenseLayerParams init_dense(std::size_t in, std::size_t out, Activation act, Rng& rng) {
  DenseLayerParams d;
  d.w = Matrix(out, in);
  d.b = Vector(out, 0.0);
  d.activation = act;
  glorot_fill(d.w, in, out, rng);
  return d;
}

inline void append_head(std::vector<DenseLayerParams>& dense, std::size_t in,
                        std::span<const std::size_t> hidden, Rng& rng) {
  std::size_t prev = in;
  for (std::size_t width : hidden) {
    dense.push_back(init_dense(prev, width, Activation::selu, rng));
    prev = width;
  }
  dense.push_back(init_dense(prev, 1, Activation::linear, rng));
}

}  // namespace detail

/// Glorot-uniform weights from the seeded generator; forget-gate biases start
/// at 1.0, every other bias at 0. Draw order is fixed (layers in order; gates
/// i, f, o, g; W then U; dense W per layer), so a seed pins every parameter.
inline LstmNetwork make_lstm_network(std::size_t input_size, std::span<const std::size_t> units,
                                     std::span<const std::size_t> dense_hidden,
                                     std::uint64_t seed) {
  if (input_size == 0 || units.empty()) fail(Errc::invalid_config, "lstm needs input and units");
  Rng rng(seed);
  LstmNetwork net;
  net.input_size = input_size;
  std::size_t in = input_size;
  for (std::size_t hidden : units) {
    if (hidden == 0) fail(Errc::invalid_config, "zero-width lstm layer");
    LstmLayerParams layer;
    detail::init_gate(layer.w_i, layer.u_i, layer.b_i, in, hidden, rng, 0.0);
    detail::init_gate(layer.w_f, layer.u_f, layer.b_f, in, hidden, rng, 1.0);
    detail::init_gate(layer.w_o, layer.u_o, layer.b_o, in, hidden, rng, 0.0);
    detail::init_gate(layer.w_g, layer.u_g, layer.b_g, in, hidden, rng, 0.0);
    net.lstm_layers.push_back(std::move(layer));
    in = hidden;
  }
  detail::append_head(net.dense_layers, in, dense_hidden, rng);
  return net;
}

inline RnnNetwork make_rnn_network(std::size_t input_size, std::span<const std::size_t> units,
                                   std::span<const std::size_t> dense_hidden, std::uint64_t seed) {
  if (input_size == 0 || units.empty()) fail(Errc::invalid_config, "rnn needs input and units");
  Rng rng(seed);
  RnnNetwork net;
  net.input_size = input_size;
  std::size_t in = input_size;
  for (std::size_t hidden : units) {
    if (hidden == 0) fail(Errc::invalid_config, "zero-width rnn layer");
    RnnLayerParams layer;
    layer.w = Matrix(hidden, in);
    layer.u = Matrix(hidden, hidden);
    layer.b = Vector(hidden, 0.0);
    detail::glorot_fill(layer.w, in, hidden, rng);
    detail::glorot_fill(layer.u, hidden, hidden, rng);
    net.layers.push_back(std::move(layer));
    in = hidden;
  }
  detail::append_head(net.dense_layers, in, dense_hidden, rng);
  return net;
}

inline MlpNetwork make_mlp_network(std::size_t input_size, std::span<const std::size_t> hidden,
                                   std::uint64_t seed) {
  if (input_size == 0) fail(Errc::invalid_config, "mlp needs a positive input size");
  Rng rng(seed);
  MlpNetwork net;
  net.input_size = input_size;
  detail::append_head(net.dense_layers, input_size, hidden, rng);
  return net;
}

// ---------------------------------------------------------------------------
// Forward passes

/// i = sig(W_i x + U_i h + b_i)      input gate, admits new information
/// f = sig(W_f x + U_f h + b_f)      forget gate, discards cell content
/// o = sig(W_o x + U_o h + b_o)      output gate, releases cell content
/// g = tanh(W_g x + U_g h + b_g)     candidate values
/// c = f.c_prev + i.g ;  h = o.tanh(c)
inline LstmStepCache lstm_cell_forward(const Vector& x, const Vector& h_prev,
                                       const Vector& c_prev, const LstmLayerParams& p) {
  const std::size_t hidden = p.hidden_size();
  if (x.size() != p.input_size() || h_prev.size() != hidden || c_prev.size() != hidden)
    fail(Errc::dimension_mismatch, "lstm cell input shapes");

  LstmStepCache s;
  s.x = x;
  s.h_prev = h_prev;
  s.c_prev = c_prev;

  auto gate = [&](const Matrix& w, const Matrix& u, const Vector& b) {
    Vector pre = b;
    matvec_add(w, x, pre);
    matvec_add(u, h_prev, pre);
    return pre;
  };

  Vector pre_i = gate(p.w_i, p.u_i, p.b_i);
  Vector pre_f = gate(p.w_f, p.u_f, p.b_f);
  Vector pre_o = gate(p.w_o, p.u_o, p.b_o);
  Vector pre_g = gate(p.w_g, p.u_g, p.b_g);

  s.i = Vector(hidden);
  s.f = Vector(hidden);
  s.o = Vector(hidden);
  s.g = Vector(hidden);
  s.c = Vector(hidden);
  s.tanh_c = Vector(hidden);
  s.h = Vector(hidden);
  for (std::size_t k = 0; k < hidden; ++k) {
    s.i[k] = sigmoid(pre_i[k]);
    s.f[k] = sigmoid(pre_f[k]);
    s.o[k] = sigmoid(pre_o[k]);
    s.g[k] = std::tanh(pre_g[k]);
    s.c[k] = s.f[k] * c_prev[k] + s.i[k] * s.g[k];
    s.tanh_c[k] = std::tanh(s.c[k]);
    s.h[k] = s.o[k] * s.tanh_c[k];
  }
  return s;
}

inline Vector dense_forward(const Vector& x, const DenseLayerParams& p, DenseCache* cache = nullptr) {
  if (x.size() != p.in_size()) fail(Errc::dimension_mismatch, "dense input size");
  Vector pre = p.b;
  matvec_add(p.w, x, pre);
  if (cache) {
    cache->input = x;
    cache->pre = pre;
  }
  Vector out(p.out_size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = apply_activation(p.activation, pre[k]);
  return out;
}

namespace detail {

inline double dense_head_forward(const std::vector<DenseLayerParams>& dense, Vector input,
                                 std::vector<DenseCache>* caches) {
  if (dense.empty() || dense.back().out_size() != 1)
    fail(Errc::dimension_mismatch, "dense head must end in one linear unit");
  if (caches) caches->clear();
  for (const auto& layer : dense) {
    DenseCache cache;
    input = dense_forward(input, layer, caches ? &cache : nullptr);
    if (caches) caches->push_back(std::move(cache));
  }
  return input[0];
}

/// Backward through the dense head; returns the gradient w.r.t. the head
/// input and accumulates parameter gradients.
inline Vector dense_head_backward(const std::vector<DenseLayerParams>& dense,
                                  const std::vector<DenseCache>& caches, double d_out,
                                  std::vector<DenseLayerParams>& grads) {
  if (caches.size() != dense.size()) fail(Errc::cache_mismatch, "dense cache size");
  Vector delta{d_out};
  for (std::size_t li = dense.size(); li-- > 0;) {
    const auto& layer = dense[li];
    const auto& cache = caches[li];
    if (delta.size() != layer.out_size() || cache.input.size() != layer.in_size())
      fail(Errc::cache_mismatch, "dense cache shapes");
    Vector d_pre(layer.out_size());
    for (std::size_t k = 0; k < d_pre.size(); ++k)
      d_pre[k] = delta[k] * activation_grad(layer.activation, cache.pre[k]);
    add_outer(grads[li].w, d_pre, cache.input);
    add_to(d_pre, grads[li].b);
    Vector d_input(layer.in_size());
    matvec_transpose_add(layer.w, d_pre, d_input);
    delta = std::move(d_input);
  }
  return delta;
}

}  // namespace detail

/// Runs the window through the LSTM stack (zero initial state, each layer's
/// per-step output feeding the next) and the dense head on the final step's
/// top hidden state.
inline double network_forward(const LstmNetwork& net, std::span<const Vector> window,
                              LstmForwardCache* cache = nullptr) {
  if (window.empty()) fail(Errc::empty_window, "window must hold at least one step");
  if (cache) {
    cache->layers.assign(net.lstm_layers.size(), {});
    cache->dense.clear();
  }

  std::vector<Vector> inputs(window.begin(), window.end());
  for (std::size_t li = 0; li < net.lstm_layers.size(); ++li) {
    const auto& layer = net.lstm_layers[li];
    Vector h(layer.hidden_size());
    Vector c(layer.hidden_size());
    std::vector<Vector> outputs;
    outputs.reserve(inputs.size());
    for (const Vector& x : inputs) {
      LstmStepCache step = lstm_cell_forward(x, h, c, layer);
      h = step.h;
      c = step.c;
      outputs.push_back(step.h);
      if (cache) cache->layers[li].push_back(std::move(step));
    }
    inputs = std::move(outputs);
  }

  const double prediction =
      detail::dense_head_forward(net.dense_layers, inputs.back(), cache ? &cache->dense : nullptr);
  if (cache) cache->prediction = prediction;
  return prediction;
}

inline Vector rnn_cell_forward(const Vector& x, const Vector& h_prev, const RnnLayerParams& p,
                               RnnStepCache* cache = nullptr) {
  if (x.size() != p.input_size() || h_prev.size() != p.hidden_size())
    fail(Errc::dimension_mismatch, "rnn cell input shapes");
  Vector pre = p.b;
  matvec_add(p.w, x, pre);
  matvec_add(p.u, h_prev, pre);
  Vector h(p.hidden_size());
  for (std::size_t k = 0; k < h.size(); ++k) h[k] = std::tanh(pre[k]);
  if (cache) {
    cache->x = x;
    cache->h_prev = h_prev;
    cache->h = h;
  }
  return h;
}

inline double network_forward(const RnnNetwork& net, std::span<const Vector> window,
                              RnnForwardCache* cache = nullptr) {
  if (window.empty()) fail(Errc::empty_window, "window must hold at least one step");
  if (cache) {
    cache->layers.assign(net.layers.size(), {});
    cache->dense.clear();
  }

  std::vector<Vector> inputs(window.begin(), window.end());
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const auto& layer = net.layers[li];
    Vector h(layer.hidden_size());
    std::vector<Vector> outputs;
    outputs.reserve(inputs.size());
    for (const Vector& x : inputs) {
      RnnStepCache step;
      h = rnn_cell_forward(x, h, layer, &step);
      outputs.push_back(h);
      if (cache) cache->layers[li].push_back(std::move(step));
    }
    inputs = std::move(outputs);
  }

  const double prediction =
      detail::dense_head_forward(net.dense_layers, inputs.back(), cache ? &cache->dense : nullptr);
  if (cache) cache->prediction = prediction;
  return prediction;
}

/// Flattens the window (steps concatenated in order) and runs the dense stack.
inline double network_forward(const MlpNetwork& net, std::span<const Vector> window,
                              MlpForwardCache* cache = nullptr) {
  if (window.empty()) fail(Errc::empty_window, "window must hold at least one step");
  std::size_t total = 0;
  for (const auto& step : window) total += step.size();
  if (total != net.input_size) fail(Errc::dimension_mismatch, "flattened window size");
  Vector flat(total);
  std::size_t at = 0;
  for (const auto& step : window)
    for (std::size_t k = 0; k < step.size(); ++k) flat[at++] = step[k];

  if (cache) {
    cache->input = flat;
    cache->dense.clear();
  }
  const double prediction =
      detail::dense_head_forward(net.dense_layers, std::move(flat), cache ? &cache->dense : nullptr);
  if (cache) cache->prediction = prediction;
  return prediction;
}

// ---------------------------------------------------------------------------
// Backward passes (reverse-mode, exact)

namespace detail {

/// BPTT over one LSTM layer. d_h_steps holds the gradient arriving at h_t
/// from above (dense head and/or the layer on top); returns gradients w.r.t.
/// the layer inputs per step.
inline std::vector<Vector> lstm_layer_backward(const LstmLayerParams& p,
                                               const std::vector<LstmStepCache>& steps,
                                               std::vector<Vector>& d_h_steps,
                                               LstmLayerParams& grads) {
  const std::size_t hidden = p.hidden_size();
  const std::size_t T = steps.size();
  std::vector<Vector> d_inputs(T);
  Vector d_h_next(hidden);  // recurrent gradient flowing from t+1
  Vector d_c_next(hidden);

  for (std::size_t t = T; t-- > 0;) {
    const auto& s = steps[t];
    Vector d_h = d_h_steps[t];
    add_to(d_h_next, d_h);

    Vector d_c = d_c_next;
    Vector d_pre_i(hidden), d_pre_f(hidden), d_pre_o(hidden), d_pre_g(hidden);
    for (std::size_t k = 0; k < hidden; ++k) {
      const double do_k = d_h[k] * s.tanh_c[k];
      d_c[k] += d_h[k] * s.o[k] * (1.0 - s.tanh_c[k] * s.tanh_c[k]);
      d_pre_o[k] = do_k * s.o[k] * (1.0 - s.o[k]);
      d_pre_f[k] = d_c[k] * s.c_prev[k] * s.f[k] * (1.0 - s.f[k]);
      d_pre_i[k] = d_c[k] * s.g[k] * s.i[k] * (1.0 - s.i[k]);
      d_pre_g[k] = d_c[k] * s.i[k] * (1.0 - s.g[k] * s.g[k]);
      d_c_next[k] = d_c[k] * s.f[k];
    }

    add_outer(grads.w_i, d_pre_i, s.x);
    add_outer(grads.w_f, d_pre_f, s.x);
    add_outer(grads.w_o, d_pre_o, s.x);
    add_outer(grads.w_g, d_pre_g, s.x);
    add_outer(grads.u_i, d_pre_i, s.h_prev);
    add_outer(grads.u_f, d_pre_f, s.h_prev);
    add_outer(grads.u_o, d_pre_o, s.h_prev);
    add_outer(grads.u_g, d_pre_g, s.h_prev);
    add_to(d_pre_i, grads.b_i);
    add_to(d_pre_f, grads.b_f);
    add_to(d_pre_o, grads.b_o);
    add_to(d_pre_g, grads.b_g);

    Vector d_x(p.input_size());
    matvec_transpose_add(p.w_i, d_pre_i, d_x);
    matvec_transpose_add(p.w_f, d_pre_f, d_x);
    matvec_transpose_add(p.w_o, d_pre_o, d_x);
    matvec_transpose_add(p.w_g, d_pre_g, d_x);
    d_inputs[t] = std::move(d_x);

    d_h_next.fill(0.0);
    matvec_transpose_add(p.u_i, d_pre_i, d_h_next);
    matvec_transpose_add(p.u_f, d_pre_f, d_h_next);
    matvec_transpose_add(p.u_o, d_pre_o, d_h_next);
    matvec_transpose_add(p.u_g, d_pre_g, d_h_next);
  }
  return d_inputs;
}

inline std::vector<Vector> rnn_layer_backward(const RnnLayerParams& p,
                                              const std::vector<RnnStepCache>& steps,
                                              std::vector<Vector>& d_h_steps,
                                              RnnLayerParams& grads) {
  const std::size_t hidden = p.hidden_size();
  const std::size_t T = steps.size();
  std::vector<Vector> d_inputs(T);
  Vector d_h_next(hidden);

  for (std::size_t t = T; t-- > 0;) {
    const auto& s = steps[t];
    Vector d_h = d_h_steps[t];
    add_to(d_h_next, d_h);

    Vector d_pre(hidden);
    for (std::size_t k = 0; k < hidden; ++k) d_pre[k] = d_h[k] * (1.0 - s.h[k] * s.h[k]);

    add_outer(grads.w, d_pre, s.x);
    add_outer(grads.u, d_pre, s.h_prev);
    add_to(d_pre, grads.b);

    Vector d_x(p.input_size());
    matvec_transpose_add(p.w, d_pre, d_x);
    d_inputs[t] = std::move(d_x);

    d_h_next.fill(0.0);
    matvec_transpose_add(p.u, d_pre, d_h_next);
  }
  return d_inputs;
}

}  // namespace detail

/// Accumulating form: adds the gradients of (d_prediction * prediction) into
/// `grads`, which must be shaped like `net`.
inline void network_backward_accum(const LstmNetwork& net, const LstmForwardCache& cache,
                                   double d_prediction, LstmNetwork& grads) {
  if (cache.layers.size() != net.lstm_layers.size() ||
      cache.dense.size() != net.dense_layers.size())
    fail(Errc::cache_mismatch, "cache does not match network layout");
  const std::size_t T = cache.layers.empty() ? 0 : cache.layers[0].size();
  if (T == 0) fail(Errc::cache_mismatch, "empty cache");

  Vector d_top = detail::dense_head_backward(net.dense_layers, cache.dense, d_prediction,
                                             grads.dense_layers);

  // Gradient w.r.t. each layer's output sequence; only the final step of the
  // top layer receives a head gradient.
  std::vector<Vector> d_h_steps(T);
  for (std::size_t t = 0; t < T; ++t)
    d_h_steps[t] = Vector(net.lstm_layers.back().hidden_size());
  d_h_steps[T - 1] = std::move(d_top);

  for (std::size_t li = net.lstm_layers.size(); li-- > 0;) {
    std::vector<Vector> d_inputs = detail::lstm_layer_backward(
        net.lstm_layers[li], cache.layers[li], d_h_steps, grads.lstm_layers[li]);
    d_h_steps = std::move(d_inputs);
  }
}

inline void network_backward_accum(const RnnNetwork& net, const RnnForwardCache& cache,
                                   double d_prediction, RnnNetwork& grads) {
  if (cache.layers.size() != net.layers.size() || cache.dense.size() != net.dense_layers.size())
    fail(Errc::cache_mismatch, "cache does not match network layout");
  const std::size_t T = cache.layers.empty() ? 0 : cache.layers[0].size();
  if (T == 0) fail(Errc::cache_mismatch, "empty cache");

  Vector d_top = detail::dense_head_backward(net.dense_layers, cache.dense, d_prediction,
                                             grads.dense_layers);

  std::vector<Vector> d_h_steps(T);
  for (std::size_t t = 0; t < T; ++t) d_h_steps[t] = Vector(net.layers.back().hidden_size());
  d_h_steps[T - 1] = std::move(d_top);

  for (std::size_t li = net.layers.size(); li-- > 0;) {
    std::vector<Vector> d_inputs =
        detail::rnn_layer_backward(net.layers[li], cache.layers[li], d_h_steps, grads.layers[li]);
    d_h_steps = std::move(d_inputs);
  }
}

inline void network_backward_accum(const MlpNetwork& net, const MlpForwardCache& cache,
                                   double d_prediction, MlpNetwork& grads) {
  if (cache.dense.size() != net.dense_layers.size())
    fail(Errc::cache_mismatch, "cache does not match network layout");
  detail::dense_head_backward(net.dense_layers, cache.dense, d_prediction, grads.dense_layers);
}

/// Gradients of the scalar output scaled by d_prediction, for every parameter.
template <typename Net>
Net network_backward(const Net& net, const typename Net::ForwardCache& cache,
                     double d_prediction) {
  Net grads = zeros_like(net);
  network_backward_accum(net, cache, d_prediction, grads);
  return grads;
}

}  // namespace clockcast
