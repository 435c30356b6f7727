#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "clockcast/errors.hpp"
#include "clockcast/eval.hpp"
#include "clockcast/neural.hpp"
#include "clockcast/rng.hpp"

namespace clockcast {

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t max_epochs = 10;
  std::size_t patience = 3;
  std::size_t batch_size = 32;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
  std::optional<double> clip_norm = 5.0;  // global gradient norm; nullopt disables
};

inline void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) fail(Errc::invalid_config, "learning_rate must be positive");
  if (cfg.max_epochs == 0) fail(Errc::invalid_config, "max_epochs must be positive");
  if (cfg.patience == 0) fail(Errc::invalid_config, "patience must be positive");
  if (cfg.batch_size == 0) fail(Errc::invalid_config, "batch_size must be positive");
  if (!(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0))
    fail(Errc::invalid_config, "validation_fraction must lie in (0,1)");
  if (cfg.clip_norm && !(*cfg.clip_norm > 0.0))
    fail(Errc::invalid_config, "clip_norm must be positive");
}

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  bool stopped_early = false;
  std::size_t best_epoch = 0;  // 1-based epoch whose parameters were kept
};

// ---------------------------------------------------------------------------
// Adam

struct AdamState {
  std::vector<std::vector<double>> m;  // first moment, one block per param array
  std::vector<std::vector<double>> v;  // second moment
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename Net>
AdamState make_adam_state(Net& net) {
  AdamState state;
  for (auto* arr : net.param_arrays()) {
    state.m.emplace_back(arr->size(), 0.0);
    state.v.emplace_back(arr->size(), 0.0);
  }
  return state;
}

/// One optimizer step with bias correction:
///   m <- b1 m + (1-b1) g ;  v <- b2 v + (1-b2) g^2
///   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
template <typename Net>
void adam_update(Net& params, Net& grads, AdamState& state, double lr) {
  auto p_arrays = params.param_arrays();
  auto g_arrays = grads.param_arrays();
  if (p_arrays.size() != g_arrays.size() || p_arrays.size() != state.m.size())
    fail(Errc::dimension_mismatch, "adam state does not match parameter layout");

  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

  for (std::size_t a = 0; a < p_arrays.size(); ++a) {
    auto& p = *p_arrays[a];
    auto& g = *g_arrays[a];
    auto& m = state.m[a];
    auto& v = state.v[a];
    if (p.size() != g.size() || p.size() != m.size())
      fail(Errc::dimension_mismatch, "adam accumulator shape");
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

// ---------------------------------------------------------------------------
// Gradient clipping

template <typename Net>
double global_grad_norm(Net& grads) {
  double sum = 0.0;
  for (auto* arr : grads.param_arrays())
    for (double g : *arr) sum += g * g;
  return std::sqrt(sum);
}

template <typename Net>
void clip_global_norm(Net& grads, double max_norm) {
  const double norm = global_grad_norm(grads);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (auto* arr : grads.param_arrays())
      for (double& g : *arr) g *= scale;
  }
}

// ---------------------------------------------------------------------------
// Training loop

namespace detail {

template <typename Net>
double mean_squared_error(const Net& net, const WindowedDataset& data, std::size_t from,
                          std::size_t to) {
  double sum = 0.0;
  for (std::size_t i = from; i < to; ++i) {
    const double err = network_forward(net, data.windows[i]) - data.targets[i];
    sum += err * err;
  }
  return sum / static_cast<double>(to - from);
}

}  // namespace detail

/// Mini-batch MSE training with Adam, chronological validation split (the
/// last validation_fraction of windows), early stopping on validation loss
/// (strict improvement, `patience` stale epochs allowed), and restoration of
/// the best-validation-epoch parameters. Deterministic given cfg.seed: the
/// only randomness is the seeded batch shuffle.
template <typename Net>
TrainHistory train(Net& net, const WindowedDataset& data, const TrainConfig& cfg) {
  validate(cfg);
  const std::size_t n = data.windows.size();
  if (n == 0) fail(Errc::empty_dataset, "no training windows");
  if (data.targets.size() != n) fail(Errc::dimension_mismatch, "targets do not match windows");
  if (n < 2) fail(Errc::degenerate_split, "need at least 2 windows to hold out validation");

  const auto n_val = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * cfg.validation_fraction)),
      1, n - 1);
  const std::size_t n_train = n - n_val;

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(n_train);
  std::iota(order.begin(), order.end(), std::size_t{0});

  AdamState opt = make_adam_state(net);
  Net grads = zeros_like(net);
  auto grad_arrays = grads.param_arrays();

  TrainHistory history;
  double best_val = std::numeric_limits<double>::infinity();
  Net best = net;
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);

    double train_sq_sum = 0.0;
    for (std::size_t start = 0; start < n_train; start += cfg.batch_size) {
      const std::size_t batch_n = std::min(cfg.batch_size, n_train - start);
      for (auto* arr : grad_arrays) std::fill(arr->begin(), arr->end(), 0.0);

      for (std::size_t b = 0; b < batch_n; ++b) {
        const std::size_t idx = order[start + b];
        typename Net::ForwardCache cache;
        const double pred = network_forward(net, data.windows[idx], &cache);
        const double err = pred - data.targets[idx];
        train_sq_sum += err * err;
        // d(MSE)/d(pred) with the batch-mean loss
        network_backward_accum(net, cache, 2.0 * err / static_cast<double>(batch_n), grads);
      }

      if (cfg.clip_norm) clip_global_norm(grads, *cfg.clip_norm);
      adam_update(net, grads, opt, cfg.learning_rate);
    }

    const double train_loss = train_sq_sum / static_cast<double>(n_train);
    const double val_loss = detail::mean_squared_error(net, data, n_train, n);
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
      fail(Errc::nonfinite_loss, "loss diverged; rescale inputs or lower the learning rate");

    history.train_loss.push_back(train_loss);
    history.val_loss.push_back(val_loss);

    if (val_loss < best_val) {
      best_val = val_loss;
      best = net;
      history.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      history.stopped_early = true;
      break;
    }
  }

  net = best;
  return history;
}

// ---------------------------------------------------------------------------
// Closed-loop forecasting

/// Predicts one step at a time, feeding each prediction back as the newest
/// window element (no ground-truth feedback).
template <typename Net>
std::vector<double> predict_recursive(const Net& net, std::span<const Vector> seed_window,
                                      std::size_t horizon) {
  if (seed_window.empty()) fail(Errc::empty_window, "seed window is empty");
  if (horizon == 0) fail(Errc::invalid_config, "horizon must be at least 1");

  std::vector<Vector> window(seed_window.begin(), seed_window.end());
  std::vector<double> out;
  out.reserve(horizon);
  for (std::size_t s = 0; s < horizon; ++s) {
    const double pred = network_forward(net, window);
    out.push_back(pred);
    window.erase(window.begin());
    window.emplace_back(Vector{pred});
  }
  return out;
}

}  // namespace clockcast
