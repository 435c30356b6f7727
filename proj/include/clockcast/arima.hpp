#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "clockcast/errors.hpp"
#include "clockcast/series.hpp"

namespace clockcast {

struct ArimaOrder {
  std::size_t p = 1;  // AR order
  std::size_t d = 1;  // integration order
  std::size_t q = 1;  // MA order
};

inline void validate(const ArimaOrder& o) {
  if (o.p + o.q == 0 && o.d == 0) fail(Errc::invalid_config, "order (0,0,0) fits nothing");
  if (o.p > 5 || o.d > 5 || o.q > 5) fail(Errc::invalid_config, "arima orders are capped at 5");
}

/// State needed to forecast past the training span: the last p stationary
/// values, the last q residuals (oldest first), and the last value of each
/// partially differenced level (levels[k] = last of the k-times-differenced
/// series, k in [0, d)).
struct ArimaTail {
  std::vector<double> w;
  std::vector<double> e;
  std::vector<double> levels;
};

struct ArimaModel {
  ArimaOrder order;
  std::vector<double> phi;
  std::vector<double> theta;
  double intercept = 0.0;
  double sigma2 = 0.0;
  ArimaTail tail;
};

namespace detail {

inline std::vector<double> difference_once(const std::vector<double>& x) {
  std::vector<double> out(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) out[i] = x[i + 1] - x[i];
  return out;
}

/// Conditional sum of squares. Innovations before index p are zero; the sum
/// runs over t in [p, n). Returns +inf on numeric blow-up so the simplex
/// search treats divergent parameters as arbitrarily bad.
inline double arima_css(const std::vector<double>& w, std::size_t p, std::size_t q,
                        const double* params, std::vector<double>& e_scratch) {
  const double c = params[0];
  const double* phi = params + 1;
  const double* theta = params + 1 + p;
  const std::size_t n = w.size();
  e_scratch.assign(n, 0.0);
  double css = 0.0;
  for (std::size_t t = p; t < n; ++t) {
    double e = w[t] - c;
    for (std::size_t i = 1; i <= p; ++i) e -= phi[i - 1] * w[t - i];
    for (std::size_t j = 1; j <= q && j <= t; ++j) e -= theta[j - 1] * e_scratch[t - j];
    if (!std::isfinite(e)) return std::numeric_limits<double>::infinity();
    e_scratch[t] = e;
    css += e * e;
  }
  return css;
}

/// Least squares via normal equations with partial pivoting. Returns false
/// when X^T X is singular.
inline bool ols_solve(const std::vector<std::vector<double>>& rows, const std::vector<double>& y,
                      std::vector<double>& beta) {
  const std::size_t k = rows.empty() ? 0 : rows[0].size();
  beta.assign(k, 0.0);
  if (k == 0 || rows.size() < k) return false;

  std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i; j < k; ++j) a[i][j] += rows[r][i] * rows[r][j];
      a[i][k] += rows[r][i] * y[r];
    }
  }
  for (std::size_t i = 1; i < k; ++i)
    for (std::size_t j = 0; j < i; ++j) a[i][j] = a[j][i];

  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-12) return false;
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const double factor = a[r][col] / a[col][col];
      for (std::size_t j = col; j <= k; ++j) a[r][j] -= factor * a[col][j];
    }
  }
  for (std::size_t i = 0; i < k; ++i) beta[i] = a[i][k] / a[i][i];
  return true;
}

/// Two-stage Hannan-Rissanen starting point: a long AR fit supplies proxy
/// innovations, then one regression of w on its own lags and those proxies
/// gives (intercept, phi, theta). Falls back to zero coefficients around the
/// series mean when a regression is singular.
inline std::vector<double> hannan_rissanen_init(const std::vector<double>& w, std::size_t p,
                                                std::size_t q) {
  const std::size_t n = w.size();
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(n);
  std::vector<double> x0(1 + p + q, 0.0);
  x0[0] = mean;

  if (p + q == 0) return x0;

  auto lag_regression = [&](std::size_t lags, std::size_t start,
                            const std::vector<double>* resid, std::size_t resid_lags,
                            std::vector<double>& beta) {
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    for (std::size_t t = start; t < n; ++t) {
      std::vector<double> row;
      row.reserve(1 + lags + resid_lags);
      row.push_back(1.0);
      for (std::size_t i = 1; i <= lags; ++i) row.push_back(w[t - i]);
      for (std::size_t j = 1; j <= resid_lags; ++j) row.push_back((*resid)[t - j]);
      rows.push_back(std::move(row));
      y.push_back(w[t]);
    }
    return ols_solve(rows, y, beta);
  };

  if (q == 0) {
    std::vector<double> beta;
    if (lag_regression(p, p, nullptr, 0, beta)) {
      x0[0] = beta[0];
      for (std::size_t i = 0; i < p; ++i) x0[1 + i] = beta[1 + i];
    }
    return x0;
  }

  std::size_t m = std::max<std::size_t>(p + q + 2, 3);
  m = std::min(m, n / 5);
  m = std::max<std::size_t>(m, 1);

  std::vector<double> long_beta;
  if (!lag_regression(m, m, nullptr, 0, long_beta)) return x0;

  std::vector<double> resid(n, 0.0);
  for (std::size_t t = m; t < n; ++t) {
    double r = w[t] - long_beta[0];
    for (std::size_t i = 1; i <= m; ++i) r -= long_beta[i] * w[t - i];
    resid[t] = r;
  }

  const std::size_t start = std::max(p, m + q);
  if (start >= n) return x0;
  std::vector<double> beta;
  if (lag_regression(p, start, &resid, q, beta)) {
    x0[0] = beta[0];
    for (std::size_t i = 0; i < p; ++i) x0[1 + i] = beta[1 + i];
    for (std::size_t j = 0; j < q; ++j) x0[1 + p + j] = beta[1 + p + j];
  }
  return x0;
}

/// Nelder-Mead with pinned constants (reflect 1, expand 2, contract 0.5,
/// shrink 0.5, 500 iterations, CSS spread tolerance 1e-10). Deterministic.
template <typename F>
std::vector<double> nelder_mead(F&& objective, std::vector<double> x0) {
  const std::size_t dim = x0.size();
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  constexpr int kMaxIter = 500;
  constexpr double kTol = 1e-10;

  std::vector<std::vector<double>> simplex(dim + 1, x0);
  for (std::size_t i = 0; i < dim; ++i)
    simplex[i + 1][i] += std::max(0.1 * std::abs(x0[i]), 0.05);

  std::vector<double> f(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) f[i] = objective(simplex[i]);

  std::vector<std::size_t> idx(dim + 1);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    const std::size_t best = idx[0], second_worst = idx[dim - 1], worst = idx[dim];

    if (std::isfinite(f[best]) && f[worst] - f[best] <= kTol * (std::abs(f[best]) + kTol)) break;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[idx[r]][i];
    for (double& ci : centroid) ci /= static_cast<double>(dim);

    auto blend = [&](double coeff) {
      std::vector<double> x(dim);
      for (std::size_t i = 0; i < dim; ++i)
        x[i] = centroid[i] + coeff * (simplex[worst][i] - centroid[i]);
      return x;
    };

    std::vector<double> xr = blend(-kReflect);
    const double fr = objective(xr);
    if (fr < f[best]) {
      std::vector<double> xe = blend(-kReflect * kExpand);
      const double fe = objective(xe);
      if (fe < fr) {
        simplex[worst] = std::move(xe);
        f[worst] = fe;
      } else {
        simplex[worst] = std::move(xr);
        f[worst] = fr;
      }
      continue;
    }
    if (fr < f[second_worst]) {
      simplex[worst] = std::move(xr);
      f[worst] = fr;
      continue;
    }

    const bool outside = fr < f[worst];
    std::vector<double> xc = blend(outside ? -kReflect * kContract : kContract);
    const double fc = objective(xc);
    if (fc < (outside ? fr : f[worst])) {
      simplex[worst] = std::move(xc);
      f[worst] = fc;
      continue;
    }

    for (std::size_t r = 1; r <= dim; ++r) {
      auto& vertex = simplex[idx[r]];
      for (std::size_t i = 0; i < dim; ++i)
        vertex[i] = simplex[best][i] + kShrink * (vertex[i] - simplex[best][i]);
      f[idx[r]] = objective(vertex);
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= dim; ++i)
    if (f[i] < f[best]) best = i;
  return simplex[best];
}

/// Schur-Cohn step-down: the AR polynomial 1 - sum phi_i z^i has all roots
/// outside the unit circle iff every reflection coefficient has |k| < 1.
inline bool ar_is_stationary(const std::vector<double>& phi) {
  std::vector<double> a = phi;
  for (std::size_t m = a.size(); m >= 1; --m) {
    const double k = a[m - 1];
    if (!(std::abs(k) < 1.0)) return false;
    const double denom = 1.0 - k * k;
    std::vector<double> next(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) next[i] = (a[i] + k * a[m - 2 - i]) / denom;
    a = std::move(next);
  }
  return true;
}

}  // namespace detail

/// CSS fit: d-fold differencing, Hannan-Rissanen start, simplex minimization
/// of the conditional sum of squares. Deterministic. Throws
/// NonStationaryEstimate when the fitted AR part has a root inside the unit
/// circle (reported, never silently repaired).
inline ArimaModel arima_fit(const UniformSeries& u, const ArimaOrder& order) {
  validate(order);
  const std::size_t need = 10 * (order.p + order.q + 1) + order.d;
  if (u.values.size() < need) fail(Errc::too_short, "series shorter than 10*(p+q+1)+d");

  std::vector<double> levels;
  std::vector<double> w = u.values;
  for (std::size_t k = 0; k < order.d; ++k) {
    levels.push_back(w.back());
    w = detail::difference_once(w);
  }

  const std::size_t p = order.p, q = order.q;
  std::vector<double> e_scratch;
  auto objective = [&](const std::vector<double>& params) {
    return detail::arima_css(w, p, q, params.data(), e_scratch);
  };

  std::vector<double> best = detail::nelder_mead(objective, detail::hannan_rissanen_init(w, p, q));
  const double css = objective(best);  // repopulates e_scratch at the optimum

  ArimaModel model;
  model.order = order;
  model.intercept = best[0];
  model.phi.assign(best.begin() + 1, best.begin() + 1 + p);
  model.theta.assign(best.begin() + 1 + p, best.end());
  model.sigma2 = css / static_cast<double>(w.size() - p);
  model.tail.levels = std::move(levels);
  model.tail.w.assign(w.end() - static_cast<std::ptrdiff_t>(p), w.end());
  model.tail.e.assign(e_scratch.end() - static_cast<std::ptrdiff_t>(q), e_scratch.end());

  if (!detail::ar_is_stationary(model.phi))
    fail(Errc::non_stationary_estimate, "fitted AR polynomial has a root inside the unit circle");
  return model;
}

/// Zero-future-innovation recursion on the stationary scale followed by
/// d-fold cumulative reintegration from the stored level tails.
inline std::vector<double> arima_forecast(const ArimaModel& m, std::size_t horizon) {
  if (horizon == 0) fail(Errc::invalid_config, "horizon must be at least 1");
  const std::size_t p = m.order.p, q = m.order.q, d = m.order.d;
  if (m.phi.size() != p || m.theta.size() != q || m.tail.w.size() != p ||
      m.tail.e.size() != q || m.tail.levels.size() != d)
    fail(Errc::dimension_mismatch, "model tails do not match its order");

  std::vector<double> out;
  out.reserve(horizon);
  // Step index t is 1-based for forecasts; t <= 0 reaches into the tails.
  for (std::size_t s = 1; s <= horizon; ++s) {
    double value = m.intercept;
    for (std::size_t i = 1; i <= p; ++i) {
      const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(s) - static_cast<std::ptrdiff_t>(i);
      value += m.phi[i - 1] * (t >= 1 ? out[static_cast<std::size_t>(t) - 1]
                                      : m.tail.w[static_cast<std::size_t>(
                                            static_cast<std::ptrdiff_t>(p) - 1 + t)]);
    }
    for (std::size_t j = 1; j <= q; ++j) {
      const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(s) - static_cast<std::ptrdiff_t>(j);
      if (t <= 0)  // future innovations are zero; only training residuals contribute
        value += m.theta[j - 1] *
                 m.tail.e[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(q) - 1 + t)];
    }
    out.push_back(value);
  }

  for (std::size_t k = d; k-- > 0;) {
    double last = m.tail.levels[k];
    for (double& v : out) {
      last += v;
      v = last;
    }
  }
  return out;
}

/// AIC over the pinned grid p,q in [0,3], d in [0,2]; candidates that fail to
/// fit are skipped. Ties keep the earliest candidate in iteration order.
inline ArimaOrder arima_auto_order(const UniformSeries& u) {
  bool found = false;
  ArimaOrder best_order;
  double best_aic = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d <= 2; ++d) {
    for (std::size_t p = 0; p <= 3; ++p) {
      for (std::size_t q = 0; q <= 3; ++q) {
        if (p + q == 0 && d == 0) continue;
        const ArimaOrder order{p, d, q};
        ArimaModel model;
        try {
          model = arima_fit(u, order);
        } catch (const Error&) {
          continue;
        }
        const double n_eff = static_cast<double>(u.values.size() - d - p);
        const double aic =
            n_eff * std::log(std::max(model.sigma2, 1e-300)) + 2.0 * static_cast<double>(p + q + 1);
        if (aic < best_aic) {
          best_aic = aic;
          best_order = order;
          found = true;
        }
      }
    }
  }
  if (!found) fail(Errc::too_short, "no candidate order fits the series");
  return best_order;
}

}  // namespace clockcast
