#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "clockcast/errors.hpp"

namespace clockcast {

/// Dense 1-D array of doubles. All reductions run left to right so results
/// are bitwise reproducible.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double value = 0.0) : data_(n, value) {}
  Vector(std::initializer_list<double> values) : data_(values) {}

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  void fill(double value) { data_.assign(data_.size(), value); }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

/// Dense row-major 2-D array of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

namespace detail {
inline void require(bool ok, const char* what) {
  if (!ok) fail(Errc::dimension_mismatch, what);
}
}  // namespace detail

/// out += M x
inline void matvec_add(const Matrix& m, const Vector& x, Vector& out) {
  detail::require(m.cols() == x.size() && m.rows() == out.size(), "matvec_add shapes");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) acc += m(r, c) * x[c];
    out[r] += acc;
  }
}

inline Vector matvec(const Matrix& m, const Vector& x) {
  Vector out(m.rows());
  matvec_add(m, x, out);
  return out;
}

/// out += M^T y
inline void matvec_transpose_add(const Matrix& m, const Vector& y, Vector& out) {
  detail::require(m.rows() == y.size() && m.cols() == out.size(), "matvec_transpose_add shapes");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double yr = y[r];
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += m(r, c) * yr;
  }
}

/// M += y x^T
inline void add_outer(Matrix& m, const Vector& y, const Vector& x) {
  detail::require(m.rows() == y.size() && m.cols() == x.size(), "add_outer shapes");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double yr = y[r];
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) += yr * x[c];
  }
}

inline void add_to(const Vector& x, Vector& out) {
  detail::require(x.size() == out.size(), "add_to shapes");
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += x[i];
}

inline double dot(const Vector& a, const Vector& b) {
  detail::require(a.size() == b.size(), "dot shapes");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace clockcast
