// Minimal dense linear algebra: a row-major matrix and an in-place Cholesky
// factorisation with triangular solves. Enough for OLS normal equations and
// exact GP regression; nothing here allocates behind the caller's back.
#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "eskin/errors.hpp"

namespace eskin {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const { return data_; }

  void append_row(std::span<const double> r) {
    if (rows_ == 0 && cols_ == 0) cols_ = r.size();
    if (r.size() != cols_) throw DimensionError("row width mismatch");
    data_.insert(data_.end(), r.begin(), r.end());
    ++rows_;
  }

  Matrix select_rows(std::span<const std::size_t> idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      auto src = row(idx[i]);
      std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
  }

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m;
    for (const auto& r : rows) m.append_row(r);
    return m;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Overwrites the lower triangle of the symmetric matrix `a` with L such that
// L*L^T = a; the strict upper triangle is zeroed. A pivot <= rel_tol * a_jj
// (original diagonal) is treated as loss of positive definiteness.
inline void cholesky_in_place(Matrix& a, double rel_tol = 0.0) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionError("cholesky needs a square matrix");
  for (std::size_t j = 0; j < n; ++j) {
    const double diag0 = a(j, j);
    auto rj = a.row(j);
    double d = diag0;
    for (std::size_t k = 0; k < j; ++k) d -= rj[k] * rj[k];
    if (!(d > rel_tol * std::abs(diag0)) || !std::isfinite(d))
      throw FactorisationError("matrix is not positive definite (pivot " + std::to_string(j) +
                               " = " + std::to_string(d) + ")");
    const double ljj = std::sqrt(d);
    rj[j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      auto ri = a.row(i);
      double s = ri[j];
      for (std::size_t k = 0; k < j; ++k) s -= ri[k] * rj[k];
      ri[j] = s / ljj;
    }
    for (std::size_t k = j + 1; k < n; ++k) rj[k] = 0.0;
  }
}

// Solves L z = b in place.
inline void forward_substitute(const Matrix& l, std::span<double> b) {
  for (std::size_t i = 0; i < l.rows(); ++i) {
    auto ri = l.row(i);
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= ri[k] * b[k];
    b[i] = s / ri[i];
  }
}

// Solves L^T z = b in place.
inline void backward_substitute(const Matrix& l, std::span<double> b) {
  const std::size_t n = l.rows();
  for (std::size_t ii = n; ii-- > 0;) {
    b[ii] /= l(ii, ii);
    const double v = b[ii];
    auto ri = l.row(ii);
    for (std::size_t k = 0; k < ii; ++k) b[k] -= ri[k] * v;
  }
}

// Solves (L L^T) x = b in place.
inline void cholesky_solve(const Matrix& l, std::span<double> b) {
  forward_substitute(l, b);
  backward_substitute(l, b);
}

}  // namespace eskin
