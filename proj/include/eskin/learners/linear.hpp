// Ordinary least squares via the centred normal equations.
#pragma once

#include <vector>

#include <json.hpp>

#include "eskin/linalg.hpp"

namespace eskin {

struct LinearModel {
  std::vector<double> weights;
  double intercept = 0.0;

  std::size_t dim() const { return weights.size(); }
  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

// Minimises sum (y_i - w.x_i - b)^2. Centring removes the intercept from the
// system, leaving Xc^T Xc w = Xc^T yc, solved by Cholesky. Rank deficiency is
// an error rather than a silent pseudo-inverse.
inline LinearModel ols_fit(const Matrix& x, std::span<const double> y) {
  const std::size_t n = x.rows(), d = x.cols();
  if (y.size() != n) throw DimensionError("ols_fit: X has " + std::to_string(n) + " rows but y has " + std::to_string(y.size()));
  if (n < d + 1) throw SingularDesignError("ols_fit: need at least d+1 = " + std::to_string(d + 1) + " samples, got " + std::to_string(n));

  std::vector<double> mx(d, 0.0);
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) mx[j] += x(i, j);
    my += y[i];
  }
  for (auto& m : mx) m /= double(n);
  my /= double(n);

  Matrix gram(d, d);
  std::vector<double> rhs(d, 0.0);
  std::vector<double> xc(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) xc[j] = x(i, j) - mx[j];
    const double yc = y[i] - my;
    for (std::size_t a = 0; a < d; ++a) {
      rhs[a] += xc[a] * yc;
      auto ga = gram.row(a);
      for (std::size_t b = 0; b <= a; ++b) ga[b] += xc[a] * xc[b];
    }
  }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < a; ++b) gram(b, a) = gram(a, b);

  try {
    cholesky_in_place(gram, 1e-12);
  } catch (const FactorisationError&) {
    throw SingularDesignError("ols_fit: design matrix is rank deficient after centring");
  }
  cholesky_solve(gram, rhs);

  LinearModel m{std::move(rhs), my};
  m.intercept = my - dot(m.weights, mx);
  return m;
}

inline std::vector<double> ols_predict(const LinearModel& m, const Matrix& x) {
  if (x.rows() == 0) return {};
  if (x.cols() != m.dim())
    throw DimensionError("ols_predict: model has " + std::to_string(m.dim()) + " features, input has " + std::to_string(x.cols()));
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = dot(m.weights, x.row(i)) + m.intercept;
  return out;
}

inline void to_json(nlohmann::json& j, const LinearModel& m) {
  j = {{"weights", m.weights}, {"intercept", m.intercept}};
}
inline void from_json(const nlohmann::json& j, LinearModel& m) {
  j.at("weights").get_to(m.weights);
  j.at("intercept").get_to(m.intercept);
}

}  // namespace eskin
