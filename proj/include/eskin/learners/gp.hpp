// Exact Gaussian-process regression with a squared-exponential (RBF) kernel.
//
// Training on more than `cap` points uses a seeded uniform subsample, because
// the dense Cholesky factor is cubic in n.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include <json.hpp>

#include "eskin/learners/standardizer.hpp"
#include "eskin/linalg.hpp"
#include "eskin/random.hpp"

namespace eskin {

inline double rbf_kernel(std::span<const double> a, std::span<const double> b, double length_scale,
                         double signal_var) {
  return signal_var * std::exp(-squared_distance(a, b) / (2.0 * length_scale * length_scale));
}

struct GpHyper {
  double length_scale = 2.0;
  double signal_var = 1.0;
  double noise_var = 1e-4;

  friend bool operator==(const GpHyper&, const GpHyper&) = default;
};

struct GpConfig {
  GpHyper hyper;
  std::size_t cap = 2000;
  std::uint64_t seed = 7;
  bool standardize = true;
  // Optional log-marginal-likelihood grid search over (length_scale, noise_var).
  bool grid_search = false;
  std::vector<double> grid_length_scales{0.5, 1.0, 2.0, 4.0, 8.0};
  std::vector<double> grid_noise_vars{1e-4, 1e-3, 1e-2};

  friend bool operator==(const GpConfig&, const GpConfig&) = default;
};

struct GpModel {
  Standardizer scaler;
  Matrix train_inputs;  // already scaled
  std::vector<double> alpha;
  Matrix chol;
  GpHyper hyper;
  double mean_offset = 0.0;
  double log_marginal_likelihood = 0.0;

  std::size_t dim() const { return scaler.dim(); }
  std::size_t size() const { return train_inputs.rows(); }
};

struct GpPrediction {
  std::vector<double> mean;
  std::vector<double> std;
};

namespace gp_detail {

inline Matrix kernel_matrix(const Matrix& x, const GpHyper& h) {
  const std::size_t n = x.rows();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double v = rbf_kernel(x.row(i), x.row(j), h.length_scale, h.signal_var);
      k(i, j) = v;
      k(j, i) = v;
    }
    k(i, i) = h.signal_var + h.noise_var;
  }
  return k;
}

// Factorises K + noise*I and solves for alpha; returns the log marginal likelihood.
inline double factor_and_solve(const Matrix& x, std::span<const double> centred_y, const GpHyper& h,
                               Matrix& chol, std::vector<double>& alpha) {
  chol = kernel_matrix(x, h);
  try {
    cholesky_in_place(chol, 1e-12);
  } catch (const FactorisationError& e) {
    throw FactorisationError(std::string("gp_fit: K + noise_var*I is not positive definite; ") +
                             "duplicate inputs need noise_var > 0 (add jitter). " + e.what());
  }
  alpha.assign(centred_y.begin(), centred_y.end());
  cholesky_solve(chol, alpha);
  const std::size_t n = x.rows();
  double logdet_half = 0.0;
  for (std::size_t i = 0; i < n; ++i) logdet_half += std::log(chol(i, i));
  return -0.5 * dot(centred_y, alpha) - logdet_half - 0.5 * double(n) * std::log(2.0 * std::numbers::pi);
}

}  // namespace gp_detail

inline GpModel gp_fit(const Matrix& x, std::span<const double> y, const GpConfig& cfg) {
  if (x.rows() == 0) throw ValidationError("gp_fit: no training points");
  if (y.size() != x.rows()) throw DimensionError("gp_fit: X and y lengths differ");
  if (!(cfg.hyper.length_scale > 0.0) || !(cfg.hyper.signal_var > 0.0) || !(cfg.hyper.noise_var >= 0.0))
    throw ConfigError("gp_fit: need length_scale > 0, signal_var > 0, noise_var >= 0");
  if (cfg.cap == 0) throw ConfigError("gp_fit: cap must be >= 1");

  const auto idx = sample_indices(x.rows(), cfg.cap, cfg.seed);
  Matrix xs = x.select_rows(idx);
  std::vector<double> ys;
  ys.reserve(idx.size());
  for (auto i : idx) ys.push_back(y[i]);

  GpModel m;
  m.scaler = cfg.standardize ? Standardizer::fit(xs) : Standardizer::identity(xs.cols());
  m.train_inputs = cfg.standardize ? m.scaler.transform(xs) : std::move(xs);
  double mean = 0.0;
  for (double v : ys) mean += v;
  m.mean_offset = mean / double(ys.size());
  for (auto& v : ys) v -= m.mean_offset;

  m.hyper = cfg.hyper;
  if (cfg.grid_search) {
    std::optional<double> best;
    GpHyper best_h = cfg.hyper;
    for (double ls : cfg.grid_length_scales) {
      for (double nv : cfg.grid_noise_vars) {
        GpHyper h{ls, cfg.hyper.signal_var, nv};
        Matrix l;
        std::vector<double> a;
        double lml;
        try {
          lml = gp_detail::factor_and_solve(m.train_inputs, ys, h, l, a);
        } catch (const FactorisationError&) {
          continue;
        }
        if (!best || lml > *best) {
          best = lml;
          best_h = h;
        }
      }
    }
    if (!best) throw FactorisationError("gp_fit: no grid point yields a positive-definite kernel");
    m.hyper = best_h;
  }
  m.log_marginal_likelihood = gp_detail::factor_and_solve(m.train_inputs, ys, m.hyper, m.chol, m.alpha);
  return m;
}

namespace gp_detail {

inline void check_dim(const GpModel& m, const Matrix& q) {
  if (q.rows() > 0 && q.cols() != m.dim())
    throw DimensionError("gp_predict: model has " + std::to_string(m.dim()) + " features, input has " +
                         std::to_string(q.cols()));
}

}  // namespace gp_detail

inline std::vector<double> gp_predict_mean(const GpModel& m, const Matrix& queries) {
  gp_detail::check_dim(m, queries);
  std::vector<double> out(queries.rows());
  std::vector<double> q(m.dim());
  for (std::size_t r = 0; r < queries.rows(); ++r) {
    m.scaler.apply_row(queries.row(r), q);
    double s = m.mean_offset;
    for (std::size_t i = 0; i < m.size(); ++i)
      s += m.alpha[i] * rbf_kernel(m.train_inputs.row(i), q, m.hyper.length_scale, m.hyper.signal_var);
    out[r] = s;
  }
  return out;
}

inline GpPrediction gp_predict(const GpModel& m, const Matrix& queries) {
  gp_detail::check_dim(m, queries);
  GpPrediction p;
  p.mean.resize(queries.rows());
  p.std.resize(queries.rows());
  std::vector<double> q(m.dim()), kstar(m.size());
  for (std::size_t r = 0; r < queries.rows(); ++r) {
    m.scaler.apply_row(queries.row(r), q);
    for (std::size_t i = 0; i < m.size(); ++i)
      kstar[i] = rbf_kernel(m.train_inputs.row(i), q, m.hyper.length_scale, m.hyper.signal_var);
    p.mean[r] = m.mean_offset + dot(kstar, m.alpha);
    forward_substitute(m.chol, kstar);
    const double var = m.hyper.signal_var - dot(kstar, kstar);
    p.std[r] = std::sqrt(std::max(var, 0.0));
  }
  return p;
}

inline void to_json(nlohmann::json& j, const GpHyper& h) {
  j = {{"length_scale", h.length_scale}, {"signal_var", h.signal_var}, {"noise_var", h.noise_var}};
}
inline void from_json(const nlohmann::json& j, GpHyper& h) {
  GpHyper d;
  h.length_scale = j.value("length_scale", d.length_scale);
  h.signal_var = j.value("signal_var", d.signal_var);
  h.noise_var = j.value("noise_var", d.noise_var);
}

inline void to_json(nlohmann::json& j, const GpConfig& c) {
  j = {{"hyper", c.hyper},
       {"cap", c.cap},
       {"seed", c.seed},
       {"standardize", c.standardize},
       {"grid_search", c.grid_search},
       {"grid_length_scales", c.grid_length_scales},
       {"grid_noise_vars", c.grid_noise_vars}};
}
inline void from_json(const nlohmann::json& j, GpConfig& c) {
  GpConfig d;
  c.hyper = j.value("hyper", d.hyper);
  c.cap = j.value("cap", d.cap);
  c.seed = j.value("seed", d.seed);
  c.standardize = j.value("standardize", d.standardize);
  c.grid_search = j.value("grid_search", d.grid_search);
  c.grid_length_scales = j.value("grid_length_scales", d.grid_length_scales);
  c.grid_noise_vars = j.value("grid_noise_vars", d.grid_noise_vars);
}

// The Cholesky factor is not stored; it is rebuilt from the training inputs on load.
inline void to_json(nlohmann::json& j, const GpModel& m) {
  j = {{"scaler", m.scaler},
       {"train_inputs", m.train_inputs},
       {"alpha", m.alpha},
       {"hyper", m.hyper},
       {"mean_offset", m.mean_offset},
       {"log_marginal_likelihood", m.log_marginal_likelihood}};
}
inline void from_json(const nlohmann::json& j, GpModel& m) {
  j.at("scaler").get_to(m.scaler);
  j.at("train_inputs").get_to(m.train_inputs);
  j.at("alpha").get_to(m.alpha);
  j.at("hyper").get_to(m.hyper);
  j.at("mean_offset").get_to(m.mean_offset);
  m.log_marginal_likelihood = j.value("log_marginal_likelihood", 0.0);
  m.chol = gp_detail::kernel_matrix(m.train_inputs, m.hyper);
  cholesky_in_place(m.chol, 1e-12);
}

}  // namespace eskin
