// Binary soft-margin SVM with an RBF kernel and per-class box constraints,
// trained by sequential minimal optimisation.
//
// Dual: min 1/2 a^T Q a - e^T a   s.t.  y^T a = 0,  0 <= a_i <= C * w(y_i),
// with Q_ij = y_i y_j k(x_i, x_j). Pairs are picked by second-order working-set
// selection and the gradient is maintained incrementally; kernel rows are
// computed on demand behind an LRU cache.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <list>
#include <optional>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "eskin/learners/standardizer.hpp"
#include "eskin/linalg.hpp"
#include "eskin/random.hpp"

namespace eskin {

struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;
  friend bool operator==(const ClassWeights&, const ClassWeights&) = default;
};

struct SvmConfig {
  double c = 1.0;
  double gamma = 0.0;  // <= 0: 1 / (d * mean feature variance) of the (scaled) inputs
  std::optional<ClassWeights> class_weights;  // unset: inverse class frequency
  double tol = 1e-3;
  int max_passes = 10;
  std::uint64_t seed = 11;
  bool standardize = true;
  std::size_t cache_mb = 128;

  friend bool operator==(const SvmConfig&, const SvmConfig&) = default;
};

struct SvmModel {
  Standardizer scaler;
  Matrix support_inputs;  // scaled
  std::vector<double> dual_coefs;  // alpha_i * y_i
  double bias = 0.0;
  double kernel_gamma = 1.0;
  ClassWeights class_weights;
  double c = 1.0;
  std::size_t iterations = 0;
  bool converged = false;

  std::size_t dim() const { return scaler.dim(); }
};

namespace svm_detail {

class KernelRows {
 public:
  KernelRows(const Matrix& x, double gamma, std::size_t budget_bytes)
      : x_(x), gamma_(gamma),
        max_rows_(std::max<std::size_t>(2, budget_bytes / std::max<std::size_t>(1, x.rows() * sizeof(double)))) {}

  const std::vector<double>& row(std::size_t i) {
    if (auto it = index_.find(i); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    if (lru_.size() >= max_rows_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    std::vector<double> r(x_.rows());
    const auto xi = x_.row(i);
    for (std::size_t j = 0; j < x_.rows(); ++j) r[j] = std::exp(-gamma_ * squared_distance(xi, x_.row(j)));
    lru_.emplace_front(i, std::move(r));
    index_[i] = lru_.begin();
    return lru_.front().second;
  }

 private:
  using Entry = std::pair<std::size_t, std::vector<double>>;
  const Matrix& x_;
  double gamma_;
  std::size_t max_rows_;
  std::list<Entry> lru_;
  std::unordered_map<std::size_t, std::list<Entry>::iterator> index_;
};

}  // namespace svm_detail

// Labels must be -1 or +1.
inline SvmModel svm_fit(const Matrix& x, std::span<const int> labels, const SvmConfig& cfg) {
  const std::size_t n = x.rows();
  if (labels.size() != n) throw DimensionError("svm_fit: X and labels lengths differ");
  std::size_t n_pos = 0, n_neg = 0;
  for (int l : labels) {
    if (l == 1) ++n_pos;
    else if (l == -1) ++n_neg;
    else throw ValidationError("svm_fit: labels must be -1 or +1");
  }
  if (n_pos == 0 || n_neg == 0) throw DegenerateLabelsError("svm_fit: both classes must be present");
  if (!(cfg.c > 0.0) || !(cfg.tol > 0.0) || cfg.max_passes < 1) throw ConfigError("svm_fit: need C > 0, tol > 0, max_passes >= 1");

  SvmModel m;
  m.c = cfg.c;
  m.scaler = cfg.standardize ? Standardizer::fit(x) : Standardizer::identity(x.cols());
  m.class_weights = cfg.class_weights.value_or(
      ClassWeights{double(n) / (2.0 * double(n_neg)), double(n) / (2.0 * double(n_pos))});

  // Seeded permutation of the training order; only WSS tie-breaking depends on it.
  auto order = iota_indices(n);
  {
    Rng rng(cfg.seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  Matrix xs(n, x.cols());
  std::vector<double> y(n), cap(n);
  for (std::size_t t = 0; t < n; ++t) {
    m.scaler.apply_row(x.row(order[t]), xs.row(t));
    y[t] = labels[order[t]];
    cap[t] = cfg.c * (y[t] > 0 ? m.class_weights.positive : m.class_weights.negative);
  }

  if (cfg.gamma > 0.0) {
    m.kernel_gamma = cfg.gamma;
  } else {
    double var_sum = 0.0;
    const auto s = Standardizer::fit(xs);
    for (double sc : s.scale) var_sum += sc * sc;
    const double mean_var = var_sum / double(x.cols());
    m.kernel_gamma = 1.0 / (double(x.cols()) * (mean_var > 0.0 ? mean_var : 1.0));
  }

  constexpr double kTau = 1e-12;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> alpha(n, 0.0), grad(n, -1.0);
  svm_detail::KernelRows rows(xs, m.kernel_gamma, cfg.cache_mb << 20);
  auto upper = [&](std::size_t t) { return alpha[t] >= cap[t]; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  const std::size_t max_iter = std::size_t(cfg.max_passes) * std::max<std::size_t>(n, 100);
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    // First index: maximal violator in I_up.
    double gmax = -inf;
    std::ptrdiff_t i = -1;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      const bool in_up = y[t] > 0 ? !upper(t) : !lower(t);
      if (in_up && v >= gmax) {
        gmax = v;
        i = std::ptrdiff_t(t);
      }
    }
    if (i < 0) {
      m.converged = true;
      break;
    }
    const auto& ki = rows.row(std::size_t(i));
    // Second index: largest objective decrease among I_low violators.
    double gmax2 = -inf, best = inf;
    std::ptrdiff_t j = -1;
    for (std::size_t t = 0; t < n; ++t) {
      const bool in_low = y[t] > 0 ? !lower(t) : !upper(t);
      if (!in_low) continue;
      const double v = y[t] * grad[t];  // = -(-y_t G_t)
      gmax2 = std::max(gmax2, v);
      const double diff = gmax + v;
      if (diff > 0.0) {
        double quad = 1.0 + 1.0 - 2.0 * ki[t];
        if (quad <= 0.0) quad = kTau;
        const double obj = -(diff * diff) / quad;
        if (obj <= best) {
          best = obj;
          j = std::ptrdiff_t(t);
        }
      }
    }
    if (gmax + gmax2 < cfg.tol || j < 0) {
      m.converged = true;
      break;
    }
    const auto ui = std::size_t(i), uj = std::size_t(j);
    const auto& kj = rows.row(uj);
    const auto& ki2 = rows.row(ui);  // may have been evicted by the row(uj) fetch
    const double ci = cap[ui], cj = cap[uj];
    const double old_i = alpha[ui], old_j = alpha[uj];
    double quad = 2.0 - 2.0 * ki2[uj];
    if (quad <= 0.0) quad = kTau;
    if (y[ui] != y[uj]) {
      const double delta = (-grad[ui] - grad[uj]) / quad;
      const double diff = alpha[ui] - alpha[uj];
      alpha[ui] += delta;
      alpha[uj] += delta;
      if (diff > 0) {
        if (alpha[uj] < 0) { alpha[uj] = 0; alpha[ui] = diff; }
      } else {
        if (alpha[ui] < 0) { alpha[ui] = 0; alpha[uj] = -diff; }
      }
      if (diff > ci - cj) {
        if (alpha[ui] > ci) { alpha[ui] = ci; alpha[uj] = ci - diff; }
      } else {
        if (alpha[uj] > cj) { alpha[uj] = cj; alpha[ui] = cj + diff; }
      }
    } else {
      const double delta = (grad[ui] - grad[uj]) / quad;
      const double sum = alpha[ui] + alpha[uj];
      alpha[ui] -= delta;
      alpha[uj] += delta;
      if (sum > ci) {
        if (alpha[ui] > ci) { alpha[ui] = ci; alpha[uj] = sum - ci; }
      } else {
        if (alpha[uj] < 0) { alpha[uj] = 0; alpha[ui] = sum; }
      }
      if (sum > cj) {
        if (alpha[uj] > cj) { alpha[uj] = cj; alpha[ui] = sum - cj; }
      } else {
        if (alpha[ui] < 0) { alpha[ui] = 0; alpha[uj] = sum; }
      }
    }
    const double dai = (alpha[ui] - old_i) * y[ui];
    const double daj = (alpha[uj] - old_j) * y[uj];
    // G_k += Q_ki dai' with Q_ki = y_k y_i K_ki; dai already carries y_i.
    for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (ki2[t] * dai + kj[t] * daj);
  }
  m.iterations = iter;

  // Bias from free vectors, else midpoint of the feasible interval.
  double ub = inf, lb = -inf, free_sum = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (upper(t)) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      free_sum += yg;
    }
  }
  const double rho = n_free > 0 ? free_sum / double(n_free) : (ub + lb) / 2.0;
  m.bias = -rho;

  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      m.support_inputs.append_row(xs.row(t));
      m.dual_coefs.push_back(alpha[t] * y[t]);
    }
  }
  if (m.support_inputs.rows() == 0) m.support_inputs = Matrix(0, x.cols());
  return m;
}

inline std::vector<double> svm_decision(const SvmModel& m, const Matrix& queries) {
  if (queries.rows() > 0 && queries.cols() != m.dim())
    throw DimensionError("svm_predict: model has " + std::to_string(m.dim()) + " features, input has " +
                         std::to_string(queries.cols()));
  std::vector<double> out(queries.rows());
  std::vector<double> q(m.dim());
  for (std::size_t r = 0; r < queries.rows(); ++r) {
    m.scaler.apply_row(queries.row(r), q);
    double s = m.bias;
    for (std::size_t i = 0; i < m.dual_coefs.size(); ++i)
      s += m.dual_coefs[i] * std::exp(-m.kernel_gamma * squared_distance(m.support_inputs.row(i), q));
    out[r] = s;
  }
  return out;
}

// Exact zero decision values go to the positive class.
inline std::vector<int> svm_predict(const SvmModel& m, const Matrix& queries) {
  const auto d = svm_decision(m, queries);
  std::vector<int> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i] >= 0.0 ? 1 : -1;
  return out;
}

inline void to_json(nlohmann::json& j, const ClassWeights& w) { j = {{"negative", w.negative}, {"positive", w.positive}}; }
inline void from_json(const nlohmann::json& j, ClassWeights& w) {
  j.at("negative").get_to(w.negative);
  j.at("positive").get_to(w.positive);
}

inline void to_json(nlohmann::json& j, const SvmConfig& c) {
  j = {{"c", c.c}, {"gamma", c.gamma}, {"tol", c.tol}, {"max_passes", c.max_passes},
       {"seed", c.seed}, {"standardize", c.standardize}, {"cache_mb", c.cache_mb}};
  j["class_weights"] = c.class_weights ? nlohmann::json(*c.class_weights) : nlohmann::json(nullptr);
}
inline void from_json(const nlohmann::json& j, SvmConfig& c) {
  SvmConfig d;
  c.c = j.value("c", d.c);
  c.gamma = j.value("gamma", d.gamma);
  c.tol = j.value("tol", d.tol);
  c.max_passes = j.value("max_passes", d.max_passes);
  c.seed = j.value("seed", d.seed);
  c.standardize = j.value("standardize", d.standardize);
  c.cache_mb = j.value("cache_mb", d.cache_mb);
  if (j.contains("class_weights") && !j["class_weights"].is_null())
    c.class_weights = j["class_weights"].get<ClassWeights>();
  else
    c.class_weights.reset();
}

inline void to_json(nlohmann::json& j, const SvmModel& m) {
  j = {{"scaler", m.scaler}, {"support_inputs", m.support_inputs}, {"dual_coefs", m.dual_coefs},
       {"bias", m.bias}, {"kernel_gamma", m.kernel_gamma}, {"class_weights", m.class_weights},
       {"c", m.c}, {"iterations", m.iterations}, {"converged", m.converged}};
}
inline void from_json(const nlohmann::json& j, SvmModel& m) {
  j.at("scaler").get_to(m.scaler);
  j.at("support_inputs").get_to(m.support_inputs);
  j.at("dual_coefs").get_to(m.dual_coefs);
  j.at("bias").get_to(m.bias);
  j.at("kernel_gamma").get_to(m.kernel_gamma);
  j.at("class_weights").get_to(m.class_weights);
  j.at("c").get_to(m.c);
  m.iterations = j.value("iterations", std::size_t{0});
  m.converged = j.value("converged", false);
}

}  // namespace eskin
