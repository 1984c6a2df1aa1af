#pragma once

#include <cmath>
#include <vector>

#include <json.hpp>

#include "eskin/linalg.hpp"

namespace eskin {

// Per-column zero-mean / unit-variance scaling. Statistics come from the
// training rows only; constant columns keep scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& x) {
    Standardizer s;
    const std::size_t n = x.rows(), d = x.cols();
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    if (n == 0) return s;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) s.mean[j] += x(i, j);
    for (auto& m : s.mean) m /= double(n);
    std::vector<double> var(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const double c = x(i, j) - s.mean[j];
        var[j] += c * c;
      }
    for (std::size_t j = 0; j < d; ++j) {
      const double sd = std::sqrt(var[j] / double(n));
      s.scale[j] = sd > 0.0 ? sd : 1.0;
    }
    return s;
  }

  static Standardizer identity(std::size_t d) { return {std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)}; }

  std::size_t dim() const { return mean.size(); }

  void apply_row(std::span<const double> in, std::span<double> out) const {
    for (std::size_t j = 0; j < in.size(); ++j) out[j] = (in[j] - mean[j]) / scale[j];
  }

  Matrix transform(const Matrix& x) const {
    if (x.cols() != dim() && x.rows() > 0) throw DimensionError("standardizer width mismatch");
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) apply_row(x.row(i), out.row(i));
    return out;
  }

  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

inline void to_json(nlohmann::json& j, const Standardizer& s) { j = {{"mean", s.mean}, {"scale", s.scale}}; }
inline void from_json(const nlohmann::json& j, Standardizer& s) {
  j.at("mean").get_to(s.mean);
  j.at("scale").get_to(s.scale);
}

inline void to_json(nlohmann::json& j, const Matrix& m) {
  j = {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}
inline void from_json(const nlohmann::json& j, Matrix& m) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) throw ParseError("matrix payload size mismatch");
  m = Matrix(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = data[i * cols + c];
}

}  // namespace eskin
