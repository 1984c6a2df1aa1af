// Small hand-built and seeded datasets for the forest and SVM checks.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "eskin/linalg.hpp"

namespace eskin::check {

struct ClassFixture {
  std::string name;
  Matrix x;
  std::vector<int> y;
  int n_classes = 2;
};

// Every fixture has at most 20 samples.
inline std::vector<ClassFixture> forest_fixtures() {
  std::vector<ClassFixture> out;
  out.push_back({"four-point", Matrix::from_rows({{0}, {1}, {10}, {11}}), {0, 0, 1, 1}, 2});
  out.push_back({"threshold-1d", Matrix::from_rows({{0.1}, {0.4}, {0.35}, {0.8}, {0.9}, {0.7}}), {0, 0, 0, 1, 1, 1}, 2});
  out.push_back({"xor", Matrix::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}}), {0, 1, 1, 0}, 2});
  out.push_back({"ties", Matrix::from_rows({{1, 5}, {1, 5}, {2, 5}, {2, 6}, {3, 6}, {3, 6}}), {0, 0, 1, 1, 0, 1}, 2});
  out.push_back({"three-class",
                 Matrix::from_rows({{0, 0}, {0.2, 1}, {1, 0.1}, {5, 5}, {5.5, 4}, {4, 6}, {9, 0}, {8, 1}, {9.5, 0.5}}),
                 {0, 0, 0, 1, 1, 1, 2, 2, 2}, 3});
  out.push_back({"constant-feature", Matrix::from_rows({{7, 1}, {7, 2}, {7, 3}, {7, 4}, {7, 5}}), {0, 1, 0, 1, 1}, 2});
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> coarse(0, 4);
  for (int k = 0; k < 24; ++k) {
    const int n = 2 + int(rng() % 19);
    const int d = 1 + int(rng() % 4);
    const int c = 2 + int(rng() % 3);
    ClassFixture f{"seeded-" + std::to_string(k), Matrix(n, d), std::vector<int>(n), c};
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) f.x(i, j) = k % 3 == 0 ? double(coarse(rng)) : u(rng);
      f.y[i] = int(rng() % c);
    }
    out.push_back(std::move(f));
  }
  return out;
}

struct BinaryFixture {
  std::string name;
  Matrix x;
  std::vector<int> y;  // -1 / +1
  double c = 1.0;
  double gamma = 0.0;
  bool standardize = true;
};

inline std::vector<BinaryFixture> separable_fixtures() {
  std::vector<BinaryFixture> out;
  out.push_back({"clusters-1d", Matrix::from_rows({{-2.0}, {-1.9}, {1.9}, {2.0}}), {-1, -1, 1, 1}, 1.0, 0.0, true});
  out.push_back({"xor-4", Matrix::from_rows({{0, 0}, {1, 1}, {0, 1}, {1, 0}}), {-1, -1, 1, 1}, 10.0, 1.0, false});
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 0.3);
  BinaryFixture blobs{"blobs-2d", Matrix(), {}, 10.0, 0.0, true};
  for (int i = 0; i < 30; ++i) {
    const bool pos = i % 3 == 0;
    const double cx = pos ? 2.0 : -2.0;
    blobs.x.append_row(std::vector<double>{cx + g(rng), 0.5 * cx + g(rng)});
    blobs.y.push_back(pos ? 1 : -1);
  }
  out.push_back(std::move(blobs));
  BinaryFixture rings{"rings-2d", Matrix(), {}, 10.0, 2.0, false};
  for (int i = 0; i < 24; ++i) {
    const double t = 2.0 * 3.141592653589793 * i / 24.0;
    const bool pos = i % 2 == 0;
    const double r = pos ? 0.5 : 2.0;
    rings.x.append_row(std::vector<double>{r * std::cos(t), r * std::sin(t)});
    rings.y.push_back(pos ? 1 : -1);
  }
  out.push_back(std::move(rings));
  return out;
}

}  // namespace eskin::check
