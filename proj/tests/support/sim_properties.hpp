// Randomised simulator property checks shared by the unit suite and the
// acceptance runner. Each check returns the number of parameterisations it
// exercised and the first failure it saw (empty on success).
#pragma once

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "eskin/skin_sim.hpp"

namespace eskin::check {

struct PropertyResult {
  int cases = 0;
  std::string failure;
  bool ok() const { return failure.empty(); }
};

inline SkinModel random_model(std::mt19937_64& rng, bool noisy = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SkinModel m;
  m.baseline = 0.5 + 1.5 * u(rng);
  m.stretch_gain_x = -0.5 + u(rng);
  m.stretch_gain_y = -0.5 + u(rng);
  m.force_scale = 0.05 + 0.95 * u(rng);
  m.force_sat = 0.5 + 4.5 * u(rng);
  m.neighbor_decay = 0.05 + 0.9 * u(rng);
  m.neighbor_reach = std::uniform_int_distribution<int>(0, 4)(rng);
  m.spill_attenuation = 0.95 * u(rng);
  m.noise_sigma = noisy ? 0.02 * u(rng) : 0.0;
  return m;
}

inline NodeCoord random_node(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(1, 10);
  return {d(rng), d(rng)};
}

inline std::string describe(const SkinModel& m) {
  nlohmann::json j = m;
  return j.dump();
}

inline CapacitanceFrame rest_frame(const SkinModel& m, double lambda) {
  return simulate_frame(m, StretchRatio{lambda}, std::span<const Contact>{}, 0);
}

inline PropertyResult check_determinism(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PropertyResult r;
  for (int k = 0; k < n; ++k, ++r.cases) {
    const auto m = random_model(rng, true);
    const Contact pair[2] = {{random_node(rng), {3.0 * std::generate_canonical<double, 53>(rng)}},
                             {random_node(rng), {1.0}}};
    const std::size_t count = pair[1].node == pair[0].node ? 1 : 2;
    const std::uint64_t s = rng();
    const auto a = simulate_frame(m, StretchRatio{1.05}, std::span<const Contact>(pair, count), s);
    const auto b = simulate_frame(m, StretchRatio{1.05}, std::span<const Contact>(pair, count), s);
    if (!(a == b)) {
      r.failure = "frames differ for identical inputs: " + describe(m);
      return r;
    }
  }
  SkinModel m;
  SingleForceProtocol p;
  p.reps_per_cell = 1;
  const auto d1 = generate_single_force_dataset(m, p);
  const auto d2 = generate_single_force_dataset(m, p);
  std::ostringstream o1, o2;
  write_dataset(d1, o1);
  write_dataset(d2, o2);
  if (o1.str() != o2.str()) r.failure = "generated datasets differ for identical protocol";
  return r;
}

inline PropertyResult check_stretch_linearity(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lam(1.0001, 1.5);
  PropertyResult r;
  for (int k = 0; k < n; ++k, ++r.cases) {
    const auto m = random_model(rng);
    const double l1 = lam(rng), l2 = lam(rng);
    const auto f1 = rest_frame(m, l1), f2 = rest_frame(m, l2), f0 = rest_frame(m, 1.0);
    for (int i = 0; i < 10; ++i) {
      if (f0.cx[i] != m.baseline || f0.cy[i] != m.baseline) {
        r.failure = "rest frame differs from baseline: " + describe(m);
        return r;
      }
      const double sx1 = (f1.cx[i] - m.baseline) / (l1 - 1.0), sx2 = (f2.cx[i] - m.baseline) / (l2 - 1.0);
      const double sy1 = (f1.cy[i] - m.baseline) / (l1 - 1.0), sy2 = (f2.cy[i] - m.baseline) / (l2 - 1.0);
      if (std::abs(sx1 - sx2) > 1e-9 || std::abs(sy1 - sy2) > 1e-9 || std::abs(sx1 - m.stretch_gain_x) > 1e-9 ||
          std::abs(sy1 - m.stretch_gain_y) > 1e-9) {
        r.failure = "stretch response not proportional to (lambda-1): " + describe(m);
        return r;
      }
    }
  }
  return r;
}

inline PropertyResult check_force_monotonicity(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> force(0.01, 8.0);
  PropertyResult r;
  for (int k = 0; k < n; ++k, ++r.cases) {
    const auto m = random_model(rng);
    const auto node = random_node(rng);
    double fa = force(rng), fb = force(rng);
    if (fa > fb) std::swap(fa, fb);
    if (fb - fa < 1e-3) fb = fa + 0.5;
    const double lambda = 1.0 + 0.2 * std::generate_canonical<double, 53>(rng);
    const auto a = simulate_frame(m, StretchRatio{lambda}, {Contact{node, {fa}}}, 0);
    const auto b = simulate_frame(m, StretchRatio{lambda}, {Contact{node, {fb}}}, 0);
    const auto rest = rest_frame(m, lambda);
    for (int i = 1; i <= 10; ++i) {
      const bool on_x = std::abs(i - node.x) <= m.neighbor_reach;
      const bool on_y = std::abs(i - node.y) <= m.neighbor_reach;
      if (on_x && !(b.cx[i - 1] > a.cx[i - 1])) {
        r.failure = "cx" + std::to_string(i) + " not increasing in force: " + describe(m);
        return r;
      }
      if (on_y && !(b.cy[i - 1] > a.cy[i - 1])) {
        r.failure = "cy" + std::to_string(i) + " not increasing in force: " + describe(m);
        return r;
      }
      if (b.cx[i - 1] - rest.cx[i - 1] >= m.force_scale || b.cy[i - 1] - rest.cy[i - 1] >= m.force_scale) {
        r.failure = "increment exceeds saturation amplitude: " + describe(m);
        return r;
      }
    }
    const auto huge = simulate_frame(m, StretchRatio{lambda}, {Contact{node, {80.0 * m.force_sat}}}, 0);
    if (std::abs(huge.cx[node.x - 1] - rest.cx[node.x - 1] - m.force_scale) > 1e-9 * m.force_scale) {
      r.failure = "increment does not saturate toward force_scale: " + describe(m);
      return r;
    }
  }
  return r;
}

inline PropertyResult check_locality(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PropertyResult r;
  for (int k = 0; k < n; ++k, ++r.cases) {
    const auto m = random_model(rng);
    const auto node = random_node(rng);
    const double lambda = 1.0 + 0.2 * std::generate_canonical<double, 53>(rng);
    const auto f = simulate_frame(m, StretchRatio{lambda}, {Contact{node, {2.5}}}, 0);
    const auto rest = rest_frame(m, lambda);
    for (int i = 1; i <= 10; ++i) {
      if (std::abs(i - node.x) > m.neighbor_reach && f.cx[i - 1] != rest.cx[i - 1]) {
        r.failure = "cx" + std::to_string(i) + " changed outside reach: " + describe(m);
        return r;
      }
      if (std::abs(i - node.y) > m.neighbor_reach && f.cy[i - 1] != rest.cy[i - 1]) {
        r.failure = "cy" + std::to_string(i) + " changed outside reach: " + describe(m);
        return r;
      }
    }
  }
  return r;
}

inline PropertyResult check_superposition(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> force(0.0, 6.0);
  PropertyResult r;
  for (int k = 0; k < n; ++k, ++r.cases) {
    const auto m = random_model(rng);
    const auto na = random_node(rng);
    auto nb = random_node(rng);
    while (nb == na) nb = random_node(rng);
    const Contact a{na, {force(rng)}}, b{nb, {force(rng)}};
    const double lambda = 1.0 + 0.2 * std::generate_canonical<double, 53>(rng);
    const StretchRatio s{lambda};
    const auto both = simulate_frame(m, s, {a, b}, 0).features();
    const auto fa = simulate_frame(m, s, {a}, 0).features();
    const auto fb = simulate_frame(m, s, {b}, 0).features();
    const auto rest = rest_frame(m, lambda).features();
    for (int i = 0; i < kFeatureCount; ++i) {
      if (std::abs((both[i] - rest[i]) - ((fa[i] - rest[i]) + (fb[i] - rest[i]))) > 1e-12) {
        r.failure = "feature " + std::to_string(i) + " not additive: " + describe(m);
        return r;
      }
    }
  }
  return r;
}

}  // namespace eskin::check
