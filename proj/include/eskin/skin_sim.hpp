// Seeded forward model of the capacitive e-skin and the acquisition-protocol
// generators that replay single- and two-indenter experiments against it.
//
// Per x-terminal i (y-terminals symmetric with the roles of x and y swapped):
//
//   c_i = baseline + stretch_gain_x * (lambda - 1)
//       + sum_contacts force_scale * (1 - exp(-F / force_sat))
//                      * neighbor_decay^|i - x_c|           (only if |i - x_c| <= neighbor_reach)
//                      * a_i(y_c)
//       + N(0, noise_sigma^2)
//
// a_i = 1 on the contact's own terminal (i == x_c) and
// 1 - spill_attenuation * (y_c - 1) / 9 on its neighbours: spill-over onto
// adjacent terminals weakens along their length, so the neighbour pattern
// tells where along the terminal a contact sits. With spill_attenuation = 0
// the x and y responses are separable.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "eskin/core.hpp"
#include "eskin/dataset_io.hpp"
#include "eskin/random.hpp"

namespace eskin {

struct SkinModel {
  double baseline = 1.0;
  double stretch_gain_x = 0.30;
  double stretch_gain_y = -0.20;
  double force_scale = 0.25;
  double force_sat = 2.0;
  double neighbor_decay = 0.4;
  int neighbor_reach = 2;
  double spill_attenuation = 0.6;
  double noise_sigma = 0.005;

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!(baseline > 0.0) || !finite(baseline)) throw ConfigError("baseline must be > 0");
    if (!finite(stretch_gain_x) || !finite(stretch_gain_y)) throw ConfigError("stretch gains must be finite");
    if (!(force_scale > 0.0) || !finite(force_scale)) throw ConfigError("force_scale must be > 0");
    if (!(force_sat > 0.0) || !finite(force_sat)) throw ConfigError("force_sat must be > 0");
    if (!(neighbor_decay > 0.0 && neighbor_decay < 1.0)) throw ConfigError("neighbor_decay must be in (0,1)");
    if (neighbor_reach < 0) throw ConfigError("neighbor_reach must be >= 0");
    if (!(spill_attenuation >= 0.0 && spill_attenuation < 1.0))
      throw ConfigError("spill_attenuation must be in [0,1)");
    if (!(noise_sigma >= 0.0) || !finite(noise_sigma)) throw ConfigError("noise_sigma must be >= 0");
  }

  // Saturating response to a force, before spread and attenuation.
  double force_increment(double newtons) const {
    return force_scale * (1.0 - std::exp(-newtons / force_sat));
  }

  // Weight of a contact at terminal distance d (0 outside the reach).
  double spread(int d) const {
    d = std::abs(d);
    return d <= neighbor_reach ? std::pow(neighbor_decay, d) : 0.0;
  }

  // Spill-over factor for a contact sitting at position `pos` (1..10) along a neighbouring terminal.
  double along(int pos) const {
    return 1.0 - spill_attenuation * (pos - 1) / double(kTerminalsPerAxis - 1);
  }

  friend bool operator==(const SkinModel&, const SkinModel&) = default;
};

inline void to_json(nlohmann::json& j, const SkinModel& m) {
  j = {{"baseline", m.baseline},
       {"stretch_gain_x", m.stretch_gain_x},
       {"stretch_gain_y", m.stretch_gain_y},
       {"force_scale", m.force_scale},
       {"force_sat", m.force_sat},
       {"neighbor_decay", m.neighbor_decay},
       {"neighbor_reach", m.neighbor_reach},
       {"spill_attenuation", m.spill_attenuation},
       {"noise_sigma", m.noise_sigma}};
}

inline void from_json(const nlohmann::json& j, SkinModel& m) {
  SkinModel d;
  m.baseline = j.value("baseline", d.baseline);
  m.stretch_gain_x = j.value("stretch_gain_x", d.stretch_gain_x);
  m.stretch_gain_y = j.value("stretch_gain_y", d.stretch_gain_y);
  m.force_scale = j.value("force_scale", d.force_scale);
  m.force_sat = j.value("force_sat", d.force_sat);
  m.neighbor_decay = j.value("neighbor_decay", d.neighbor_decay);
  m.neighbor_reach = j.value("neighbor_reach", d.neighbor_reach);
  m.spill_attenuation = j.value("spill_attenuation", d.spill_attenuation);
  m.noise_sigma = j.value("noise_sigma", d.noise_sigma);
}

struct Contact {
  NodeCoord node;
  ForceLevel force;
};

inline CapacitanceFrame simulate_frame(const SkinModel& model, StretchRatio stretch,
                                       std::span<const Contact> contacts, std::uint64_t rng_seed) {
  if (contacts.size() > 2)
    throw UnsupportedArityError("at most two simultaneous contacts are supported, got " +
                                std::to_string(contacts.size()));
  for (const auto& c : contacts) {
    if (!c.node.is_contact() || !c.node.valid()) throw ValidationError("contact node must be a grid node");
    if (!(c.force.newtons >= 0.0)) throw ValidationError("contact force must be >= 0");
  }
  if (contacts.size() == 2 && contacts[0].node == contacts[1].node)
    throw ValidationError("two contacts on the same node");

  CapacitanceFrame f;
  const double stretch_term = stretch.lambda - 1.0;
  for (int i = 0; i < kTerminalsPerAxis; ++i) {
    f.cx[i] = model.baseline + model.stretch_gain_x * stretch_term;
    f.cy[i] = model.baseline + model.stretch_gain_y * stretch_term;
  }
  for (const auto& c : contacts) {
    const double inc = model.force_increment(c.force.newtons);
    const double spill_x = inc * model.along(c.node.y);
    const double spill_y = inc * model.along(c.node.x);
    for (int i = 1; i <= kTerminalsPerAxis; ++i) {
      f.cx[i - 1] += (i == c.node.x ? inc : spill_x) * model.spread(i - c.node.x);
      f.cy[i - 1] += (i == c.node.y ? inc : spill_y) * model.spread(i - c.node.y);
    }
  }
  if (model.noise_sigma > 0.0) {
    Rng rng(rng_seed);
    std::normal_distribution<double> noise(0.0, model.noise_sigma);
    for (auto& v : f.cx) v += noise(rng);
    for (auto& v : f.cy) v += noise(rng);
  }
  return f;
}

inline CapacitanceFrame simulate_frame(const SkinModel& model, StretchRatio stretch,
                                       std::initializer_list<Contact> contacts, std::uint64_t rng_seed) {
  return simulate_frame(model, stretch, std::span<const Contact>(contacts.begin(), contacts.size()),
                        rng_seed);
}

struct SingleForceProtocol {
  std::vector<double> stretches{kProtocolStretches.begin(), kProtocolStretches.end()};
  std::vector<double> forces{kProtocolForces.begin(), kProtocolForces.end()};
  int reps_per_cell = 5;
  std::uint64_t seed = 2021;

  friend bool operator==(const SingleForceProtocol&, const SingleForceProtocol&) = default;
};

struct TwoForceProtocol {
  std::vector<int> x_axes{1, 6, 10};
  std::vector<int> y_axes{1, 6, 10};
  std::vector<double> forces{kProtocolForces.begin(), kProtocolForces.end()};
  int reps = 2;
  std::uint64_t seed = 2021;

  friend bool operator==(const TwoForceProtocol&, const TwoForceProtocol&) = default;
};

inline void to_json(nlohmann::json& j, const SingleForceProtocol& p) {
  j = {{"stretches", p.stretches}, {"forces", p.forces}, {"reps_per_cell", p.reps_per_cell}, {"seed", p.seed}};
}
inline void from_json(const nlohmann::json& j, SingleForceProtocol& p) {
  SingleForceProtocol d;
  p.stretches = j.value("stretches", d.stretches);
  p.forces = j.value("forces", d.forces);
  p.reps_per_cell = j.value("reps_per_cell", d.reps_per_cell);
  p.seed = j.value("seed", d.seed);
}
inline void to_json(nlohmann::json& j, const TwoForceProtocol& p) {
  j = {{"x_axes", p.x_axes}, {"y_axes", p.y_axes}, {"forces", p.forces}, {"reps", p.reps}, {"seed", p.seed}};
}
inline void from_json(const nlohmann::json& j, TwoForceProtocol& p) {
  TwoForceProtocol d;
  p.x_axes = j.value("x_axes", d.x_axes);
  p.y_axes = j.value("y_axes", d.y_axes);
  p.forces = j.value("forces", d.forces);
  p.reps = j.value("reps", d.reps);
  p.seed = j.value("seed", d.seed);
}

// Dataset of |stretches| * 101 * |forces| * reps samples, ordered stretch-major,
// then node id, force, rep. Cells without force (node 0, or force level 0) are
// labelled node 0 with force 0.
inline Dataset generate_single_force_dataset(const SkinModel& model, const SingleForceProtocol& p) {
  model.validate();
  if (p.reps_per_cell < 1) throw ProtocolError("reps_per_cell must be >= 1");
  if (p.stretches.empty()) throw ProtocolError("protocol needs at least one stretch level");
  if (std::find(p.forces.begin(), p.forces.end(), 0.0) == p.forces.end())
    throw ProtocolError("protocol force levels must include 0");
  for (double f : p.forces) ForceLevel::make(f);
  std::vector<StretchRatio> stretches;
  for (double s : p.stretches) stretches.push_back(StretchRatio::make(s));

  std::vector<SingleContactSample> out;
  out.reserve(stretches.size() * (kNodeCount + 1) * p.forces.size() * p.reps_per_cell);
  std::uint64_t cell = 0;
  for (const auto& lambda : stretches) {
    for (int id = 0; id <= kNodeCount; ++id) {
      const NodeCoord node = node_from_id(id);
      for (double force : p.forces) {
        const bool contact = node.is_contact() && force > 0.0;
        for (int rep = 0; rep < p.reps_per_cell; ++rep, ++cell) {
          const auto seed = derive_seed(p.seed, cell);
          SingleContactSample s;
          s.stretch = lambda;
          if (contact) {
            const Contact c{node, {force}};
            s.frame = simulate_frame(model, lambda, {c}, seed);
            s.node = node;
            s.force = {force};
          } else {
            s.frame = simulate_frame(model, lambda, std::span<const Contact>{}, seed);
          }
          out.push_back(s);
        }
      }
    }
  }
  nlohmann::json cfg{{"model", model}, {"protocol", p}};
  return make_dataset(std::move(out), DatasetMeta{Schema::SingleContact, p.seed, digest_hex(cfg.dump()), kSchemaVersion});
}

inline std::vector<NodeCoord> protocol_nodes(const TwoForceProtocol& p) {
  std::vector<NodeCoord> nodes;
  for (int y : p.y_axes)
    for (int x : p.x_axes) nodes.push_back(NodeCoord::make(x, y));
  std::sort(nodes.begin(), nodes.end(), [](NodeCoord a, NodeCoord b) { return node_id(a) < node_id(b); });
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

// All unordered pairs of distinct grid nodes x all (f1, f2) pairs of non-zero
// levels x reps, at lambda = 1. The contact with the smaller node id is
// recorded first.
inline Dataset generate_two_force_dataset(const SkinModel& model, const TwoForceProtocol& p) {
  model.validate();
  if (p.reps < 1) throw ProtocolError("reps must be >= 1");
  const auto nodes = protocol_nodes(p);
  if (nodes.size() < 2) throw ProtocolError("two-force protocol needs at least two grid nodes");
  std::vector<double> levels;
  for (double f : p.forces) {
    ForceLevel::make(f);
    if (f > 0.0) levels.push_back(f);
  }
  if (levels.empty()) throw ProtocolError("two-force protocol needs a non-zero force level");

  const StretchRatio rest{1.0};
  std::vector<TwoContactSample> out;
  std::uint64_t cell = 0;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      for (double f1 : levels) {
        for (double f2 : levels) {
          for (int rep = 0; rep < p.reps; ++rep, ++cell) {
            const Contact cs[2] = {{nodes[a], {f1}}, {nodes[b], {f2}}};
            TwoContactSample s;
            s.frame = simulate_frame(model, rest, cs, derive_seed(p.seed, cell));
            s.node1 = nodes[a];
            s.force1 = {f1};
            s.node2 = nodes[b];
            s.force2 = {f2};
            out.push_back(s);
          }
        }
      }
    }
  }
  nlohmann::json cfg{{"model", model}, {"protocol", p}};
  return make_dataset(std::move(out), DatasetMeta{Schema::TwoContact, p.seed, digest_hex(cfg.dump()), kSchemaVersion});
}

}  // namespace eskin
