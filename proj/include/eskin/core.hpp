// Domain types of the capacitive e-skin: terminals, nodes, frames, labels and
// datasets. All types are immutable value objects once constructed.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eskin/errors.hpp"

namespace eskin {

inline constexpr int kTerminalsPerAxis = 10;
inline constexpr int kFeatureCount = 2 * kTerminalsPerAxis;
inline constexpr int kNodeCount = kTerminalsPerAxis * kTerminalsPerAxis;  // excluding node 0

// Gravitational acceleration implied by the indenter masses (0.132 kg -> 1.2936 N).
inline constexpr double kGravity = 9.8;

inline constexpr double force_from_mass(double kg) { return kg * kGravity; }

// Acquisition protocol levels.
inline constexpr std::array<double, 3> kProtocolStretches{1.0, 1.07921, 1.15842};
inline constexpr std::array<double, 4> kProtocolForces{0.0, 1.2936, 3.2536, 5.2136};

enum class Axis { X, Y };

struct TerminalId {
  Axis axis;
  int index;  // 1..10

  static TerminalId make(Axis axis, int index) {
    if (index < 1 || index > kTerminalsPerAxis)
      throw ValidationError("terminal index out of range: " + std::to_string(index));
    return {axis, index};
  }
  // Position in the 20-wide feature vector (cx1..cx10, cy1..cy10).
  int feature_index() const { return (axis == Axis::X ? 0 : kTerminalsPerAxis) + index - 1; }

  friend bool operator==(const TerminalId&, const TerminalId&) = default;
};

inline std::vector<TerminalId> all_terminals() {
  std::vector<TerminalId> out;
  out.reserve(kFeatureCount);
  for (Axis a : {Axis::X, Axis::Y})
    for (int i = 1; i <= kTerminalsPerAxis; ++i) out.push_back({a, i});
  return out;
}

// Intersection of x-terminal `x` and y-terminal `y`; (0,0) is "no contact".
struct NodeCoord {
  int x = 0;
  int y = 0;

  static constexpr NodeCoord none() { return {0, 0}; }
  static NodeCoord make(int x, int y) {
    NodeCoord n{x, y};
    if (!n.valid())
      throw ValidationError("invalid node coordinate (" + std::to_string(x) + "," +
                            std::to_string(y) + ")");
    return n;
  }

  constexpr bool is_contact() const { return x != 0 || y != 0; }
  constexpr bool valid() const {
    if (x == 0 && y == 0) return true;
    return x >= 1 && x <= kTerminalsPerAxis && y >= 1 && y <= kTerminalsPerAxis;
  }

  friend bool operator==(const NodeCoord&, const NodeCoord&) = default;
};

// Row-major linearisation: 0 for no contact, else (y-1)*10 + x.
constexpr int node_id(NodeCoord n) {
  return n.is_contact() ? (n.y - 1) * kTerminalsPerAxis + n.x : 0;
}

inline NodeCoord node_from_id(int id) {
  if (id < 0 || id > kNodeCount) throw ValidationError("node id out of range: " + std::to_string(id));
  if (id == 0) return NodeCoord::none();
  return {(id - 1) % kTerminalsPerAxis + 1, (id - 1) / kTerminalsPerAxis + 1};
}

using FeatureVector = std::array<double, kFeatureCount>;

struct CapacitanceFrame {
  std::array<double, kTerminalsPerAxis> cx{};
  std::array<double, kTerminalsPerAxis> cy{};

  FeatureVector features() const {
    FeatureVector f{};
    for (int i = 0; i < kTerminalsPerAxis; ++i) {
      f[i] = cx[i];
      f[kTerminalsPerAxis + i] = cy[i];
    }
    return f;
  }

  static CapacitanceFrame from_features(std::span<const double> f) {
    if (f.size() != static_cast<std::size_t>(kFeatureCount))
      throw DimensionError("frame needs 20 features, got " + std::to_string(f.size()));
    CapacitanceFrame c;
    for (int i = 0; i < kTerminalsPerAxis; ++i) {
      c.cx[i] = f[i];
      c.cy[i] = f[kTerminalsPerAxis + i];
    }
    return c;
  }

  double at(TerminalId t) const { return t.axis == Axis::X ? cx[t.index - 1] : cy[t.index - 1]; }

  void validate() const {
    for (double v : features())
      if (!std::isfinite(v) || v <= 0.0)
        throw ValidationError("capacitance values must be finite and strictly positive");
  }

  friend bool operator==(const CapacitanceFrame&, const CapacitanceFrame&) = default;
};

struct StretchRatio {
  double lambda = 1.0;

  static StretchRatio make(double lambda) {
    if (!std::isfinite(lambda) || lambda < 1.0)
      throw ValidationError("stretch ratio must be >= 1, got " + std::to_string(lambda));
    return {lambda};
  }
  static StretchRatio from_extension(double rest_length, double extension) {
    return make((rest_length + extension) / rest_length);
  }
  friend bool operator==(const StretchRatio&, const StretchRatio&) = default;
};

struct ForceLevel {
  double newtons = 0.0;

  static ForceLevel make(double n) {
    if (!std::isfinite(n) || n < 0.0)
      throw ValidationError("force must be >= 0, got " + std::to_string(n));
    return {n};
  }
  friend bool operator==(const ForceLevel&, const ForceLevel&) = default;
};

struct SingleContactSample {
  CapacitanceFrame frame;
  ForceLevel force;
  NodeCoord node;
  StretchRatio stretch;

  static constexpr int kWidth = kFeatureCount + 4;

  void validate() const {
    frame.validate();
    if (!node.valid()) throw ValidationError("invalid node label");
    if (force.newtons < 0.0) throw ValidationError("negative force label");
    if (stretch.lambda < 1.0) throw ValidationError("stretch label below 1");
    if ((force.newtons == 0.0) != !node.is_contact())
      throw ValidationError("force is 0 exactly when node is node 0");
  }
};

struct TwoContactSample {
  CapacitanceFrame frame;
  ForceLevel force1;
  NodeCoord node1;
  ForceLevel force2;
  NodeCoord node2;

  static constexpr int kWidth = kFeatureCount + 6;

  void validate() const {
    frame.validate();
    if (!node1.valid() || !node2.valid()) throw ValidationError("invalid node label");
    if (force1.newtons < 0.0 || force2.newtons < 0.0) throw ValidationError("negative force label");
    if (node1 == node2 && node1.is_contact())
      throw ValidationError("two-contact sample has both contacts on one node");
  }
};

enum class Schema { SingleContact, TwoContact };

inline std::string_view schema_name(Schema s) {
  return s == Schema::SingleContact ? "single-contact" : "two-contact";
}

inline Schema schema_from_name(std::string_view name) {
  if (name == "single-contact") return Schema::SingleContact;
  if (name == "two-contact") return Schema::TwoContact;
  throw SchemaError("unknown schema '" + std::string(name) + "'");
}

inline constexpr int kSchemaVersion = 1;

struct DatasetMeta {
  Schema schema = Schema::SingleContact;
  std::uint64_t seed = 0;
  std::string generator_config_digest;
  int schema_version = kSchemaVersion;

  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

using Sample = std::variant<SingleContactSample, TwoContactSample>;

struct Dataset {
  DatasetMeta meta;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  // Throws SchemaError if any sample disagrees with meta.schema.
  void check_homogeneous() const {
    const std::size_t want = meta.schema == Schema::SingleContact ? 0 : 1;
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (samples[i].index() != want)
        throw SchemaError("sample " + std::to_string(i) + " does not match dataset schema " +
                          std::string(schema_name(meta.schema)));
  }
};

inline std::vector<SingleContactSample> single_samples(const Dataset& ds) {
  if (ds.meta.schema != Schema::SingleContact) throw SchemaError("expected a single-contact dataset");
  ds.check_homogeneous();
  std::vector<SingleContactSample> out;
  out.reserve(ds.size());
  for (const auto& s : ds.samples) out.push_back(std::get<SingleContactSample>(s));
  return out;
}

inline std::vector<TwoContactSample> two_samples(const Dataset& ds) {
  if (ds.meta.schema != Schema::TwoContact) throw SchemaError("expected a two-contact dataset");
  ds.check_homogeneous();
  std::vector<TwoContactSample> out;
  out.reserve(ds.size());
  for (const auto& s : ds.samples) out.push_back(std::get<TwoContactSample>(s));
  return out;
}

template <class SampleT>
Dataset make_dataset(std::vector<SampleT> samples, DatasetMeta meta) {
  meta.schema = std::is_same_v<SampleT, SingleContactSample> ? Schema::SingleContact : Schema::TwoContact;
  Dataset ds{std::move(meta), {}};
  ds.samples.reserve(samples.size());
  for (auto& s : samples) ds.samples.emplace_back(std::move(s));
  return ds;
}

}  // namespace eskin
