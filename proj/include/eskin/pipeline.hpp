// The decoupling pipeline: stretch by linear regression, contact detection by
// RBF-SVM, contact location by a column and a row random forest, and contact
// force by Gaussian-process regression. A two-contact variant reuses the same
// learners with one forest per coordinate and one GP per force.
#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "eskin/core.hpp"
#include "eskin/learners/forest.hpp"
#include "eskin/learners/gp.hpp"
#include "eskin/learners/linear.hpp"
#include "eskin/learners/standardizer.hpp"
#include "eskin/learners/svm.hpp"

namespace eskin {

inline constexpr int kPipelineSchemaVersion = 1;

struct PipelineConfig {
  GpConfig gp;
  SvmConfig svm;
  ForestConfig forest;
  // Single-contact training demands every node id 0..100 when set.
  bool require_full_grid = true;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

inline void to_json(nlohmann::json& j, const PipelineConfig& c) {
  j = {{"gp", c.gp}, {"svm", c.svm}, {"forest", c.forest}, {"require_full_grid", c.require_full_grid}};
}
inline void from_json(const nlohmann::json& j, PipelineConfig& c) {
  PipelineConfig d;
  c.gp = j.value("gp", d.gp);
  c.svm = j.value("svm", d.svm);
  c.forest = j.value("forest", d.forest);
  c.require_full_grid = j.value("require_full_grid", d.require_full_grid);
}

// Stretch regressor: OLS, or a constant when every training stretch is equal.
struct StretchModel {
  LinearModel ols;
  bool constant = false;

  double predict(std::span<const double> features) const {
    return constant ? ols.intercept : dot(ols.weights, features) + ols.intercept;
  }
};

struct TrainedPipeline {
  StretchModel stretch_model;
  SvmModel detector;
  ForestModel col_clf;  // class k <-> x-terminal k+1
  ForestModel row_clf;  // class k <-> y-terminal k+1
  GpModel force_model;
  Standardizer preprocessing;
  PipelineConfig config;
};

struct ContactEstimate {
  StretchRatio stretch;
  bool contact_detected = false;
  NodeCoord node;
  ForceLevel force;
};

inline Matrix feature_matrix(std::span<const CapacitanceFrame> frames) {
  Matrix x(frames.size(), kFeatureCount);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto f = frames[i].features();
    std::copy(f.begin(), f.end(), x.row(i).begin());
  }
  return x;
}

template <class SampleT>
Matrix feature_matrix(const std::vector<SampleT>& samples) {
  Matrix x(samples.size(), kFeatureCount);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto f = samples[i].frame.features();
    std::copy(f.begin(), f.end(), x.row(i).begin());
  }
  return x;
}

namespace pipeline_detail {

inline std::string list_nodes(const std::vector<int>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ",";
    if (i == 20 && ids.size() > 21) {
      s += "... (" + std::to_string(ids.size()) + " total)";
      break;
    }
    s += std::to_string(ids[i]);
  }
  return s;
}

inline StretchModel fit_stretch(const Matrix& x, const std::vector<double>& lambda) {
  const auto [lo, hi] = std::minmax_element(lambda.begin(), lambda.end());
  if (*lo == *hi) return {LinearModel{std::vector<double>(x.cols(), 0.0), *lo}, true};
  return {ols_fit(x, lambda), false};
}

}  // namespace pipeline_detail

inline void check_single_coverage(const std::vector<SingleContactSample>& train, bool require_full_grid) {
  std::set<int> present;
  for (const auto& s : train) present.insert(node_id(s.node));
  std::vector<int> missing;
  if (require_full_grid) {
    for (int id = 0; id <= kNodeCount; ++id)
      if (!present.count(id)) missing.push_back(id);
  } else {
    if (!present.count(0)) missing.push_back(0);
  }
  if (!missing.empty())
    throw CoverageError("training data lacks node classes: " + pipeline_detail::list_nodes(missing));
  if (present.size() < 2)
    throw CoverageError("training data has no contact-positive samples");
}

inline TrainedPipeline train_single(const std::vector<SingleContactSample>& train, const PipelineConfig& cfg) {
  check_single_coverage(train, cfg.require_full_grid);
  TrainedPipeline p;
  p.config = cfg;
  const Matrix raw = feature_matrix(train);
  p.preprocessing = Standardizer::fit(raw);
  const Matrix xs = p.preprocessing.transform(raw);

  std::vector<double> lambda;
  std::vector<int> detect;
  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i < train.size(); ++i) {
    lambda.push_back(train[i].stretch.lambda);
    const bool contact = train[i].node.is_contact();
    detect.push_back(contact ? 1 : -1);
    if (contact) positive.push_back(i);
  }
  p.stretch_model = pipeline_detail::fit_stretch(raw, lambda);

  auto svm_cfg = cfg.svm;
  svm_cfg.standardize = false;
  p.detector = svm_fit(xs, detect, svm_cfg);

  const Matrix xp = xs.select_rows(positive);
  std::vector<int> cols, rows;
  std::vector<double> force;
  for (auto i : positive) {
    cols.push_back(train[i].node.x - 1);
    rows.push_back(train[i].node.y - 1);
    force.push_back(train[i].force.newtons);
  }
  auto col_cfg = cfg.forest;
  auto row_cfg = cfg.forest;
  col_cfg.seed = derive_seed(cfg.forest.seed, 1);
  row_cfg.seed = derive_seed(cfg.forest.seed, 2);
  p.col_clf = forest_fit(xp, cols, kTerminalsPerAxis, col_cfg);
  p.row_clf = forest_fit(xp, rows, kTerminalsPerAxis, row_cfg);

  auto gp_cfg = cfg.gp;
  gp_cfg.standardize = false;
  p.force_model = gp_fit(xp, force, gp_cfg);
  return p;
}

// Component outputs for a batch, without detection gating. Used by evaluation.
struct SingleBatchOutputs {
  std::vector<double> stretch;
  std::vector<int> detected;  // 0/1
  std::vector<int> col;       // x-terminal 1..10
  std::vector<int> row;       // y-terminal 1..10
  std::vector<double> force;  // clamped >= 0
};

inline SingleBatchOutputs run_components(const TrainedPipeline& p, const Matrix& raw) {
  if (raw.rows() > 0 && raw.cols() != std::size_t(kFeatureCount))
    throw DimensionError("pipeline expects 20 features per frame");
  SingleBatchOutputs o;
  for (std::size_t i = 0; i < raw.rows(); ++i) o.stretch.push_back(p.stretch_model.predict(raw.row(i)));
  const Matrix xs = p.preprocessing.transform(raw);
  for (int l : svm_predict(p.detector, xs)) o.detected.push_back(l > 0 ? 1 : 0);
  for (int c : forest_predict(p.col_clf, xs).labels) o.col.push_back(c + 1);
  for (int r : forest_predict(p.row_clf, xs).labels) o.row.push_back(r + 1);
  for (double f : gp_predict_mean(p.force_model, xs)) o.force.push_back(std::max(f, 0.0));
  return o;
}

// Stretch is always reported; location and force only when a contact is detected.
inline ContactEstimate infer_single(const TrainedPipeline& p, const CapacitanceFrame& frame) {
  const auto feats = frame.features();
  ContactEstimate e;
  e.stretch = {std::max(1.0, p.stretch_model.predict(feats))};
  Matrix xs(1, kFeatureCount);
  p.preprocessing.apply_row(feats, xs.row(0));
  e.contact_detected = svm_predict(p.detector, xs)[0] > 0;
  if (!e.contact_detected) return e;
  const int x = forest_predict(p.col_clf, xs).labels[0] + 1;
  const int y = forest_predict(p.row_clf, xs).labels[0] + 1;
  e.node = {x, y};
  e.force = {std::max(0.0, gp_predict_mean(p.force_model, xs)[0])};
  return e;
}

// ---------------------------------------------------------------------------
// Two simultaneous contacts.

struct TwoContactModels {
  Standardizer preprocessing;
  std::vector<int> x_axes;  // class k <-> x_axes[k]
  std::vector<int> y_axes;
  ForestModel x1_clf, y1_clf, x2_clf, y2_clf;
  GpModel force1_model, force2_model;
  PipelineConfig config;
};

struct TwoContactEstimate {
  struct Entry {
    NodeCoord node;
    ForceLevel force;
  };
  std::vector<Entry> contacts;  // <= 2, ordered by node id
};

namespace pipeline_detail {

inline int axis_class(const std::vector<int>& axes, int v) {
  auto it = std::find(axes.begin(), axes.end(), v);
  if (it == axes.end()) throw ValidationError("coordinate " + std::to_string(v) + " is not a protocol axis value");
  return int(it - axes.begin());
}

}  // namespace pipeline_detail

// Axis classes default to the coordinates seen in the data.
inline TwoContactModels train_two(const std::vector<TwoContactSample>& train, const PipelineConfig& cfg,
                                  std::vector<int> x_axes = {}, std::vector<int> y_axes = {}) {
  if (train.empty()) throw CoverageError("two-contact training set is empty");
  if (x_axes.empty() || y_axes.empty()) {
    std::set<int> xs, ys;
    for (const auto& s : train) {
      xs.insert({s.node1.x, s.node2.x});
      ys.insert({s.node1.y, s.node2.y});
    }
    if (x_axes.empty()) x_axes.assign(xs.begin(), xs.end());
    if (y_axes.empty()) y_axes.assign(ys.begin(), ys.end());
  }
  std::vector<int> x1, y1, x2, y2;
  std::vector<double> f1, f2;
  for (const auto& s : train) {
    x1.push_back(pipeline_detail::axis_class(x_axes, s.node1.x));
    y1.push_back(pipeline_detail::axis_class(y_axes, s.node1.y));
    x2.push_back(pipeline_detail::axis_class(x_axes, s.node2.x));
    y2.push_back(pipeline_detail::axis_class(y_axes, s.node2.y));
    f1.push_back(s.force1.newtons);
    f2.push_back(s.force2.newtons);
  }
  auto check = [&](const std::vector<int>& labels, const std::vector<int>& axes, const char* name) {
    std::vector<int> missing;
    for (std::size_t k = 0; k < axes.size(); ++k)
      if (std::find(labels.begin(), labels.end(), int(k)) == labels.end()) missing.push_back(axes[k]);
    if (!missing.empty())
      throw CoverageError(std::string("two-contact training data lacks ") + name +
                          " classes: " + pipeline_detail::list_nodes(missing));
  };
  check(x1, x_axes, "x1");
  check(y1, y_axes, "y1");
  check(x2, x_axes, "x2");
  check(y2, y_axes, "y2");

  TwoContactModels m;
  m.config = cfg;
  m.x_axes = x_axes;
  m.y_axes = y_axes;
  const Matrix raw = feature_matrix(train);
  m.preprocessing = Standardizer::fit(raw);
  const Matrix xs = m.preprocessing.transform(raw);
  auto forest = [&](const std::vector<int>& labels, int n_classes, std::uint64_t salt) {
    auto c = cfg.forest;
    c.seed = derive_seed(cfg.forest.seed, salt);
    return forest_fit(xs, labels, n_classes, c);
  };
  m.x1_clf = forest(x1, int(x_axes.size()), 11);
  m.y1_clf = forest(y1, int(y_axes.size()), 12);
  m.x2_clf = forest(x2, int(x_axes.size()), 13);
  m.y2_clf = forest(y2, int(y_axes.size()), 14);
  auto gp_cfg = cfg.gp;
  gp_cfg.standardize = false;
  gp_cfg.seed = derive_seed(cfg.gp.seed, 1);
  m.force1_model = gp_fit(xs, f1, gp_cfg);
  gp_cfg.seed = derive_seed(cfg.gp.seed, 2);
  m.force2_model = gp_fit(xs, f2, gp_cfg);
  return m;
}

struct TwoBatchOutputs {
  std::vector<NodeCoord> node1, node2;
  std::vector<double> force1, force2;
};

// Raw per-slot predictions (slot 1 / slot 2 as trained), forces clamped >= 0.
inline TwoBatchOutputs run_components(const TwoContactModels& m, const Matrix& raw) {
  if (raw.rows() > 0 && raw.cols() != std::size_t(kFeatureCount))
    throw DimensionError("pipeline expects 20 features per frame");
  const Matrix xs = m.preprocessing.transform(raw);
  const auto x1 = forest_predict(m.x1_clf, xs).labels;
  const auto y1 = forest_predict(m.y1_clf, xs).labels;
  const auto x2 = forest_predict(m.x2_clf, xs).labels;
  const auto y2 = forest_predict(m.y2_clf, xs).labels;
  const auto f1 = gp_predict_mean(m.force1_model, xs);
  const auto f2 = gp_predict_mean(m.force2_model, xs);
  TwoBatchOutputs o;
  for (std::size_t i = 0; i < raw.rows(); ++i) {
    o.node1.push_back({m.x_axes[x1[i]], m.y_axes[y1[i]]});
    o.node2.push_back({m.x_axes[x2[i]], m.y_axes[y2[i]]});
    o.force1.push_back(std::max(0.0, f1[i]));
    o.force2.push_back(std::max(0.0, f2[i]));
  }
  return o;
}

inline TwoContactEstimate infer_two(const TwoContactModels& m, const CapacitanceFrame& frame) {
  const auto o = run_components(m, feature_matrix(std::span<const CapacitanceFrame>(&frame, 1)));
  TwoContactEstimate e;
  TwoContactEstimate::Entry a{o.node1[0], {o.force1[0]}}, b{o.node2[0], {o.force2[0]}};
  if (a.node == b.node) {
    e.contacts.push_back({a.node, {a.force.newtons + b.force.newtons}});
    return e;
  }
  if (node_id(b.node) < node_id(a.node)) std::swap(a, b);
  e.contacts = {a, b};
  return e;
}

// ---------------------------------------------------------------------------
// Bundles.

inline void to_json(nlohmann::json& j, const StretchModel& s) { j = {{"ols", s.ols}, {"constant", s.constant}}; }
inline void from_json(const nlohmann::json& j, StretchModel& s) {
  j.at("ols").get_to(s.ols);
  j.at("constant").get_to(s.constant);
}

inline nlohmann::json pipeline_to_json(const TrainedPipeline& p) {
  return {{"kind", "single-contact-pipeline"},
          {"schema_version", kPipelineSchemaVersion},
          {"config", p.config},
          {"preprocessing", p.preprocessing},
          {"stretch_model", p.stretch_model},
          {"detector", p.detector},
          {"col_clf", p.col_clf},
          {"row_clf", p.row_clf},
          {"force_model", p.force_model}};
}

inline nlohmann::json pipeline_to_json(const TwoContactModels& m) {
  return {{"kind", "two-contact-pipeline"},
          {"schema_version", kPipelineSchemaVersion},
          {"config", m.config},
          {"preprocessing", m.preprocessing},
          {"x_axes", m.x_axes},
          {"y_axes", m.y_axes},
          {"x1_clf", m.x1_clf},
          {"y1_clf", m.y1_clf},
          {"x2_clf", m.x2_clf},
          {"y2_clf", m.y2_clf},
          {"force1_model", m.force1_model},
          {"force2_model", m.force2_model}};
}

inline std::string bundle_kind(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ParseError("model bundle has no 'kind'");
  return j["kind"].get<std::string>();
}

inline TrainedPipeline single_pipeline_from_json(const nlohmann::json& j) {
  if (bundle_kind(j) != "single-contact-pipeline")
    throw ModeMismatchError("bundle holds a " + bundle_kind(j) + ", expected a single-contact-pipeline");
  try {
    TrainedPipeline p;
    j.at("config").get_to(p.config);
    j.at("preprocessing").get_to(p.preprocessing);
    j.at("stretch_model").get_to(p.stretch_model);
    j.at("detector").get_to(p.detector);
    j.at("col_clf").get_to(p.col_clf);
    j.at("row_clf").get_to(p.row_clf);
    j.at("force_model").get_to(p.force_model);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed single-contact bundle: ") + e.what());
  }
}

inline TwoContactModels two_models_from_json(const nlohmann::json& j) {
  if (bundle_kind(j) != "two-contact-pipeline")
    throw ModeMismatchError("bundle holds a " + bundle_kind(j) + ", expected a two-contact-pipeline");
  try {
    TwoContactModels m;
    j.at("config").get_to(m.config);
    j.at("preprocessing").get_to(m.preprocessing);
    j.at("x_axes").get_to(m.x_axes);
    j.at("y_axes").get_to(m.y_axes);
    j.at("x1_clf").get_to(m.x1_clf);
    j.at("y1_clf").get_to(m.y1_clf);
    j.at("x2_clf").get_to(m.x2_clf);
    j.at("y2_clf").get_to(m.y2_clf);
    j.at("force1_model").get_to(m.force1_model);
    j.at("force2_model").get_to(m.force2_model);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed two-contact bundle: ") + e.what());
  }
}

}  // namespace eskin
