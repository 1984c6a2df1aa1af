// Stratified k-fold cross-validation, regression / classification metrics and
// confusion-matrix reporting for the single- and two-contact pipelines.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include <json.hpp>

#include "eskin/core.hpp"
#include "eskin/parallel.hpp"
#include "eskin/pipeline.hpp"
#include "eskin/random.hpp"

namespace eskin {

// ---------------------------------------------------------------------------
// Folds

struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;  // fold per sample
  std::vector<long> strata;      // stratum label per sample

  std::vector<std::size_t> test_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
      if (assignments[i] == fold) out.push_back(i);
    return out;
  }
  std::vector<std::size_t> train_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
      if (assignments[i] != fold) out.push_back(i);
    return out;
  }
};

// Within each stratum (ascending label order) the samples are shuffled and
// dealt round-robin starting at fold 0. Strata smaller than k leave some folds
// without that stratum.
inline FoldPlan stratified_kfold(std::span<const long> strata, int k, std::uint64_t seed) {
  if (k < 2) throw UsageError("k-fold cross-validation needs k >= 2, got " + std::to_string(k));
  FoldPlan plan;
  plan.k = k;
  plan.strata.assign(strata.begin(), strata.end());
  plan.assignments.assign(strata.size(), -1);
  std::map<long, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < strata.size(); ++i) groups[strata[i]].push_back(i);
  Rng rng(seed);
  for (auto& [label, members] : groups) {
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t r = 0; r < members.size(); ++r) plan.assignments[members[r]] = int(r % std::size_t(k));
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Metrics

inline double mse(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw DimensionError("mse: length mismatch");
  if (y.empty()) throw UndefinedMetricError("mse of an empty sample");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return s / double(y.size());
}

inline double r2(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw DimensionError("r2: length mismatch");
  if (y.empty()) throw UndefinedMetricError("r2 of an empty sample");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= double(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (ss_tot == 0.0) throw UndefinedMetricError("r2 is undefined for zero-variance targets");
  return 1.0 - ss_res / ss_tot;
}

inline double accuracy(std::span<const int> truth, std::span<const int> pred) {
  if (truth.size() != pred.size()) throw DimensionError("accuracy: length mismatch");
  if (truth.empty()) throw UndefinedMetricError("accuracy of an empty sample");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == pred[i];
  return double(hit) / double(truth.size());
}

struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<long>> counts;  // [true][predicted]

  explicit ConfusionMatrix(std::vector<std::string> class_labels = {})
      : labels(std::move(class_labels)), counts(labels.size(), std::vector<long>(labels.size(), 0)) {}

  std::size_t n_classes() const { return labels.size(); }

  long total() const {
    long t = 0;
    for (const auto& r : counts)
      for (long c : r) t += c;
    return t;
  }
  long trace() const {
    long t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
  }
  double accuracy() const {
    const long t = total();
    if (t == 0) throw UndefinedMetricError("accuracy of an empty confusion matrix");
    return double(trace()) / double(t);
  }
  // Every diagonal entry strictly exceeds each off-diagonal entry of its row.
  bool diagonal_dominant() const {
    for (std::size_t i = 0; i < counts.size(); ++i)
      for (std::size_t j = 0; j < counts.size(); ++j)
        if (i != j && counts[i][i] <= counts[i][j]) return false;
    return true;
  }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
    if (o.labels != labels) throw DimensionError("cannot add confusion matrices over different classes");
    for (std::size_t i = 0; i < counts.size(); ++i)
      for (std::size_t j = 0; j < counts.size(); ++j) counts[i][j] += o.counts[i][j];
    return *this;
  }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline std::vector<std::string> numbered_labels(int first, int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(std::to_string(first + i));
  return out;
}

// Labels are class indices in [0, n_classes).
inline ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> pred, int n_classes,
                                 std::vector<std::string> class_labels = {}) {
  if (truth.size() != pred.size()) throw DimensionError("confusion: length mismatch");
  if (class_labels.empty()) class_labels = numbered_labels(0, n_classes);
  if (int(class_labels.size()) != n_classes) throw DimensionError("confusion: label count mismatch");
  ConfusionMatrix cm(std::move(class_labels));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= n_classes || pred[i] < 0 || pred[i] >= n_classes)
      throw ValidationError("confusion: label out of range at sample " + std::to_string(i));
    ++cm.counts[truth[i]][pred[i]];
  }
  return cm;
}

struct RegressionScore {
  std::size_t n = 0;
  std::optional<double> mse;
  std::optional<double> r2;
};

inline RegressionScore score_regression(std::span<const double> y, std::span<const double> yhat) {
  RegressionScore s;
  s.n = y.size();
  try {
    s.mse = eskin::mse(y, yhat);
    s.r2 = eskin::r2(y, yhat);
  } catch (const UndefinedMetricError&) {
  }
  return s;
}

inline std::optional<double> try_accuracy(std::span<const int> t, std::span<const int> p) {
  if (t.empty()) return std::nullopt;
  return accuracy(t, p);
}

struct Summary {
  std::optional<double> mean;
  std::optional<double> stdev;  // sample standard deviation, needs >= 2 values
};

inline Summary summarize(const std::vector<std::optional<double>>& values) {
  std::vector<double> v;
  for (const auto& x : values)
    if (x) v.push_back(*x);
  Summary s;
  if (v.empty()) return s;
  double m = 0.0;
  for (double x : v) m += x;
  m /= double(v.size());
  s.mean = m;
  if (v.size() >= 2) {
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    s.stdev = std::sqrt(ss / double(v.size() - 1));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Cross-validation

struct CvConfig {
  int k = 10;
  std::uint64_t seed = 42;
  unsigned workers = 0;  // folds evaluated in parallel; 0 = hardware concurrency
};

struct SingleFoldMetrics {
  int fold = 0;
  std::size_t n_test = 0;
  std::size_t n_test_contact = 0;
  RegressionScore stretch;
  RegressionScore force;
  std::optional<double> detection_accuracy;
  std::optional<double> row_accuracy;
  std::optional<double> col_accuracy;
};

struct SingleReport {
  int k = 0;
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  std::vector<SingleFoldMetrics> folds;
  RegressionScore stretch;  // pooled over every held-out prediction
  RegressionScore force;    // contact-positive test samples only
  std::optional<double> detection_accuracy;
  std::optional<double> row_accuracy;
  std::optional<double> col_accuracy;
  ConfusionMatrix row_cm{numbered_labels(1, kTerminalsPerAxis)};
  ConfusionMatrix col_cm{numbered_labels(1, kTerminalsPerAxis)};
  ConfusionMatrix detection_cm{{"no-contact", "contact"}};
  std::vector<int> times_tested;  // per sample
};

namespace eval_detail {

inline std::vector<long> node_strata(const std::vector<SingleContactSample>& s) {
  std::vector<long> out;
  for (const auto& x : s) out.push_back(node_id(x.node));
  return out;
}

inline std::vector<long> pair_strata(const std::vector<TwoContactSample>& s) {
  std::vector<long> out;
  for (const auto& x : s) out.push_back(long(node_id(x.node1)) * (kNodeCount + 1) + node_id(x.node2));
  return out;
}

template <class T>
std::vector<T> pick(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

// Every stratum present in the dataset must appear in each training split.
inline void check_fold_coverage(const FoldPlan& plan, int fold, const std::string& what) {
  std::set<long> all(plan.strata.begin(), plan.strata.end()), train;
  for (std::size_t i = 0; i < plan.strata.size(); ++i)
    if (plan.assignments[i] != fold) train.insert(plan.strata[i]);
  std::vector<long> missing;
  for (long s : all)
    if (!train.count(s)) missing.push_back(s);
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? "," : "") + std::to_string(missing[i]);
    throw CoverageError("fold " + std::to_string(fold) + ": training split lacks " + what + " " + list);
  }
}

inline PipelineConfig fold_config(const PipelineConfig& cfg, unsigned fold_workers) {
  PipelineConfig c = cfg;
  if (fold_workers > 1) c.forest.workers = 1;
  return c;
}

inline unsigned resolve_workers(unsigned w, int k) {
  if (w == 0) w = std::max(1u, std::thread::hardware_concurrency());
  return std::min<unsigned>(w, unsigned(k));
}

}  // namespace eval_detail

inline SingleReport cross_validate(const Dataset& ds, const CvConfig& cv, const PipelineConfig& cfg) {
  const auto samples = single_samples(ds);
  if (samples.empty()) throw CoverageError("cannot cross-validate an empty dataset");
  const auto strata = eval_detail::node_strata(samples);
  const auto plan = stratified_kfold(strata, cv.k, cv.seed);
  for (int f = 0; f < cv.k; ++f) eval_detail::check_fold_coverage(plan, f, "node ids");

  const unsigned workers = eval_detail::resolve_workers(cv.workers, cv.k);
  const auto fold_cfg = eval_detail::fold_config(cfg, workers);
  std::vector<std::vector<std::size_t>> tests(cv.k);
  std::vector<SingleBatchOutputs> outputs(cv.k);
  parallel_for(
      std::size_t(cv.k),
      [&](std::size_t f) {
        const auto train = eval_detail::pick(samples, plan.train_indices(int(f)));
        tests[f] = plan.test_indices(int(f));
        const auto model = train_single(train, fold_cfg);
        outputs[f] = run_components(model, feature_matrix(eval_detail::pick(samples, tests[f])));
      },
      workers);

  SingleReport rep;
  rep.k = cv.k;
  rep.seed = cv.seed;
  rep.n_samples = samples.size();
  rep.times_tested.assign(samples.size(), 0);
  std::vector<double> all_l, all_lhat, all_f, all_fhat;
  std::vector<int> all_det, all_dethat, all_row, all_rowhat, all_col, all_colhat;
  for (int f = 0; f < cv.k; ++f) {
    const auto& idx = tests[f];
    const auto& o = outputs[f];
    std::vector<double> l, f_true, f_hat;
    std::vector<int> det, row, rowhat, col, colhat;
    for (std::size_t t = 0; t < idx.size(); ++t) {
      const auto& s = samples[idx[t]];
      ++rep.times_tested[idx[t]];
      l.push_back(s.stretch.lambda);
      det.push_back(s.node.is_contact() ? 1 : 0);
      if (s.node.is_contact()) {
        f_true.push_back(s.force.newtons);
        f_hat.push_back(o.force[t]);
        row.push_back(s.node.y - 1);
        rowhat.push_back(o.row[t] - 1);
        col.push_back(s.node.x - 1);
        colhat.push_back(o.col[t] - 1);
      }
    }
    SingleFoldMetrics fm;
    fm.fold = f;
    fm.n_test = idx.size();
    fm.n_test_contact = f_true.size();
    fm.stretch = score_regression(l, o.stretch);
    fm.force = score_regression(f_true, f_hat);
    fm.detection_accuracy = try_accuracy(det, o.detected);
    fm.row_accuracy = try_accuracy(row, rowhat);
    fm.col_accuracy = try_accuracy(col, colhat);
    rep.folds.push_back(fm);
    rep.row_cm += confusion(row, rowhat, kTerminalsPerAxis, numbered_labels(1, kTerminalsPerAxis));
    rep.col_cm += confusion(col, colhat, kTerminalsPerAxis, numbered_labels(1, kTerminalsPerAxis));
    rep.detection_cm += confusion(det, o.detected, 2, {"no-contact", "contact"});
    all_l.insert(all_l.end(), l.begin(), l.end());
    all_lhat.insert(all_lhat.end(), o.stretch.begin(), o.stretch.end());
    all_f.insert(all_f.end(), f_true.begin(), f_true.end());
    all_fhat.insert(all_fhat.end(), f_hat.begin(), f_hat.end());
    all_det.insert(all_det.end(), det.begin(), det.end());
    all_dethat.insert(all_dethat.end(), o.detected.begin(), o.detected.end());
    all_row.insert(all_row.end(), row.begin(), row.end());
    all_rowhat.insert(all_rowhat.end(), rowhat.begin(), rowhat.end());
    all_col.insert(all_col.end(), col.begin(), col.end());
    all_colhat.insert(all_colhat.end(), colhat.begin(), colhat.end());
  }
  rep.stretch = score_regression(all_l, all_lhat);
  rep.force = score_regression(all_f, all_fhat);
  rep.detection_accuracy = try_accuracy(all_det, all_dethat);
  rep.row_accuracy = try_accuracy(all_row, all_rowhat);
  rep.col_accuracy = try_accuracy(all_col, all_colhat);
  return rep;
}

// Two-contact variant.

struct TwoFoldMetrics {
  int fold = 0;
  std::size_t n_test = 0;
  std::optional<double> x1_accuracy, y1_accuracy, x2_accuracy, y2_accuracy;
  RegressionScore force1, force2;
};

// Force error split by whether the two contacts share an x or y terminal.
struct DoubleAffectSummary {
  std::size_t n_shared = 0;
  std::size_t n_disjoint = 0;
  std::optional<double> mse_shared;    // pooled over force1 and force2
  std::optional<double> mse_disjoint;
  std::optional<double> force1_mse_shared, force1_mse_disjoint;
  std::optional<double> force2_mse_shared, force2_mse_disjoint;
};

struct TwoReport {
  int k = 0;
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  std::vector<int> x_axes, y_axes;
  std::vector<TwoFoldMetrics> folds;
  std::optional<double> x1_accuracy, y1_accuracy, x2_accuracy, y2_accuracy;
  RegressionScore force1, force2;
  ConfusionMatrix x1_cm, y1_cm, x2_cm, y2_cm;
  DoubleAffectSummary double_affect;
  std::vector<int> times_tested;
};

inline bool shares_terminal(const TwoContactSample& s) {
  return s.node1.x == s.node2.x || s.node1.y == s.node2.y;
}

inline TwoReport cross_validate_two(const Dataset& ds, const CvConfig& cv, const PipelineConfig& cfg) {
  const auto samples = two_samples(ds);
  if (samples.empty()) throw CoverageError("cannot cross-validate an empty dataset");
  std::set<int> xs, ys;
  for (const auto& s : samples) {
    xs.insert({s.node1.x, s.node2.x});
    ys.insert({s.node1.y, s.node2.y});
  }
  const std::vector<int> x_axes(xs.begin(), xs.end()), y_axes(ys.begin(), ys.end());
  const auto strata = eval_detail::pair_strata(samples);
  const auto plan = stratified_kfold(strata, cv.k, cv.seed);
  for (int f = 0; f < cv.k; ++f) eval_detail::check_fold_coverage(plan, f, "node pairs");

  const unsigned workers = eval_detail::resolve_workers(cv.workers, cv.k);
  const auto fold_cfg = eval_detail::fold_config(cfg, workers);
  std::vector<std::vector<std::size_t>> tests(cv.k);
  std::vector<TwoBatchOutputs> outputs(cv.k);
  parallel_for(
      std::size_t(cv.k),
      [&](std::size_t f) {
        const auto train = eval_detail::pick(samples, plan.train_indices(int(f)));
        tests[f] = plan.test_indices(int(f));
        const auto models = train_two(train, fold_cfg, x_axes, y_axes);
        outputs[f] = run_components(models, feature_matrix(eval_detail::pick(samples, tests[f])));
      },
      workers);

  auto axis_labels = [](const std::vector<int>& axes) {
    std::vector<std::string> l;
    for (int a : axes) l.push_back(std::to_string(a));
    return l;
  };
  TwoReport rep;
  rep.k = cv.k;
  rep.seed = cv.seed;
  rep.n_samples = samples.size();
  rep.x_axes = x_axes;
  rep.y_axes = y_axes;
  rep.x1_cm = rep.x2_cm = ConfusionMatrix(axis_labels(x_axes));
  rep.y1_cm = rep.y2_cm = ConfusionMatrix(axis_labels(y_axes));
  rep.times_tested.assign(samples.size(), 0);
  const int nx = int(x_axes.size()), ny = int(y_axes.size());
  auto cls = pipeline_detail::axis_class;

  std::vector<int> ax1, px1, ay1, py1, ax2, px2, ay2, py2;
  std::vector<double> af1, pf1, af2, pf2;
  std::vector<double> sh_t, sh_p, dj_t, dj_p, sh1_t, sh1_p, dj1_t, dj1_p, sh2_t, sh2_p, dj2_t, dj2_p;
  for (int f = 0; f < cv.k; ++f) {
    const auto& idx = tests[f];
    const auto& o = outputs[f];
    std::vector<int> tx1, ox1, ty1, oy1, tx2, ox2, ty2, oy2;
    std::vector<double> tf1, of1, tf2, of2;
    for (std::size_t t = 0; t < idx.size(); ++t) {
      const auto& s = samples[idx[t]];
      ++rep.times_tested[idx[t]];
      tx1.push_back(cls(x_axes, s.node1.x));
      ox1.push_back(cls(x_axes, o.node1[t].x));
      ty1.push_back(cls(y_axes, s.node1.y));
      oy1.push_back(cls(y_axes, o.node1[t].y));
      tx2.push_back(cls(x_axes, s.node2.x));
      ox2.push_back(cls(x_axes, o.node2[t].x));
      ty2.push_back(cls(y_axes, s.node2.y));
      oy2.push_back(cls(y_axes, o.node2[t].y));
      tf1.push_back(s.force1.newtons);
      of1.push_back(o.force1[t]);
      tf2.push_back(s.force2.newtons);
      of2.push_back(o.force2[t]);
      const bool shared = shares_terminal(s);
      auto& t_all = shared ? sh_t : dj_t;
      auto& p_all = shared ? sh_p : dj_p;
      t_all.insert(t_all.end(), {s.force1.newtons, s.force2.newtons});
      p_all.insert(p_all.end(), {o.force1[t], o.force2[t]});
      (shared ? sh1_t : dj1_t).push_back(s.force1.newtons);
      (shared ? sh1_p : dj1_p).push_back(o.force1[t]);
      (shared ? sh2_t : dj2_t).push_back(s.force2.newtons);
      (shared ? sh2_p : dj2_p).push_back(o.force2[t]);
      (shared ? rep.double_affect.n_shared : rep.double_affect.n_disjoint) += 1;
    }
    TwoFoldMetrics fm;
    fm.fold = f;
    fm.n_test = idx.size();
    fm.x1_accuracy = try_accuracy(tx1, ox1);
    fm.y1_accuracy = try_accuracy(ty1, oy1);
    fm.x2_accuracy = try_accuracy(tx2, ox2);
    fm.y2_accuracy = try_accuracy(ty2, oy2);
    fm.force1 = score_regression(tf1, of1);
    fm.force2 = score_regression(tf2, of2);
    rep.folds.push_back(fm);
    rep.x1_cm += confusion(tx1, ox1, nx, axis_labels(x_axes));
    rep.y1_cm += confusion(ty1, oy1, ny, axis_labels(y_axes));
    rep.x2_cm += confusion(tx2, ox2, nx, axis_labels(x_axes));
    rep.y2_cm += confusion(ty2, oy2, ny, axis_labels(y_axes));
    auto append = [](auto& dst, const auto& src) { dst.insert(dst.end(), src.begin(), src.end()); };
    append(ax1, tx1); append(px1, ox1); append(ay1, ty1); append(py1, oy1);
    append(ax2, tx2); append(px2, ox2); append(ay2, ty2); append(py2, oy2);
    append(af1, tf1); append(pf1, of1); append(af2, tf2); append(pf2, of2);
  }
  rep.x1_accuracy = try_accuracy(ax1, px1);
  rep.y1_accuracy = try_accuracy(ay1, py1);
  rep.x2_accuracy = try_accuracy(ax2, px2);
  rep.y2_accuracy = try_accuracy(ay2, py2);
  rep.force1 = score_regression(af1, pf1);
  rep.force2 = score_regression(af2, pf2);
  auto m = [](const std::vector<double>& t, const std::vector<double>& p) {
    return t.empty() ? std::nullopt : std::optional<double>(mse(t, p));
  };
  auto& da = rep.double_affect;
  da.mse_shared = m(sh_t, sh_p);
  da.mse_disjoint = m(dj_t, dj_p);
  da.force1_mse_shared = m(sh1_t, sh1_p);
  da.force1_mse_disjoint = m(dj1_t, dj1_p);
  da.force2_mse_shared = m(sh2_t, sh2_p);
  da.force2_mse_disjoint = m(dj2_t, dj2_p);
  return rep;
}

// ---------------------------------------------------------------------------
// Serialisation

using ojson = nlohmann::ordered_json;

inline ojson opt_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

inline ojson to_ojson(const RegressionScore& s) {
  return {{"n", s.n}, {"mse", opt_json(s.mse)}, {"r2", opt_json(s.r2)}};
}

inline ojson to_ojson(const Summary& s) { return {{"mean", opt_json(s.mean)}, {"std", opt_json(s.stdev)}}; }

inline ojson to_ojson(const ConfusionMatrix& cm) { return {{"labels", cm.labels}, {"counts", cm.counts}}; }

inline bool all_tested_once(const std::vector<int>& t) {
  return std::all_of(t.begin(), t.end(), [](int c) { return c == 1; });
}

inline ojson report_to_json(const SingleReport& r) {
  std::vector<std::optional<double>> s_mse, s_r2, f_mse, f_r2, det, row, col;
  ojson folds = ojson::array();
  for (const auto& f : r.folds) {
    s_mse.push_back(f.stretch.mse);
    s_r2.push_back(f.stretch.r2);
    f_mse.push_back(f.force.mse);
    f_r2.push_back(f.force.r2);
    det.push_back(f.detection_accuracy);
    row.push_back(f.row_accuracy);
    col.push_back(f.col_accuracy);
    folds.push_back({{"fold", f.fold},
                     {"n_test", f.n_test},
                     {"n_test_contact", f.n_test_contact},
                     {"stretch", to_ojson(f.stretch)},
                     {"force", to_ojson(f.force)},
                     {"detection_accuracy", opt_json(f.detection_accuracy)},
                     {"row_accuracy", opt_json(f.row_accuracy)},
                     {"col_accuracy", opt_json(f.col_accuracy)}});
  }
  return {{"kind", "single-contact-cv"},
          {"k", r.k},
          {"seed", r.seed},
          {"n_samples", r.n_samples},
          {"notes", "force and localisation metrics use contact-positive test samples only"},
          {"pooled",
           {{"stretch", to_ojson(r.stretch)},
            {"force", to_ojson(r.force)},
            {"detection_accuracy", opt_json(r.detection_accuracy)},
            {"row_accuracy", opt_json(r.row_accuracy)},
            {"col_accuracy", opt_json(r.col_accuracy)}}},
          {"fold_summary",
           {{"stretch_mse", to_ojson(summarize(s_mse))},
            {"stretch_r2", to_ojson(summarize(s_r2))},
            {"force_mse", to_ojson(summarize(f_mse))},
            {"force_r2", to_ojson(summarize(f_r2))},
            {"detection_accuracy", to_ojson(summarize(det))},
            {"row_accuracy", to_ojson(summarize(row))},
            {"col_accuracy", to_ojson(summarize(col))}}},
          {"folds", folds},
          {"confusion",
           {{"row", to_ojson(r.row_cm)}, {"col", to_ojson(r.col_cm)}, {"detection", to_ojson(r.detection_cm)}}},
          {"every_sample_tested_once", all_tested_once(r.times_tested)}};
}

inline ojson report_to_json(const TwoReport& r) {
  std::vector<std::optional<double>> x1, y1, x2, y2, f1, f2;
  ojson folds = ojson::array();
  for (const auto& f : r.folds) {
    x1.push_back(f.x1_accuracy);
    y1.push_back(f.y1_accuracy);
    x2.push_back(f.x2_accuracy);
    y2.push_back(f.y2_accuracy);
    f1.push_back(f.force1.r2);
    f2.push_back(f.force2.r2);
    folds.push_back({{"fold", f.fold},
                     {"n_test", f.n_test},
                     {"x1_accuracy", opt_json(f.x1_accuracy)},
                     {"y1_accuracy", opt_json(f.y1_accuracy)},
                     {"x2_accuracy", opt_json(f.x2_accuracy)},
                     {"y2_accuracy", opt_json(f.y2_accuracy)},
                     {"force1", to_ojson(f.force1)},
                     {"force2", to_ojson(f.force2)}});
  }
  const auto& da = r.double_affect;
  return {{"kind", "two-contact-cv"},
          {"k", r.k},
          {"seed", r.seed},
          {"n_samples", r.n_samples},
          {"x_axes", r.x_axes},
          {"y_axes", r.y_axes},
          {"pooled",
           {{"x1_accuracy", opt_json(r.x1_accuracy)},
            {"y1_accuracy", opt_json(r.y1_accuracy)},
            {"x2_accuracy", opt_json(r.x2_accuracy)},
            {"y2_accuracy", opt_json(r.y2_accuracy)},
            {"force1", to_ojson(r.force1)},
            {"force2", to_ojson(r.force2)}}},
          {"fold_summary",
           {{"x1_accuracy", to_ojson(summarize(x1))},
            {"y1_accuracy", to_ojson(summarize(y1))},
            {"x2_accuracy", to_ojson(summarize(x2))},
            {"y2_accuracy", to_ojson(summarize(y2))},
            {"force1_r2", to_ojson(summarize(f1))},
            {"force2_r2", to_ojson(summarize(f2))}}},
          {"double_affect",
           {{"n_shared", da.n_shared},
            {"n_disjoint", da.n_disjoint},
            {"mse_shared", opt_json(da.mse_shared)},
            {"mse_disjoint", opt_json(da.mse_disjoint)},
            {"force1_mse_shared", opt_json(da.force1_mse_shared)},
            {"force1_mse_disjoint", opt_json(da.force1_mse_disjoint)},
            {"force2_mse_shared", opt_json(da.force2_mse_shared)},
            {"force2_mse_disjoint", opt_json(da.force2_mse_disjoint)}}},
          {"folds", folds},
          {"confusion",
           {{"x1", to_ojson(r.x1_cm)}, {"y1", to_ojson(r.y1_cm)}, {"x2", to_ojson(r.x2_cm)}, {"y2", to_ojson(r.y2_cm)}}},
          {"every_sample_tested_once", all_tested_once(r.times_tested)}};
}

inline void write_confusion_csv(const ConfusionMatrix& cm, std::ostream& out) {
  out << "true\\pred";
  for (const auto& l : cm.labels) out << ',' << l;
  out << '\n';
  for (std::size_t i = 0; i < cm.n_classes(); ++i) {
    out << cm.labels[i];
    for (long c : cm.counts[i]) out << ',' << c;
    out << '\n';
  }
}

// ASCII greyscale PGM: one `cell` x `cell` block per entry, row-normalised,
// white = 0 and black = the whole row on that entry.
inline void write_confusion_pgm(const ConfusionMatrix& cm, std::ostream& out, int cell = 16) {
  const int n = int(cm.n_classes());
  out << "P2\n" << n * cell << ' ' << n * cell << "\n255\n";
  for (int r = 0; r < n * cell; ++r) {
    const auto& row = cm.counts[r / cell];
    long sum = 0;
    for (long c : row) sum += c;
    for (int c = 0; c < n * cell; ++c) {
      const double frac = sum > 0 ? double(row[c / cell]) / double(sum) : 0.0;
      out << int(std::lround(255.0 * (1.0 - frac))) << (c + 1 < n * cell ? ' ' : '\n');
    }
  }
}

inline std::string fmt_opt(const std::optional<double>& v, int precision = 4) {
  if (!v) return "n/a";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << *v;
  return os.str();
}

inline std::string headline(const SingleReport& r) {
  std::ostringstream os;
  os << "stretch_r2=" << fmt_opt(r.stretch.r2) << " stretch_mse=" << fmt_opt(r.stretch.mse, 8)
     << " force_r2=" << fmt_opt(r.force.r2) << " detection_accuracy=" << fmt_opt(r.detection_accuracy)
     << " row_accuracy=" << fmt_opt(r.row_accuracy) << " col_accuracy=" << fmt_opt(r.col_accuracy);
  return os.str();
}

inline std::string headline(const TwoReport& r) {
  std::ostringstream os;
  os << "x1_accuracy=" << fmt_opt(r.x1_accuracy) << " y1_accuracy=" << fmt_opt(r.y1_accuracy)
     << " x2_accuracy=" << fmt_opt(r.x2_accuracy) << " y2_accuracy=" << fmt_opt(r.y2_accuracy)
     << " force1_r2=" << fmt_opt(r.force1.r2) << " force2_r2=" << fmt_opt(r.force2.r2)
     << " mse_shared=" << fmt_opt(r.double_affect.mse_shared) << " mse_disjoint=" << fmt_opt(r.double_affect.mse_disjoint);
  return os.str();
}

}  // namespace eskin
