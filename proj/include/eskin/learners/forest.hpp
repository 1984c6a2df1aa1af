// Random forest of CART classification trees (Gini impurity, axis-aligned
// splits at midpoints between adjacent distinct values).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "eskin/linalg.hpp"
#include "eskin/parallel.hpp"
#include "eskin/random.hpp"

namespace eskin {

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 0;           // 0: unlimited
  int min_leaf = 1;
  int features_per_split = 0;  // 0: ceil(sqrt(d))
  bool bootstrap = true;
  std::uint64_t seed = 13;
  unsigned workers = 0;        // 0: hardware concurrency

  friend bool operator==(const ForestConfig&, const ForestConfig&) = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  std::vector<double> class_counts;  // leaves only

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(std::span<const double> x) const {
    const TreeNode* n = &nodes[0];
    while (!n->is_leaf()) n = &nodes[x[n->feature] <= n->threshold ? n->left : n->right];
    return *n;
  }
  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  int n_classes = 0;
  std::size_t n_features = 0;
  ForestConfig config;

  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

inline double gini_impurity(std::span<const double> counts, double total) {
  if (total <= 0.0) return 0.0;
  double s = 0.0;
  for (double c : counts) s += (c / total) * (c / total);
  return 1.0 - s;
}

// Smallest index with the largest value.
inline int argmax_first(std::span<const double> v) {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = int(i);
  return best;
}

namespace forest_detail {

struct Builder {
  const Matrix& x;
  std::span<const int> y;
  int n_classes;
  int max_depth;
  int min_leaf;
  int mtry;
  Rng rng;
  DecisionTree tree;
  std::vector<std::pair<double, int>> scratch;

  std::vector<double> counts_of(std::span<const std::size_t> idx) const {
    std::vector<double> c(n_classes, 0.0);
    for (auto i : idx) c[y[i]] += 1.0;
    return c;
  }

  // Best split of `idx` on one feature; updates `best` only on strictly larger gain.
  void scan_feature(std::span<const std::size_t> idx, int f, const std::vector<double>& total,
                    double parent_gini, SplitChoice& best) {
    const std::size_t m = idx.size();
    scratch.clear();
    for (auto i : idx) scratch.emplace_back(x(i, f), y[i]);
    std::sort(scratch.begin(), scratch.end());
    std::vector<double> left(n_classes, 0.0), right = total;
    for (std::size_t k = 0; k + 1 < m; ++k) {
      left[scratch[k].second] += 1.0;
      right[scratch[k].second] -= 1.0;
      if (!(scratch[k].first < scratch[k + 1].first)) continue;
      const double nl = double(k + 1), nr = double(m - k - 1);
      if (nl < min_leaf || nr < min_leaf) continue;
      const double child = (nl * gini_impurity(left, nl) + nr * gini_impurity(right, nr)) / double(m);
      const double gain = parent_gini - child;
      if (best.feature < 0 || gain > best.gain + 1e-12) {
        best.feature = f;
        best.threshold = 0.5 * (scratch[k].first + scratch[k + 1].first);
        best.gain = gain;
      }
    }
  }

  SplitChoice find_split(std::span<const std::size_t> idx, const std::vector<double>& total) {
    const int d = int(x.cols());
    const double parent = gini_impurity(total, double(idx.size()));
    std::vector<int> feats(d);
    std::iota(feats.begin(), feats.end(), 0);
    SplitChoice best;
    if (mtry >= d) {
      for (int f : feats) scan_feature(idx, f, total, parent, best);
      return best;
    }
    std::shuffle(feats.begin(), feats.end(), rng);
    std::vector<int> chosen(feats.begin(), feats.begin() + mtry);
    std::sort(chosen.begin(), chosen.end());
    for (int f : chosen) scan_feature(idx, f, total, parent, best);
    // All sampled features constant here: keep drawing from the rest.
    for (int k = mtry; k < d && best.feature < 0; ++k) scan_feature(idx, feats[k], total, parent, best);
    return best;
  }

  int grow(std::span<std::size_t> idx, int depth) {
    const int id = int(tree.nodes.size());
    tree.nodes.emplace_back();
    auto counts = counts_of(idx);
    const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;
    const bool depth_hit = max_depth > 0 && depth >= max_depth;
    if (pure || depth_hit || idx.size() < 2 * std::size_t(min_leaf)) {
      tree.nodes[id].class_counts = std::move(counts);
      return id;
    }
    const auto split = find_split(idx, counts);
    if (split.feature < 0) {
      tree.nodes[id].class_counts = std::move(counts);
      return id;
    }
    auto mid = std::partition(idx.begin(), idx.end(),
                              [&](std::size_t i) { return x(i, split.feature) <= split.threshold; });
    const auto n_left = std::size_t(mid - idx.begin());
    const int l = grow(idx.subspan(0, n_left), depth + 1);
    const int r = grow(idx.subspan(n_left), depth + 1);
    auto& node = tree.nodes[id];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }
};

inline int resolve_mtry(const ForestConfig& cfg, std::size_t d) {
  if (cfg.features_per_split > 0) return std::min<int>(cfg.features_per_split, int(d));
  return std::max(1, int(std::ceil(std::sqrt(double(d)))));
}

}  // namespace forest_detail

// Fits one tree on the given rows (duplicates allowed, as in a bootstrap).
inline DecisionTree fit_tree(const Matrix& x, std::span<const int> y, int n_classes,
                             std::vector<std::size_t> rows, const ForestConfig& cfg, std::uint64_t seed) {
  forest_detail::Builder b{x, y, n_classes, cfg.max_depth, std::max(1, cfg.min_leaf),
                           forest_detail::resolve_mtry(cfg, x.cols()), Rng(seed), {}, {}};
  b.grow(rows, 0);
  return std::move(b.tree);
}

// Root split chosen by the builder for the given rows, with every feature considered.
inline SplitChoice best_root_split(const Matrix& x, std::span<const int> y, int n_classes, int min_leaf = 1) {
  forest_detail::Builder b{x, y, n_classes, 0, std::max(1, min_leaf), int(x.cols()), Rng(0), {}, {}};
  auto rows = iota_indices(x.rows());
  return b.find_split(rows, b.counts_of(rows));
}

inline ForestModel forest_fit(const Matrix& x, std::span<const int> y, int n_classes, const ForestConfig& cfg) {
  const std::size_t n = x.rows();
  if (n == 0) throw ValidationError("forest_fit: empty training set");
  if (y.size() != n) throw DimensionError("forest_fit: X and labels lengths differ");
  if (n_classes < 1) throw ValidationError("forest_fit: need at least one class");
  for (int l : y)
    if (l < 0 || l >= n_classes) throw ValidationError("forest_fit: label " + std::to_string(l) + " out of range");
  if (cfg.n_trees < 1) throw ConfigError("forest_fit: n_trees must be >= 1");

  ForestModel m;
  m.n_classes = n_classes;
  m.n_features = x.cols();
  m.config = cfg;
  m.trees.resize(cfg.n_trees);
  parallel_for(
      std::size_t(cfg.n_trees),
      [&](std::size_t t) {
        const auto seed = derive_seed(cfg.seed, t);
        std::vector<std::size_t> rows;
        if (cfg.bootstrap) {
          Rng rng(derive_seed(seed, 0xB007));
          std::uniform_int_distribution<std::size_t> pick(0, n - 1);
          rows.resize(n);
          for (auto& r : rows) r = pick(rng);
        } else {
          rows = iota_indices(n);
        }
        m.trees[t] = fit_tree(x, y, n_classes, std::move(rows), cfg, seed);
      },
      cfg.workers);
  return m;
}

struct ForestPrediction {
  std::vector<int> labels;
  Matrix vote_fractions;  // rows x n_classes
};

inline ForestPrediction forest_predict(const ForestModel& m, const Matrix& queries) {
  if (queries.rows() > 0 && queries.cols() != m.n_features)
    throw DimensionError("forest_predict: model has " + std::to_string(m.n_features) + " features, input has " +
                         std::to_string(queries.cols()));
  ForestPrediction p{std::vector<int>(queries.rows()), Matrix(queries.rows(), std::size_t(m.n_classes))};
  std::vector<double> votes(m.n_classes);
  for (std::size_t r = 0; r < queries.rows(); ++r) {
    std::fill(votes.begin(), votes.end(), 0.0);
    for (const auto& t : m.trees) votes[argmax_first(t.leaf_for(queries.row(r)).class_counts)] += 1.0;
    p.labels[r] = argmax_first(votes);
    for (int c = 0; c < m.n_classes; ++c) p.vote_fractions(r, c) = votes[c] / double(m.trees.size());
  }
  return p;
}

inline void to_json(nlohmann::json& j, const ForestConfig& c) {
  j = {{"n_trees", c.n_trees}, {"max_depth", c.max_depth}, {"min_leaf", c.min_leaf},
       {"features_per_split", c.features_per_split}, {"bootstrap", c.bootstrap}, {"seed", c.seed}};
}
inline void from_json(const nlohmann::json& j, ForestConfig& c) {
  ForestConfig d;
  c.n_trees = j.value("n_trees", d.n_trees);
  c.max_depth = j.value("max_depth", d.max_depth);
  c.min_leaf = j.value("min_leaf", d.min_leaf);
  c.features_per_split = j.value("features_per_split", d.features_per_split);
  c.bootstrap = j.value("bootstrap", d.bootstrap);
  c.seed = j.value("seed", d.seed);
}

// Trees are stored column-wise (feature/threshold/left/right arrays plus leaf
// counts) to keep bundles compact.
inline void to_json(nlohmann::json& j, const DecisionTree& t) {
  std::vector<int> feature, left, right;
  std::vector<double> threshold;
  nlohmann::json leaves = nlohmann::json::object();
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& n = t.nodes[i];
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    if (n.is_leaf()) leaves[std::to_string(i)] = n.class_counts;
  }
  j = {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"leaf_counts", leaves}};
}
inline void from_json(const nlohmann::json& j, DecisionTree& t) {
  const auto feature = j.at("feature").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto& leaves = j.at("leaf_counts");
  t.nodes.resize(feature.size());
  for (std::size_t i = 0; i < feature.size(); ++i) {
    t.nodes[i] = {feature[i], threshold[i], left[i], right[i], {}};
    if (feature[i] < 0) leaves.at(std::to_string(i)).get_to(t.nodes[i].class_counts);
  }
}

inline void to_json(nlohmann::json& j, const ForestModel& m) {
  j = {{"n_classes", m.n_classes}, {"n_features", m.n_features}, {"config", m.config}, {"trees", m.trees}};
}
inline void from_json(const nlohmann::json& j, ForestModel& m) {
  j.at("n_classes").get_to(m.n_classes);
  j.at("n_features").get_to(m.n_features);
  j.at("config").get_to(m.config);
  j.at("trees").get_to(m.trees);
}

}  // namespace eskin
