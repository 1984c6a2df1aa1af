#include <gtest/gtest.h>

#include "eskin/learners/forest.hpp"
#include "support/oracles.hpp"

using namespace eskin;

namespace {

ForestConfig single_tree(int depth = 0) {
  ForestConfig c;
  c.n_trees = 1;
  c.bootstrap = false;
  c.max_depth = depth;
  c.features_per_split = 100;
  return c;
}

}  // namespace

TEST(Forest, ThresholdSeparableOneStump) {
  const Matrix x = Matrix::from_rows({{0.1}, {0.3}, {0.4}, {0.7}, {0.8}, {0.9}});
  const std::vector<int> y{0, 0, 0, 1, 1, 1};
  const auto m = forest_fit(x, y, 2, single_tree(1));
  const auto& root = m.trees[0].nodes[0];
  EXPECT_EQ(root.feature, 0);
  EXPECT_DOUBLE_EQ(root.threshold, 0.55);
  EXPECT_EQ(forest_predict(m, x).labels, y);
}

TEST(Forest, ConstantLabels) {
  const Matrix x = Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
  const auto m = forest_fit(x, std::vector<int>{2, 2, 2}, 3, ForestConfig{});
  for (int l : forest_predict(m, Matrix::from_rows({{0, 0}, {9, 9}})).labels) EXPECT_EQ(l, 2);
}

TEST(Forest, FourPointRootMatchesExhaustiveGini) {
  const Matrix x = Matrix::from_rows({{0}, {1}, {10}, {11}});
  const std::vector<int> y{0, 0, 1, 1};
  const auto m = forest_fit(x, y, 2, single_tree());
  const auto& root = m.trees[0].nodes[0];
  EXPECT_GT(root.threshold, 1.0);
  EXPECT_LT(root.threshold, 10.0);
  const auto want = check::exhaustive_split(x, y, 2);
  EXPECT_EQ(root.threshold, want.threshold);
  EXPECT_NEAR(want.gain, 0.5, 1e-15);
  EXPECT_EQ(forest_predict(m, x).labels, y);
}

TEST(Forest, RootSplitsMatchExhaustiveSearchOnFixtures) {
  const auto r = check::check_forest_split_oracle();
  EXPECT_GE(r.cases, 20);
  EXPECT_TRUE(r.ok()) << r.failure;
}

TEST(Forest, LeavesHoldTheirSampleCounts) {
  const auto fx = check::forest_fixtures()[4];
  const auto m = forest_fit(fx.x, fx.y, fx.n_classes, single_tree());
  double total = 0;
  for (const auto& n : m.trees[0].nodes)
    if (n.is_leaf()) {
      EXPECT_EQ(n.class_counts.size(), 3u);
      for (double c : n.class_counts) total += c;
    }
  EXPECT_EQ(total, double(fx.x.rows()));
}

TEST(Forest, DeterministicForFixedSeedAndWorkerCount) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  Matrix x(200, 6);
  std::vector<int> y(200);
  for (int i = 0; i < 200; ++i) {
    for (int j = 0; j < 6; ++j) x(i, j) = u(rng);
    y[i] = (x(i, 0) + x(i, 3) > 1.0) + (x(i, 5) > 0.8);
  }
  ForestConfig cfg;
  cfg.n_trees = 25;
  cfg.workers = 1;
  const auto a = forest_fit(x, y, 3, cfg);
  cfg.workers = 4;
  const auto b = forest_fit(x, y, 3, cfg);
  EXPECT_EQ(a.trees, b.trees);
  cfg.seed = 14;
  EXPECT_NE(forest_fit(x, y, 3, cfg).trees, a.trees);
  const auto pa = forest_predict(a, x);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double s = 0;
    for (int c = 0; c < 3; ++c) s += pa.vote_fractions(r, c);
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Forest, VoteTiesGoToSmallerClass) {
  ForestModel m;
  m.n_classes = 2;
  m.n_features = 1;
  DecisionTree t0, t1;
  t0.nodes.push_back(TreeNode{-1, 0, -1, -1, {0, 3}});
  t1.nodes.push_back(TreeNode{-1, 0, -1, -1, {2, 1}});
  m.trees = {t0, t1};
  EXPECT_EQ(forest_predict(m, Matrix::from_rows({{0.0}})).labels[0], 0);
}

TEST(Forest, InputErrors) {
  EXPECT_THROW(forest_fit(Matrix(), std::vector<int>{}, 2, ForestConfig{}), ValidationError);
  EXPECT_THROW(forest_fit(Matrix::from_rows({{1}}), std::vector<int>{3}, 2, ForestConfig{}), ValidationError);
  const auto m = forest_fit(Matrix::from_rows({{1}, {2}}), std::vector<int>{0, 1}, 2, ForestConfig{});
  EXPECT_THROW(forest_predict(m, Matrix::from_rows({{1, 2}})), DimensionError);
}

TEST(Forest, JsonRoundTrip) {
  const auto fx = check::forest_fixtures()[4];
  ForestConfig cfg;
  cfg.n_trees = 7;
  const auto m = forest_fit(fx.x, fx.y, fx.n_classes, cfg);
  nlohmann::json j = m;
  EXPECT_EQ(nlohmann::json::parse(j.dump()).get<ForestModel>(), m);
}
