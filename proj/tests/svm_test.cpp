#include <gtest/gtest.h>

#include "eskin/learners/svm.hpp"
#include "support/oracles.hpp"

using namespace eskin;

TEST(Svm, SeparableClusters) {
  const auto fx = check::separable_fixtures()[0];
  const auto m = svm_fit(fx.x, fx.y, check::fixture_config(fx));
  EXPECT_EQ(svm_predict(m, fx.x), fx.y);
  EXPECT_EQ(svm_predict(m, Matrix::from_rows({{-5.0}, {5.0}})), (std::vector<int>{-1, 1}));
}

TEST(Svm, XorWithRbfKernel) {
  const Matrix x = Matrix::from_rows({{0, 0}, {1, 1}, {0, 1}, {1, 0}});
  const std::vector<int> y{-1, -1, 1, 1};
  SvmConfig cfg;
  cfg.gamma = 1.0;
  cfg.c = 10.0;
  cfg.standardize = false;
  const auto m = svm_fit(x, y, cfg);
  EXPECT_EQ(svm_predict(m, x), y);
  // Decision values re-evaluated directly from the stored expansion.
  for (std::size_t r = 0; r < 4; ++r) {
    double s = m.bias;
    for (std::size_t i = 0; i < m.dual_coefs.size(); ++i)
      s += m.dual_coefs[i] * std::exp(-squared_distance(m.support_inputs.row(i), x.row(r)));
    EXPECT_NEAR(s, svm_decision(m, x)[r], 1e-12);
    EXPECT_GT(s * y[r], 0.0);
  }
}

TEST(Svm, SingleClassIsDegenerate) {
  EXPECT_THROW(svm_fit(Matrix::from_rows({{0}, {1}}), std::vector<int>{1, 1}, SvmConfig{}), DegenerateLabelsError);
  EXPECT_THROW(svm_fit(Matrix::from_rows({{0}, {1}}), std::vector<int>{1, 0}, SvmConfig{}), ValidationError);
}

TEST(Svm, FixturesFeasibleAndFullyFitted) {
  const auto r = check::check_svm_fixtures();
  EXPECT_GE(r.cases, 4);
  EXPECT_TRUE(r.ok()) << r.failure;
}

TEST(Svm, DualFeasibilityOnRandomProblems) {
  const auto r = check::check_svm_feasibility(60, 5);
  EXPECT_TRUE(r.ok()) << r.failure;
}

TEST(Svm, InverseFrequencyClassWeights) {
  Matrix x;
  std::vector<int> y;
  for (int i = 0; i < 12; ++i) {
    x.append_row(std::vector<double>{double(i)});
    y.push_back(i < 3 ? 1 : -1);
  }
  const auto m = svm_fit(x, y, SvmConfig{});
  EXPECT_NEAR(m.class_weights.positive, 12.0 / 6.0, 1e-15);
  EXPECT_NEAR(m.class_weights.negative, 12.0 / 18.0, 1e-15);
  SvmConfig fixed;
  fixed.class_weights = ClassWeights{1.0, 3.0};
  EXPECT_EQ(svm_fit(x, y, fixed).class_weights, (ClassWeights{1.0, 3.0}));
}

TEST(Svm, ZeroDecisionGoesPositive) {
  SvmModel m;
  m.scaler = Standardizer::identity(1);
  m.support_inputs = Matrix(0, 1);
  m.bias = 0.0;
  EXPECT_EQ(svm_predict(m, Matrix::from_rows({{3.0}})), std::vector<int>{1});
}

TEST(Svm, DeterministicAndSerialisable) {
  const auto fx = check::separable_fixtures()[2];
  const auto a = svm_fit(fx.x, fx.y, check::fixture_config(fx));
  const auto b = svm_fit(fx.x, fx.y, check::fixture_config(fx));
  EXPECT_EQ(a.dual_coefs, b.dual_coefs);
  EXPECT_EQ(a.bias, b.bias);
  nlohmann::json j = a;
  const auto back = nlohmann::json::parse(j.dump()).get<SvmModel>();
  EXPECT_EQ(svm_decision(back, fx.x), svm_decision(a, fx.x));
  EXPECT_THROW(svm_predict(a, Matrix::from_rows({{1.0}})), DimensionError);
}
