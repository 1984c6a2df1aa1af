#include <gtest/gtest.h>

#include "eskin/learners/linear.hpp"
#include "support/oracles.hpp"

using namespace eskin;

TEST(Ols, ExactLine) {
  const auto m = ols_fit(Matrix::from_rows({{0}, {1}}), std::vector<double>{0, 1});
  EXPECT_NEAR(m.weights[0], 1.0, 1e-12);
  EXPECT_NEAR(m.intercept, 0.0, 1e-12);
  EXPECT_NEAR(ols_predict(m, Matrix::from_rows({{2}}))[0], 2.0, 1e-12);
}

TEST(Ols, ThreePointHandSolution) {
  const auto m = ols_fit(Matrix::from_rows({{0}, {1}, {2}}), std::vector<double>{0, 2, 3});
  EXPECT_NEAR(m.weights[0], 1.5, 1e-12);
  EXPECT_NEAR(m.intercept, 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(ols_predict(m, Matrix::from_rows({{1}}))[0], 5.0 / 3.0, 1e-12);
}

TEST(Ols, ConstantColumnIsSingular) {
  EXPECT_THROW(ols_fit(Matrix::from_rows({{1, 0}, {1, 1}, {1, 2}, {1, 3}}), std::vector<double>{0, 1, 2, 3}),
               SingularDesignError);
  EXPECT_THROW(ols_fit(Matrix::from_rows({{0, 0}, {1, 2}, {2, 4}, {3, 6}}), std::vector<double>{0, 1, 2, 2}),
               SingularDesignError);
  EXPECT_THROW(ols_fit(Matrix::from_rows({{0, 1}, {1, 2}}), std::vector<double>{0, 1}), SingularDesignError);
}

TEST(Ols, PredictEdgeCases) {
  const LinearModel m{{1.0, 2.0}, 0.5};
  EXPECT_TRUE(ols_predict(m, Matrix()).empty());
  EXPECT_THROW(ols_predict(m, Matrix::from_rows({{1.0}})), DimensionError);
}

TEST(Ols, MatchesNormalEquationOracle) {
  const auto r = check::check_ols_oracle(200, 17);
  EXPECT_EQ(r.cases, 200);
  EXPECT_TRUE(r.ok()) << r.failure;
}

TEST(Ols, JsonRoundTripIsExact) {
  const auto m = ols_fit(Matrix::from_rows({{0.1, 3}, {1.7, 2}, {2.2, 9}, {0.4, 4}}), std::vector<double>{0.3, 2, 3, 1});
  nlohmann::json j = m;
  const auto back = nlohmann::json::parse(j.dump()).get<LinearModel>();
  EXPECT_EQ(back.weights, m.weights);
  EXPECT_EQ(back.intercept, m.intercept);
}
