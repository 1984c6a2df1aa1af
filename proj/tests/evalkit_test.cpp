#include <gtest/gtest.h>

#include <map>
#include <set>

#include "eskin/evalkit.hpp"
#include "eskin/random.hpp"
#include "support/small_data.hpp"

using namespace eskin;

namespace {

std::vector<long> labels(std::initializer_list<std::pair<long, int>> counts) {
  std::vector<long> out;
  for (auto [label, n] : counts) out.insert(out.end(), n, label);
  return out;
}

std::map<long, int> stratum_counts(const FoldPlan& plan, int fold) {
  std::map<long, int> out;
  for (auto i : plan.test_indices(fold)) ++out[plan.strata[i]];
  return out;
}

PipelineConfig small_config() {
  PipelineConfig c;
  c.require_full_grid = false;
  c.forest.n_trees = 10;
  return c;
}

}  // namespace

TEST(StratifiedKFold, TwoBalancedClassesTenFolds) {
  const auto strata = labels({{0, 10}, {1, 10}});
  const auto plan = stratified_kfold(strata, 10, 3);
  for (int f = 0; f < 10; ++f) {
    const auto c = stratum_counts(plan, f);
    EXPECT_EQ(c.at(0), 1);
    EXPECT_EQ(c.at(1), 1);
  }
}

TEST(StratifiedKFold, UnevenStrataDealtRoundRobin) {
  const auto strata = labels({{0, 7}, {1, 3}});
  const auto plan = stratified_kfold(strata, 2, 11);
  EXPECT_EQ(stratum_counts(plan, 0), (std::map<long, int>{{0, 4}, {1, 2}}));
  EXPECT_EQ(stratum_counts(plan, 1), (std::map<long, int>{{0, 3}, {1, 1}}));
}

TEST(StratifiedKFold, RejectsSingleFold) {
  const auto strata = labels({{0, 4}});
  EXPECT_THROW(stratified_kfold(strata, 1, 0), UsageError);
  EXPECT_THROW(stratified_kfold(strata, 0, 0), UsageError);
}

TEST(StratifiedKFold, PartitionAndBalanceProperties) {
  Rng rng(99);
  for (int c = 0; c < 200; ++c) {
    const int k = std::uniform_int_distribution<int>(2, 10)(rng);
    const int n_strata = std::uniform_int_distribution<int>(1, 6)(rng);
    std::vector<long> strata;
    for (int s = 0; s < n_strata; ++s)
      strata.insert(strata.end(), std::uniform_int_distribution<int>(0, 40)(rng), long(s * 7));
    std::shuffle(strata.begin(), strata.end(), rng);
    const auto plan = stratified_kfold(strata, k, rng());
    std::vector<int> seen(strata.size(), 0);
    for (int f = 0; f < k; ++f) {
      for (auto i : plan.test_indices(f)) ++seen[i];
      const auto train = plan.train_indices(f);
      EXPECT_EQ(train.size() + plan.test_indices(f).size(), strata.size());
    }
    for (int v : seen) ASSERT_EQ(v, 1);
    std::map<long, int> total;
    for (long s : strata) ++total[s];
    for (auto [label, n] : total)
      for (int f = 0; f < k; ++f) {
        const int got = stratum_counts(plan, f)[label];
        ASSERT_GE(got, n / k);
        ASSERT_LE(got, (n + k - 1) / k);
      }
  }
}

TEST(StratifiedKFold, SeedDeterminesPlan) {
  const auto strata = labels({{0, 30}, {1, 17}, {2, 5}});
  EXPECT_EQ(stratified_kfold(strata, 5, 4).assignments, stratified_kfold(strata, 5, 4).assignments);
  EXPECT_NE(stratified_kfold(strata, 5, 4).assignments, stratified_kfold(strata, 5, 5).assignments);
}

TEST(Metrics, R2Examples) {
  const std::vector<double> y{1, 2, 3};
  EXPECT_DOUBLE_EQ(r2(y, std::vector<double>{1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(r2(y, std::vector<double>{2, 2, 2}), 0.0);
  EXPECT_DOUBLE_EQ(r2(y, std::vector<double>{1.5, 2, 2.5}), 0.75);
  EXPECT_DOUBLE_EQ(r2(std::vector<double>{0, 2}, std::vector<double>{1, 2}), 0.5);
  EXPECT_DOUBLE_EQ(r2(std::vector<double>{0, 2}, std::vector<double>{2, 0}), -3.0);
  EXPECT_THROW(r2(std::vector<double>{2, 2}, std::vector<double>{2, 2}), UndefinedMetricError);
  EXPECT_THROW(r2(std::vector<double>{}, std::vector<double>{}), UndefinedMetricError);
  EXPECT_THROW(r2(std::vector<double>{1, 2}, std::vector<double>{1}), DimensionError);
}

TEST(Metrics, MseExamples) {
  EXPECT_DOUBLE_EQ(mse(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(mse(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4}), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(mse(std::vector<double>{0, 0}, std::vector<double>{2, -2}), 4.0);
  EXPECT_THROW(mse(std::vector<double>{}, std::vector<double>{}), UndefinedMetricError);
}

TEST(Metrics, ConfusionExample) {
  const auto cm = confusion(std::vector<int>{0, 0, 1}, std::vector<int>{0, 1, 1}, 2);
  EXPECT_EQ(cm.counts, (std::vector<std::vector<long>>{{1, 1}, {0, 1}}));
  EXPECT_EQ(cm.labels, (std::vector<std::string>{"0", "1"}));
  EXPECT_DOUBLE_EQ(cm.accuracy(), 2.0 / 3.0);
  EXPECT_THROW(confusion(std::vector<int>{0, 2}, std::vector<int>{0, 1}, 2), ValidationError);
}

TEST(Metrics, ConfusionRecountOracle) {
  Rng rng(5);
  for (int c = 0; c < 100; ++c) {
    const int n_classes = std::uniform_int_distribution<int>(1, 8)(rng);
    const int n = std::uniform_int_distribution<int>(1, 60)(rng);
    std::uniform_int_distribution<int> lab(0, n_classes - 1);
    std::vector<int> t(n), p(n);
    for (int i = 0; i < n; ++i) {
      t[i] = lab(rng);
      p[i] = lab(rng);
    }
    const auto cm = confusion(t, p, n_classes);
    for (int a = 0; a < n_classes; ++a)
      for (int b = 0; b < n_classes; ++b) {
        long want = 0;
        for (int i = 0; i < n; ++i) want += t[i] == a && p[i] == b;
        ASSERT_EQ(cm.counts[a][b], want);
      }
    ASSERT_EQ(cm.total(), n);
    ASSERT_DOUBLE_EQ(cm.accuracy(), accuracy(t, p));
    ASSERT_DOUBLE_EQ(cm.accuracy(), double(cm.trace()) / double(cm.total()));
  }
}

TEST(Metrics, SummaryUsesSampleStdev) {
  const auto s = summarize({1.0, 2.0, std::nullopt, 3.0});
  EXPECT_DOUBLE_EQ(*s.mean, 2.0);
  EXPECT_DOUBLE_EQ(*s.stdev, 1.0);
  EXPECT_FALSE(summarize({4.0}).stdev);
  EXPECT_FALSE(summarize({}).mean);
}

TEST(CrossValidate, EverySampleTestedOnce) {
  const auto ds = check::as_dataset(check::small_single({{2, 2}, {8, 8}}, 4));
  const auto rep = cross_validate(ds, CvConfig{2, 1, 1}, small_config());
  EXPECT_EQ(rep.n_samples, 12u);
  EXPECT_EQ(rep.folds.size(), 2u);
  EXPECT_TRUE(all_tested_once(rep.times_tested));
  EXPECT_EQ(rep.detection_cm.total(), 12);
  EXPECT_EQ(rep.row_cm.total(), 8);
  EXPECT_FALSE(rep.stretch.r2);
  EXPECT_DOUBLE_EQ(*rep.detection_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(*rep.row_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(*rep.col_accuracy, 1.0);
  const auto j = report_to_json(rep);
  EXPECT_EQ(j["kind"], "single-contact-cv");
  EXPECT_TRUE(j["every_sample_tested_once"].get<bool>());
  EXPECT_TRUE(j["pooled"]["stretch"]["r2"].is_null());
}

TEST(CrossValidate, Deterministic) {
  const auto ds = check::as_dataset(check::small_single({{2, 2}, {8, 8}, {5, 1}}, 4));
  const auto a = report_to_json(cross_validate(ds, CvConfig{2, 9, 1}, small_config())).dump();
  const auto b = report_to_json(cross_validate(ds, CvConfig{2, 9, 2}, small_config())).dump();
  EXPECT_EQ(a, b);
}

TEST(CrossValidate, CoverageFailureNamesFold) {
  auto samples = check::small_single({{2, 2}}, 3);
  samples.push_back(check::small_single({{9, 9}}, 1, 1.0, 8).back());
  try {
    cross_validate(check::as_dataset(samples), CvConfig{2, 1, 1}, small_config());
    FAIL() << "expected CoverageError";
  } catch (const CoverageError& e) {
    EXPECT_NE(std::string(e.what()).find("fold"), std::string::npos);
  }
}

TEST(CrossValidate, RejectsEmptyAndWrongSchema) {
  EXPECT_THROW(cross_validate(check::as_dataset({}), CvConfig{2, 1, 1}, small_config()), CoverageError);
  EXPECT_THROW(cross_validate_two(make_dataset(std::vector<TwoContactSample>{}, DatasetMeta{}), CvConfig{2, 1, 1},
                                  small_config()),
               CoverageError);
  EXPECT_THROW(cross_validate_two(check::as_dataset(check::small_single({{2, 2}}, 2)), CvConfig{2, 1, 1},
                                  small_config()),
               SchemaError);
}

TEST(CrossValidateTwo, SmallGrid) {
  const auto ds = check::small_two();
  const auto rep = cross_validate_two(ds, CvConfig{2, 3, 1}, small_config());
  EXPECT_EQ(rep.n_samples, 24u);
  EXPECT_TRUE(all_tested_once(rep.times_tested));
  EXPECT_EQ(rep.x_axes, (std::vector<int>{1, 6}));
  EXPECT_EQ(rep.double_affect.n_shared + rep.double_affect.n_disjoint, 24u);
  // Pairs among {1,6}x{1,6}: 4 share a terminal, 2 are diagonal.
  EXPECT_EQ(rep.double_affect.n_shared, 16u);
  EXPECT_EQ(rep.x1_cm.total(), 24);
  const auto j = report_to_json(rep);
  EXPECT_EQ(j["kind"], "two-contact-cv");
  EXPECT_EQ(j["double_affect"]["n_disjoint"], 8);
}

TEST(Serialisation, ConfusionCsvAndPgm) {
  const auto cm = confusion(std::vector<int>{0, 0, 1}, std::vector<int>{0, 1, 1}, 2, {"a", "b"});
  std::ostringstream csv;
  write_confusion_csv(cm, csv);
  EXPECT_EQ(csv.str(), "true\\pred,a,b\na,1,1\nb,0,1\n");
  std::ostringstream pgm;
  write_confusion_pgm(cm, pgm, 1);
  EXPECT_EQ(pgm.str(), "P2\n2 2\n255\n128 128\n255 0\n");
}
