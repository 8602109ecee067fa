#include "openset/metrics.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "openset/error.hpp"
#include "openset/io.hpp"
#include "oracles.hpp"

namespace openset {
namespace {

TEST(Auc, PerfectSeparation) {
  const std::vector<double> s = {0, 1, 2, 3};
  EXPECT_DOUBLE_EQ(binary_auc(s, {false, false, true, true}), 1.0);
  EXPECT_DOUBLE_EQ(binary_auc(s, {true, true, false, false}), 0.0);
}

TEST(Auc, AllTiesIsOneHalf) {
  const std::vector<double> s(7, 3.25);
  EXPECT_DOUBLE_EQ(binary_auc(s, {true, false, true, false, true, true, false}), 0.5);
}

TEST(Auc, HandCountedCase) {
  // Known {1, 3, 4} against unknown {2, 0}: pairs won 1 + 2 + 2 of 6. A tie counts one half.
  const std::vector<double> s = {1, 3, 4, 2, 0};
  EXPECT_DOUBLE_EQ(binary_auc(s, {true, true, true, false, false}), 5.0 / 6.0);
  const std::vector<double> t = {1, 2, 4, 2, 0};
  EXPECT_DOUBLE_EQ(binary_auc(t, {true, true, true, false, false}), 4.5 / 6.0);
}

TEST(Auc, MatchesPairCountingWithTies) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> v(0, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 60;
    std::vector<double> s(n);
    std::vector<bool> k(n);
    for (int i = 0; i < n; ++i) {
      s[i] = v(rng);
      k[i] = rng() % 2;
    }
    k[0] = true;
    k[1] = false;
    ASSERT_NEAR(binary_auc(s, k), oracle::pair_count_auc(s, k), 1e-12);
  }
}

TEST(Auc, SwappingGroupsComplements) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  std::vector<double> s(100);
  std::vector<bool> k(100), flipped(100);
  for (int i = 0; i < 100; ++i) {
    s[i] = std::round(g(rng) * 3);
    k[i] = i % 4 != 0;
    flipped[i] = !k[i];
  }
  EXPECT_NEAR(binary_auc(s, flipped), 1.0 - binary_auc(s, k), 1e-12);
}

TEST(Auc, InvariantUnderIncreasingTransform) {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> g;
  std::vector<double> s(80), t(80);
  std::vector<bool> k(80);
  for (int i = 0; i < 80; ++i) {
    s[i] = g(rng);
    t[i] = std::exp(2.0 * s[i]) - 4.0;
    k[i] = i % 3 != 0;
  }
  EXPECT_DOUBLE_EQ(binary_auc(s, k), binary_auc(t, k));
}

TEST(Auc, Errors) {
  const std::vector<double> s = {1, 2};
  EXPECT_THROW(binary_auc(s, {true, true}), DataError);
  EXPECT_THROW(binary_auc(s, {true}), DataError);
}

TEST(F1, HandComputedMacro) {
  // Class 0: 2/3, class 1: 2/3, class 2: 1; UNKNOWN absent everywhere.
  const std::vector<int> truth = {0, 0, 1, 2}, pred = {0, 1, 1, 2};
  const auto f = open_set_f1(pred, truth, 3);
  EXPECT_NEAR(f.average, 7.0 / 9.0, 1e-15);
  EXPECT_FALSE(f.per_class[3].has_value());
  // With C = 2 the label 2 is UNKNOWN and the same counts apply.
  EXPECT_NEAR(open_set_f1(pred, truth, 2).average, 7.0 / 9.0, 1e-15);
  // Micro pools TP = 3, FP = 1, FN = 1.
  EXPECT_NEAR(open_set_f1(pred, truth, 3, F1Averaging::kMicro).average, 6.0 / 8.0, 1e-15);
}

TEST(F1, UnknownTruthMapsToUnknownClass) {
  const std::vector<int> truth = {-1, -1, 0}, pred = {1, 0, 0};
  const auto f = open_set_f1(pred, truth, 1);
  // Class 0: TP 1, FP 1 -> 2/3. UNKNOWN: TP 1, FN 1 -> 2/3.
  EXPECT_NEAR(f.average, 2.0 / 3.0, 1e-15);
}

TEST(F1, MatchesCountingOracle) {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> cls(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ScoreRecord> recs;
    std::vector<oracle::LabeledScore> lab;
    for (std::uint32_t i = 0; i < 40; ++i) {
      const int truth = i % 4 == 0 ? -1 : cls(rng);
      const int pred = cls(rng);
      const double s = g(rng);
      recs.push_back({i, truth, pred, s, s});
      lab.push_back({s, truth, pred});
    }
    const double tau = g(rng);
    ASSERT_NEAR(evaluate(recs, ThresholdPolicy::global(tau), 4).macro_f1, oracle::macro_f1(lab, tau, 4), 1e-12);
  }
}

TEST(Evaluate, AcceptAllIsClosedSetBehaviour) {
  std::vector<ScoreRecord> recs = {{0, 0, 0, 0, 1}, {1, 1, 0, 0, 2}, {2, -1, 1, 0, -3}, {3, 1, 1, 0, 0}};
  const auto rep = evaluate(recs, ThresholdPolicy::global(-INFINITY), 2);
  EXPECT_EQ(rep.n_known, 3u);
  EXPECT_EQ(rep.n_unknown, 1u);
  EXPECT_DOUBLE_EQ(rep.kkc_accuracy, rep.closed_set_accuracy);
  EXPECT_DOUBLE_EQ(rep.closed_set_accuracy, 2.0 / 3.0);
  EXPECT_EQ(rep.confusion.predicted(2), 0);
  EXPECT_EQ(rep.per_class_f1[2], 0.0);
  EXPECT_DOUBLE_EQ(rep.auc, 1.0);
}

TEST(Evaluate, AucDoesNotDependOnGlobalCutoff) {
  std::mt19937_64 rng(45);
  std::normal_distribution<double> g;
  std::vector<ScoreRecord> recs;
  for (std::uint32_t i = 0; i < 50; ++i) recs.push_back({i, i % 5 == 0 ? -1 : 0, 0, g(rng), g(rng)});
  EXPECT_EQ(evaluate(recs, ThresholdPolicy::global(-1), 1).auc, evaluate(recs, ThresholdPolicy::global(2), 1).auc);
}

TEST(Roc, EndsAtOneOne) {
  const std::vector<double> s = {3, 1, 2, 2};
  const auto roc = roc_curve(s, {true, false, true, false});
  ASSERT_EQ(roc.size(), 4u);
  EXPECT_DOUBLE_EQ(roc.front().tpr, 0.0);
  EXPECT_DOUBLE_EQ(roc[2].fpr, 0.5);
  EXPECT_DOUBLE_EQ(roc[2].tpr, 1.0);
  EXPECT_DOUBLE_EQ(roc.back().fpr, 1.0);
  EXPECT_DOUBLE_EQ(roc.back().tpr, 1.0);
}

TEST(Fixture, MatchesIndependentGolden) {
  const std::string dir = OPENSET_FIXTURE_DIR;
  const auto recs = read_scores_csv(dir + "/scores_30.csv");
  const auto golden = read_json(dir + "/scores_30_golden.json");
  ASSERT_EQ(recs.size(), 30u);
  const int C = golden.at("num_classes").get<int>();
  const auto rep = evaluate(recs, ThresholdPolicy::global(golden.at("tau").get<double>()), C);
  EXPECT_NEAR(rep.auc, golden.at("auc").get<double>(), 1e-12);
  EXPECT_NEAR(rep.macro_f1, golden.at("macro_f1").get<double>(), 1e-12);
  EXPECT_NEAR(rep.kkc_accuracy, golden.at("kkc_accuracy").get<double>(), 1e-12);
  const auto micro = evaluate(recs, ThresholdPolicy::global(golden.at("tau").get<double>()), C, F1Averaging::kMicro);
  EXPECT_NEAR(micro.macro_f1, golden.at("micro_f1").get<double>(), 1e-12);
}

}  // namespace
}  // namespace openset
