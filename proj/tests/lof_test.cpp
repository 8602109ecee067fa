#include "openset/lof.hpp"

#include <random>

#include <gtest/gtest.h>

#include "openset/error.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace openset {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(Lof, UnitSquareIsSymmetric) {
  Matrix X(4, 2);
  X << 0, 0, 1, 0, 0, 1, 1, 1;
  const auto m = lof_fit(X, 2);
  for (int i = 1; i < 4; ++i) EXPECT_DOUBLE_EQ(m.lrd(i), m.lrd(0));
  EXPECT_DOUBLE_EQ(m.k_distance(0), 1.0);
}

TEST(Lof, MatchesBruteForceReference) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 30 + 10 * trial;
    const int k = 1 + trial % 7;
    const Matrix X = testutil::gaussian_matrix(n, 3, rng);
    const auto rows = testutil::to_rows(X);
    const auto m = lof_fit(X, k);
    const auto ref = oracle::lof_reference(rows, k);
    for (int i = 0; i < n; ++i) {
      ASSERT_NEAR(m.lrd(i), ref.lrd[i], 1e-9);
      ASSERT_NEAR(m.k_distance(i), ref.k_distance[i], 1e-12);
      ASSERT_EQ(m.neighbors[i], ref.neighbors[i]);
    }
    const Matrix Q = testutil::gaussian_matrix(5, 3, rng, 2.0);
    for (int q = 0; q < 5; ++q) {
      EXPECT_NEAR(lof_factor(m, Q.row(q).transpose()),
                  oracle::lof_reference_query(rows, ref, k, testutil::to_rows(Q)[q]), 1e-9);
    }
  }
}

TEST(Lof, DuplicatesStayFinite) {
  Matrix X(6, 2);
  X << 0, 0, 0, 0, 0, 0, 0, 0, 5, 5, 5, 6;
  const auto m = lof_fit(X, 3);
  for (int i = 0; i < 6; ++i) {
    EXPECT_TRUE(std::isfinite(m.lrd(i)));
    EXPECT_GT(m.lrd(i), 0.0);
  }
  EXPECT_DOUBLE_EQ(m.lrd(0), 1.0 / kLofZeroReachEpsilon);
  EXPECT_TRUE(std::isfinite(lof_score(m, Vector::Zero(2))));
}

TEST(Lof, GridInteriorPointScoresNearOne) {
  Matrix X(100, 2);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) X.row(i * 10 + j) << i, j;
  const auto m = lof_fit(X, 4);
  const auto ref = oracle::lof_reference(testutil::to_rows(X), 4);
  const double lof = lof_factor(m, vec({5, 5}));
  EXPECT_NEAR(lof, oracle::lof_reference_query(testutil::to_rows(X), ref, 4, {5, 5}), 1e-12);
  EXPECT_GE(lof, 0.9);
  EXPECT_LE(lof, 1.1);
  EXPECT_NEAR(lof_score(m, vec({5, 5})), -1.0, 0.1);
}

TEST(Lof, FarQueryIsStrongOutlier) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix X(50, 2);
  for (int i = 0; i < 50; ++i) X.row(i) << u(rng), u(rng);
  const auto m = lof_fit(X, 5);
  const auto ref = oracle::lof_reference(testutil::to_rows(X), 5);
  const double lof = lof_factor(m, vec({100.5, 0.5}));
  EXPECT_NEAR(lof, oracle::lof_reference_query(testutil::to_rows(X), ref, 5, {100.5, 0.5}), 1e-9);
  EXPECT_GT(lof, 10.0);
  EXPECT_LT(lof_score(m, vec({100.5, 0.5})), -10.0);
}

TEST(Lof, SymmetricQueriesScoreEqually) {
  Matrix X(8, 2);
  X << 1, 0, -1, 0, 0, 1, 0, -1, 2, 2, -2, 2, 2, -2, -2, -2;
  const auto m = lof_fit(X, 3);
  EXPECT_NEAR(lof_score(m, vec({0.3, 0.7})), lof_score(m, vec({-0.3, -0.7})), 1e-12);
  EXPECT_NEAR(lof_score(m, vec({3, 0})), lof_score(m, vec({-3, 0})), 1e-12);
}

TEST(Lof, Errors) {
  EXPECT_THROW(lof_fit(Matrix::Random(3, 2), 3), DataError);
  EXPECT_THROW(lof_fit(Matrix::Random(3, 2), 0), DataError);
  const auto m = lof_fit(Matrix::Random(5, 2), 2);
  EXPECT_THROW(lof_score(m, Vector::Zero(3)), DataError);
}

}  // namespace
}  // namespace openset
