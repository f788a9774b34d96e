#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "fasim/data.hpp"
#include "fasim/error.hpp"
#include "test_support.hpp"

namespace fasim {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

TEST(RankTransform, CountsIndicators) {
  const auto h = rank_transform(vec({3.1, -2.0, 5.0}));
  EXPECT_DOUBLE_EQ(h.values[0], 2.0 / 3.0 - 0.5);
  EXPECT_DOUBLE_EQ(h.values[1], 1.0 / 3.0 - 0.5);
  EXPECT_DOUBLE_EQ(h.values[2], 0.5);
  EXPECT_EQ(h.ranks, (std::vector<Index>{2, 1, 3}));
}

TEST(RankTransform, TiesTakeTheMaximalCount) {
  const auto h = rank_transform(vec({7, 7}));
  EXPECT_DOUBLE_EQ(h.values[0], 0.5);
  EXPECT_DOUBLE_EQ(h.values[1], 0.5);

  const auto g = rank_transform(vec({1, 2, 2, 2, 0}));
  EXPECT_EQ(g.ranks, (std::vector<Index>{2, 5, 5, 5, 1}));
}

TEST(RankTransform, IncreasingSequence) {
  const auto h = rank_transform(vec({-4, 0.5, 9, 100}));
  EXPECT_DOUBLE_EQ(h.values[0], -0.25);
  EXPECT_DOUBLE_EQ(h.values[1], 0.0);
  EXPECT_DOUBLE_EQ(h.values[2], 0.25);
  EXPECT_DOUBLE_EQ(h.values[3], 0.5);
}

TEST(RankTransform, MatchesIndicatorDefinitionOnRandomTies) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Vector Y = testing::random_vector(37, seed);
    for (Index i = 0; i < Y.size(); ++i) Y[i] = std::round(2.0 * Y[i]);
    const auto h = rank_transform(Y);
    const double n = static_cast<double>(Y.size());
    for (Index i = 0; i < Y.size(); ++i) {
      Index count = 0;
      for (Index j = 0; j < Y.size(); ++j) count += Y[j] <= Y[i];
      EXPECT_EQ(h.ranks[static_cast<std::size_t>(i)], count);
      EXPECT_NEAR(h.values[i], static_cast<double>(count) / n - 0.5, 1e-15);
      EXPECT_GE(h.values[i], 1.0 / n - 0.5);
      EXPECT_LE(h.values[i], 0.5);
    }
  }
}

TEST(RankTransform, DistinctValuesGiveTheUniformGrid) {
  const Vector Y = testing::random_vector(50, 3);
  Vector sorted = rank_transform(Y).values;
  std::sort(sorted.begin(), sorted.end());
  for (Index k = 0; k < 50; ++k) EXPECT_DOUBLE_EQ(sorted[k], (k + 1) / 50.0 - 0.5);
}

TEST(RankTransform, InvariantUnderIncreasingMaps) {
  const Vector Y = testing::random_vector(64, 9);
  const auto a = rank_transform(Y);
  const auto b = rank_transform(Y.array().exp().matrix());
  const auto c = rank_transform((3.0 * Y.array() + 1.0).cube().matrix());
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.values, c.values);
}

TEST(RankTransform, RejectsNonFinite) {
  Vector Y = vec({1.0, std::numeric_limits<double>::quiet_NaN()});
  try {
    rank_transform(Y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
  EXPECT_THROW(rank_transform(Vector(0)), Error);
  EXPECT_NO_THROW(rank_transform(vec({2.0})));
}

TEST(Dataset, ValidatesShapeAndFiniteness) {
  EXPECT_THROW(Dataset(Matrix::Zero(1, 2), Vector::Zero(1)), Error);
  EXPECT_THROW(Dataset(Matrix::Zero(3, 0), Vector::Zero(3)), Error);
  EXPECT_THROW(Dataset(Matrix::Zero(3, 2), Vector::Zero(4)), Error);
  Matrix X = Matrix::Zero(3, 2);
  X(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(Dataset(X, Vector::Zero(3)), Error);
  Vector Y = Vector::Zero(3);
  Y[2] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Dataset(Matrix::Zero(3, 2), Y), Error);
  EXPECT_THROW(Dataset(Matrix::Zero(3, 2), Vector::Zero(3), {"a"}), Error);
}

TEST(Dataset, NamesFallBackToPositions) {
  const Dataset unnamed(Matrix::Zero(3, 2), Vector::Zero(3));
  EXPECT_EQ(unnamed.name(1), "x1");
  const Dataset named(Matrix::Zero(3, 2), Vector::Zero(3), {"a", "b"});
  EXPECT_EQ(named.name(1), "b");
  const Dataset swapped = named.with_response(Vector::Ones(3));
  EXPECT_EQ(swapped.Y(), Vector::Ones(3));
  EXPECT_EQ(swapped.name(0), "a");
}

TEST(CenterColumns, RemovesMeans) {
  const Matrix X = testing::random_matrix(20, 4, 1).array() + 3.0;
  const auto c = center_columns(X);
  EXPECT_LT(c.centered.colwise().mean().cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(testing::max_abs_diff(c.centered.rowwise() + c.means.transpose(), X), 1e-14);
}

}  // namespace
}  // namespace fasim
