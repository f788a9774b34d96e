#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fasim/error.hpp"
#include "fasim/lp.hpp"
#include "test_support.hpp"
#include "vertex_oracle.hpp"

namespace fasim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Inequality form of x >= 0, lo <= A x <= hi for the vertex oracle.
std::optional<double> oracle(const Matrix& A, const Vector& c, const Vector& lo, const Vector& hi) {
  const Index m = A.rows();
  const Index N = A.cols();
  std::vector<Vector> rows;
  std::vector<double> rhs;
  for (Index j = 0; j < N; ++j) {
    Vector r = Vector::Zero(N);
    r[j] = -1.0;
    rows.push_back(r);
    rhs.push_back(0.0);
  }
  for (Index i = 0; i < m; ++i) {
    if (std::isfinite(hi[i])) {
      rows.push_back(A.row(i).transpose());
      rhs.push_back(hi[i]);
    }
    if (std::isfinite(lo[i])) {
      rows.push_back(-A.row(i).transpose());
      rhs.push_back(-lo[i]);
    }
  }
  Matrix G(static_cast<Index>(rows.size()), N);
  Vector g(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    G.row(static_cast<Index>(k)) = rows[k].transpose();
    g[static_cast<Index>(k)] = rhs[k];
  }
  return testing::vertex_minimum(G, g, c);
}

TEST(BoundedLp, TinyHandProblem) {
  // min x1 + 2 x2  s.t.  x1 + x2 >= 1,  x1 <= 0.25
  Matrix A(2, 2);
  A << 1, 1, 1, 0;
  Vector c(2), lo(2), hi(2);
  c << 1, 2;
  lo << 1, -kInf;
  hi << kInf, 0.25;
  const auto r = solve_bounded_lp(A, c, lo, hi);
  EXPECT_NEAR(r.x[0], 0.25, 1e-12);
  EXPECT_NEAR(r.x[1], 0.75, 1e-12);
  EXPECT_NEAR(r.objective, 1.75, 1e-12);
}

TEST(BoundedLp, ZeroIsOptimalWhenFeasible) {
  const Matrix A = testing::random_matrix(4, 6, 1);
  const auto r = solve_bounded_lp(A, Vector::Ones(6), Vector::Constant(4, -1), Vector::Constant(4, 1));
  EXPECT_EQ(r.objective, 0.0);
  EXPECT_EQ(r.x.cwiseAbs().maxCoeff(), 0.0);
}

TEST(BoundedLp, DetectsInfeasibility) {
  Matrix A(2, 1);
  A << 1, 1;
  Vector lo(2), hi(2);
  lo << 2, -kInf;
  hi << kInf, 1;
  try {
    solve_bounded_lp(A, Vector::Ones(1), lo, hi);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Infeasible);
  }
  Vector bad_lo(1), bad_hi(1);
  bad_lo << 1;
  bad_hi << 0;
  EXPECT_THROW(solve_bounded_lp(Matrix::Ones(1, 1), Vector::Ones(1), bad_lo, bad_hi), Error);
}

TEST(BoundedLp, ValidatesArguments) {
  const Matrix A = Matrix::Ones(2, 2);
  EXPECT_THROW(solve_bounded_lp(A, -Vector::Ones(2), Vector::Zero(2), Vector::Ones(2)), Error);
  EXPECT_THROW(solve_bounded_lp(A, Vector::Ones(3), Vector::Zero(2), Vector::Ones(2)), Error);
  EXPECT_THROW(solve_bounded_lp(A, Vector::Ones(2), Vector::Zero(1), Vector::Ones(2)), Error);
}

TEST(BoundedLp, MatchesVertexEnumeration) {
  int solved = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    RandomStream rng({seed, 5});
    const Index m = 1 + static_cast<Index>(rng.below(4));
    const Index N = 1 + static_cast<Index>(rng.below(4));
    const Matrix A = testing::random_matrix(m, N, 300 + seed);
    Vector c(N), lo(m), hi(m);
    for (Index j = 0; j < N; ++j) c[j] = rng.uniform(0.0, 2.0);
    for (Index i = 0; i < m; ++i) {
      const double centre = rng.uniform(-2.0, 2.0);
      const double width = rng.uniform(0.0, 1.0);
      lo[i] = rng.uniform() < 0.2 ? -kInf : centre - width;
      hi[i] = rng.uniform() < 0.2 ? kInf : centre + width;
    }
    const auto expected = oracle(A, c, lo, hi);
    if (!expected) {
      EXPECT_THROW(solve_bounded_lp(A, c, lo, hi), Error) << seed;
      continue;
    }
    const auto r = solve_bounded_lp(A, c, lo, hi);
    EXPECT_NEAR(r.objective, *expected, 1e-8) << seed;
    EXPECT_GE(r.x.minCoeff(), -1e-10);
    const Vector act = A * r.x;
    for (Index i = 0; i < m; ++i) {
      EXPECT_GE(act[i], lo[i] - 1e-9);
      EXPECT_LE(act[i], hi[i] + 1e-9);
    }
    ++solved;
  }
  EXPECT_GT(solved, 20);
}

TEST(BoundedLp, TransposeOverloadAgrees) {
  const Matrix A = testing::random_matrix(6, 9, 7);
  const Vector c = Vector::Ones(9);
  // centred on the activity of a nonnegative point so the problem is feasible
  const Vector x0 = testing::random_vector(9, 8).cwiseAbs();
  const Vector lo = (A * x0).array() - 0.1, hi = (A * x0).array() + 0.1;
  const auto a = solve_bounded_lp(A, c, lo, hi);
  const auto b = solve_bounded_lp(A, A.transpose(), c, lo, hi);
  EXPECT_EQ(a.x, b.x);
  EXPECT_GT(a.objective, 0.0);
}

}  // namespace
}  // namespace fasim
