#include <gtest/gtest.h>

#include <cmath>

#include "fasim/error.hpp"
#include "fasim/lasso.hpp"
#include "lasso_oracle.hpp"
#include "test_support.hpp"

namespace fasim {
namespace {

using testing::kkt_violation;
using testing::proximal_gradient_lasso;
using testing::random_matrix;
using testing::random_vector;

TEST(SoftThreshold, Shrinks) {
  EXPECT_DOUBLE_EQ(soft_threshold(0.5, 0.1), 0.4);
  EXPECT_DOUBLE_EQ(soft_threshold(-0.5, 0.1), -0.4);
  EXPECT_DOUBLE_EQ(soft_threshold(0.05, 0.1), 0.0);
}

TEST(LassoFit, OrthonormalDesignClosedForm) {
  // U^T U / n = I with n = 4
  Matrix U(4, 2);
  U << 1, 1, 1, -1, -1, 1, -1, -1;
  Vector z(2);
  z << 0.5, 0.05;
  const Vector y = U * z;  // U^T y / n = z
  const auto fit = lasso_fit(U, y, 0.1);
  ASSERT_TRUE(fit.converged);
  EXPECT_NEAR(fit.beta[0], 0.4, 1e-12);
  EXPECT_EQ(fit.beta[1], 0.0);
}

TEST(LassoFit, NullModelThreshold) {
  const Matrix U = random_matrix(30, 8, 1);
  const Vector y = random_vector(30, 2);
  const double lmax = lambda_max(U, y);
  EXPECT_EQ(lasso_fit(U, y, lmax).beta.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(lasso_fit(U, y, 2.0 * lmax).beta.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(lasso_fit(U, y, 0.9 * lmax).beta.cwiseAbs().maxCoeff(), 0.0);
}

TEST(LassoFit, MatchesProximalGradientOracle) {
  const Matrix U = random_matrix(20, 5, 3);
  Vector beta(5);
  beta << 1.0, 0, -0.5, 0, 0;
  const Vector y = U * beta + 0.3 * random_vector(20, 4);
  const auto fit = lasso_fit(U, y, 0.1);
  const Vector oracle = proximal_gradient_lasso(U, y, 0.1, Vector::Ones(5));
  EXPECT_NEAR(fit.objective, lasso_objective(U, y, oracle, 0.1), 1e-9);
  EXPECT_LT((fit.beta - oracle).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT(kkt_violation(U, y, fit.beta, 0.1), 1e-6);
}

// Fifty random instances with n <= 50, p <= 20, including p > n.
TEST(LassoFit, KktCertificateOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomStream rng({seed, 99});
    const Index n = 5 + static_cast<Index>(rng.below(46));
    const Index p = 1 + static_cast<Index>(rng.below(20));
    const Matrix U = random_matrix(n, p, 1000 + seed);
    const Vector y = random_vector(n, 2000 + seed);
    const double lambda = lambda_max(U, y) * rng.uniform(0.05, 0.9);
    const auto fit = lasso_fit(U, y, lambda);
    ASSERT_TRUE(fit.converged) << seed;
    EXPECT_LT(kkt_violation(U, y, fit.beta, lambda), 1e-6) << seed;
    const Vector oracle = proximal_gradient_lasso(U, y, lambda, Vector::Ones(p));
    EXPECT_NEAR(fit.objective, lasso_objective(U, y, oracle, lambda), 1e-6) << seed;
    EXPECT_LE(fit.objective, lasso_objective(U, y, oracle, lambda) + 1e-10) << seed;
  }
}

TEST(LassoFit, ObjectiveIsNonincreasingInSweeps) {
  const Matrix U = random_matrix(40, 30, 5);
  const Vector y = random_vector(40, 6);
  const double lambda = 0.05;
  double previous = lasso_objective(U, y, Vector::Zero(30), lambda);
  Vector beta = Vector::Zero(30);
  for (int sweeps = 1; sweeps <= 40; ++sweeps) {
    LassoOptions one;
    one.max_sweeps = 1;
    const auto fit = lasso_fit(U, y, lambda, &beta, one);
    EXPECT_LE(fit.objective, previous + 1e-14);
    previous = fit.objective;
    beta = fit.beta;
  }
}

TEST(LassoFit, WarmStartReachesTheSameSolution) {
  const Matrix U = random_matrix(30, 12, 7);
  const Vector y = random_vector(30, 8);
  const auto cold = lasso_fit(U, y, 0.08);
  const Vector start = Vector::Constant(12, 0.3);
  const auto warm = lasso_fit(U, y, 0.08, &start);
  EXPECT_LT((cold.beta - warm.beta).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(LassoFit, NonConvergenceIsReported) {
  const Matrix U = random_matrix(30, 25, 9);
  const Vector y = random_vector(30, 10);
  LassoOptions opt;
  opt.max_sweeps = 1;
  opt.tolerance = 1e-16;
  const auto fit = lasso_fit(U, y, 0.001, nullptr, opt);
  EXPECT_FALSE(fit.converged);
  EXPECT_FALSE(fit.diagnostic.empty());
}

TEST(LassoFit, ZeroColumnsStayZero) {
  Matrix U = random_matrix(20, 4, 11);
  U.col(2).setZero();
  const auto fit = lasso_fit(U, random_vector(20, 12), 0.01);
  EXPECT_EQ(fit.beta[2], 0.0);
}

TEST(LassoFit, InvalidArguments) {
  const Matrix U = random_matrix(10, 3, 1);
  EXPECT_THROW(lasso_fit(U, Vector::Zero(9), 0.1), Error);
  EXPECT_THROW(lasso_fit(U, Vector::Zero(10), 0.0), Error);
  const Vector bad = Vector::Zero(2);
  EXPECT_THROW(lasso_fit(U, Vector::Zero(10), 0.1, &bad), Error);
}

}  // namespace
}  // namespace fasim
