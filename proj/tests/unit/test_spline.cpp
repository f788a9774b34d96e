#include <gtest/gtest.h>

#include <cmath>

#include "fasim/error.hpp"
#include "fasim/spline.hpp"
#include "test_support.hpp"

namespace fasim {
namespace {

Vector grid(Index n, double lo, double hi) {
  return Vector::LinSpaced(n, lo, hi);
}

TEST(SplineBasis, PartitionOfUnity) {
  const SplineLink s(Vector::LinSpaced(4, 0.2, 0.8), 0.0, 1.0, Vector::Zero(8));
  for (double x : {-1.0, 0.0, 0.1, 0.2, 0.45, 0.8, 0.999, 1.0, 3.0}) {
    const Vector b = s.basis(x);
    EXPECT_NEAR(b.sum(), 1.0, 1e-14) << x;
    EXPECT_GE(b.minCoeff(), 0.0);
    EXPECT_LE((b.array() > 0.0).count(), 4);
  }
}

TEST(SplineBasis, ClampsOutsideTheRange) {
  Vector coef(8);
  coef << 1, 2, 3, 4, 5, 6, 7, 8;
  const SplineLink s(Vector::LinSpaced(4, 0.2, 0.8), 0.0, 1.0, coef);
  EXPECT_DOUBLE_EQ(s(-5.0), s(0.0));
  EXPECT_DOUBLE_EQ(s(9.0), s(1.0));
  EXPECT_NEAR(s(0.0), 1.0, 1e-14);  // clamped knots interpolate end coefficients
  EXPECT_NEAR(s(1.0), 8.0, 1e-14);
  EXPECT_THROW(SplineLink(Vector::Zero(1), 0.0, 1.0, Vector::Zero(3)), Error);
  EXPECT_THROW(SplineLink(Vector::Zero(0), 1.0, 0.0, Vector::Zero(4)), Error);
}

TEST(FitLink, ReproducesCubicPolynomials) {
  const Vector x = grid(80, -2.0, 3.0);
  const Vector line = 2.0 * x.array() - 1.0;
  const Vector cubic = x.array().cube() - 2.0 * x.array().square() + 0.5;
  const SplineLink a = fit_link(x, line);
  const SplineLink b = fit_link(x, cubic);
  for (double t : {-2.0, -1.3, 0.0, 0.7, 2.9}) {
    EXPECT_NEAR(a(t), 2.0 * t - 1.0, 1e-7);
    EXPECT_NEAR(b(t), t * t * t - 2.0 * t * t + 0.5, 1e-6);
  }
}

TEST(FitLink, ConstantResponse) {
  const Vector x = testing::random_vector(50, 1);
  const SplineLink s = fit_link(x, Vector::Constant(50, 4.2));
  for (double t : {-1.0, 0.0, 2.0}) EXPECT_NEAR(s(t), 4.2, 1e-8);
}

TEST(FitLink, ApproximatesTheExponential) {
  const Vector x = grid(400, -2.0, 2.0);
  const Vector y = x.array().exp();
  const SplineLink s = fit_link(x, y, 6);
  double worst = 0.0;
  for (Index i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(s(x[i]) - y[i]));
  EXPECT_LT(worst, 2e-3);
}

TEST(FitLink, DegenerateIndexFallsBackToTheMean) {
  Vector y(10);
  for (Index i = 0; i < 10; ++i) y[i] = static_cast<double>(i);
  const SplineLink s = fit_link(Vector::Zero(10), y, 2);
  EXPECT_NEAR(s(0.0), 4.5, 1e-6);
  EXPECT_NEAR(s(5.0), 4.5, 1e-6);
}

TEST(FitLink, Validation) {
  EXPECT_THROW(fit_link(Vector::Zero(5), Vector::Zero(4)), Error);
  EXPECT_THROW(fit_link(Vector::Zero(9), Vector::Zero(9), 6), Error);
  EXPECT_NO_THROW(fit_link(grid(10, 0, 1), Vector::Zero(10), 6));
}

}  // namespace
}  // namespace fasim
