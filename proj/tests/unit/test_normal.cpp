#include <gtest/gtest.h>

#include <cmath>

#include "fasim/error.hpp"
#include "fasim/normal.hpp"

namespace fasim {
namespace {

// Quantile by bisection on erfc: independent of the rational approximation.
// Upper half by symmetry, so the far right tail keeps full precision.
double bisect_quantile(double p) {
  if (p > 0.5) return -bisect_quantile(1.0 - p);
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(Normal, QuantileMatchesBisection) {
  for (double p : {1e-300, 1e-12, 1e-4, 0.001, 0.025, 0.1, 0.3, 0.5, 0.7, 0.9, 0.975, 0.999,
                   1.0 - 1e-10}) {
    EXPECT_NEAR(normal_quantile(p), bisect_quantile(p),
                1e-12 * std::max(1.0, std::abs(bisect_quantile(p))))
        << p;
  }
}

TEST(Normal, FrozenCriticalValues) {
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-13);
  EXPECT_NEAR(normal_quantile(0.95), 1.644853626951472, 1e-13);
  EXPECT_NEAR(normal_quantile(0.75), 0.674489750196082, 1e-13);
  EXPECT_DOUBLE_EQ(normal_quantile(0.5), 0.0);
}

TEST(Normal, CdfAndPdf) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-15);
  EXPECT_NEAR(normal_pdf(0.0), 1.0 / std::sqrt(2.0 * M_PI), 1e-16);
  for (double x : {-3.0, -0.4, 0.0, 1.3}) {
    EXPECT_NEAR(normal_cdf(normal_quantile(normal_cdf(x))), normal_cdf(x), 1e-15);
  }
}

TEST(Normal, QuantileRejectsOutOfRange) {
  EXPECT_THROW(normal_quantile(0.0), Error);
  EXPECT_THROW(normal_quantile(1.0), Error);
  EXPECT_THROW(normal_quantile(-0.5), Error);
}

}  // namespace
}  // namespace fasim
