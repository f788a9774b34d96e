#pragma once

#include <optional>
#include <string>

#include "fasim/types.hpp"

namespace fasim {

struct LassoOptions {
  double tolerance = 1e-8;   // on max |coordinate update| / max(1, ||beta||_inf)
  int max_sweeps = 10000;
};

struct LassoResult {
  Vector beta;
  double objective = 0.0;
  int sweeps = 0;
  bool converged = false;
  std::string diagnostic;
};

/// (1/(2n)) ||y - U beta||^2 + lambda ||beta||_1
double lasso_objective(const Matrix& U, const Vector& y, const Vector& beta, double lambda);

inline double soft_threshold(double z, double lambda) noexcept {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

/// Cyclic coordinate descent with residual maintenance. Full sweeps alternate
/// with sweeps over the current support; convergence is only declared after
/// a full sweep. Non-convergence is reported, not thrown.
LassoResult lasso_fit(const Matrix& U, const Vector& y, double lambda,
                      const Vector* warm_start = nullptr, const LassoOptions& options = {});

/// max_j |U_j^T y| / n: the smallest lambda whose solution is zero.
double lambda_max(const Matrix& U, const Vector& y);

}  // namespace fasim
