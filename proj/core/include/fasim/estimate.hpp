#pragma once

#include <optional>
#include <string>

#include "fasim/data.hpp"
#include "fasim/factor.hpp"
#include "fasim/lasso.hpp"
#include "fasim/random.hpp"

namespace fasim {

/// Residual of h after projection onto the factor columns:
/// h - F (F^T h) / n.
Vector project_response(const FactorDecomposition& fd, const TransformedResponse& h);

/// c * sqrt(log p / n) for 30 log-spaced c in [0.01, 10], descending.
/// log p is floored at log 2 so that p = 1 still yields a positive grid.
Vector default_lambda_grid(Index n, Index p);

struct LambdaSelection {
  double lambda = 0.0;
  Vector grid;        // descending
  Vector cv_error;    // summed held-out squared error per grid point
};

/// K-fold cross-validation of the lasso on (U, y). Folds are contiguous
/// blocks of a seeded permutation; ties go to the larger lambda.
LambdaSelection select_lambda(const Matrix& U, const Vector& y, const std::optional<Vector>& grid,
                              Index folds, SeedSpec seed);

struct ScaledLassoResult {
  double lambda = 0.0;
  double sigma = 0.0;  // ||y - U beta|| / sqrt(n) at the final fit
  LassoResult fit;
  int iterations = 0;
};

/// Jointly scaled penalty: lambda = c * sigma * sqrt(log p / n) where sigma is
/// the residual scale of the fit at that lambda, found by fixed-point
/// iteration from sigma = ||y|| / sqrt(n).
ScaledLassoResult scaled_lasso(const Matrix& U, const Vector& y, double c,
                               const LassoOptions& options = {});

struct PenalizedFit {
  Vector beta_hat;
  Vector gamma_hat;
  double lambda = 0.0;
  Vector projected_h;
  double objective = 0.0;
  int n_iter = 0;
  bool converged = false;
  std::string diagnostic;
};

struct FitOptions {
  std::optional<Index> K;
  std::optional<Index> K_max;
  std::optional<double> lambda;     // absent: noise_scale or cross-validation
  std::optional<double> noise_scale;  // c of scaled_lasso
  std::optional<Vector> lambda_grid;
  Index cv_folds = 10;
  bool standardize = false;
  SeedSpec seed{};
  LassoOptions lasso{};
};

/// Every intermediate of the estimation pipeline, reused by inference.
struct FasimModel {
  CenteredMatrix centered;
  FactorDecomposition factors;
  TransformedResponse h;
  PenalizedFit fit;
};

/// Lasso on (U_hat, y_tilde), optionally on unit-scaled columns.
LassoResult penalized_fit(const Matrix& U_hat, const Vector& y_tilde, double lambda,
                          bool standardize, const LassoOptions& options = {});

FasimModel fit_fasim_model(const Dataset& ds, const FitOptions& options);
PenalizedFit fit_fasim(const Dataset& ds, const FitOptions& options);

}  // namespace fasim
