#pragma once

#include <optional>
#include <utility>

#include "fasim/estimate.hpp"
#include "fasim/precision.hpp"

namespace fasim {

struct DebiasedInference {
  Vector beta_hat;
  Vector beta_tilde;
  Vector sigma_z;
  Vector ci_lower;
  Vector ci_upper;
  double alpha = 0.05;
  Vector residuals_tilde;  // h - U beta_hat - F gamma_hat
  double lambda = 0.0;
  double delta_n = 0.0;
  Index K = 0;
};

/// beta_hat + Theta U^T (h - U beta_hat) / n.
Vector debias(const PenalizedFit& fit, const FactorDecomposition& fd, const TransformedResponse& h,
              const Matrix& Theta);
Vector debias(const PenalizedFit& fit, const FactorDecomposition& fd, const TransformedResponse& h,
              const PrecisionEstimate& Theta);

/// h - U beta_hat - F gamma_hat.
Vector inference_residuals(const PenalizedFit& fit, const FactorDecomposition& fd);

/// sigma_zj = ||W theta_j|| / sqrt(n) with W_ij = U_ij e_i + m_hat_j(Y_i), using
/// the sparsity of Theta instead of forming the p x p sandwich.
Vector sandwich_sd(const FactorDecomposition& fd, const PenalizedFit& fit, const Matrix& Theta,
                   const Matrix& m_hat);

std::pair<Vector, Vector> confidence_intervals(const Vector& beta_tilde, const Vector& sigma_z,
                                               Index n, double alpha);

struct InferenceOptions {
  FitOptions fit{};
  std::optional<double> delta;  // absent: select_delta
  bool cv_delta = false;
  double alpha = 0.05;
};

DebiasedInference infer_fasim(const Dataset& ds, const InferenceOptions& options);

}  // namespace fasim
