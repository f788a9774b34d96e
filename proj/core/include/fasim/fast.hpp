#pragma once

#include <optional>

#include "fasim/data.hpp"
#include "fasim/factor.hpp"
#include "fasim/random.hpp"

namespace fasim {

/// gamma_h = (F^T F)^{-1} F^T h, which reduces to F^T h / n under the
/// orthonormality constraint. Throws InconsistentFactors when
/// ||F^T F / n - I||_max > 1e-6.
Vector gamma_ls(const Matrix& F_hat, const TransformedResponse& h);

struct FastStatistic {
  Vector T_n;        // U_hat^T (h - F_hat gamma) / sqrt(n)
  double M_n = 0.0;  // max_j |T_nj|
  Vector gamma_hat;
  Vector residual;   // h - F_hat gamma
};

FastStatistic fast_statistic(const FactorDecomposition& fd, const TransformedResponse& h);

/// m_hat_j(Y_i) = (1/n) sum_k U_kj (1[Y_k >= Y_i] - F_n(Y_k)), built from a
/// sort of Y and suffix sums in O(n log n + n p).
Matrix m_hat_matrix(const FactorDecomposition& fd, const Vector& Y);

/// W_ij = U_ij * e_i + m_hat_j(Y_i): the multiplier-bootstrap summands.
Matrix score_matrix(const Matrix& U_hat, const Vector& residual, const Matrix& m_hat);

struct BootstrapResult {
  double critical_value = 0.0;
  Vector draws;
};

/// Order statistic ceil(B (1 - alpha)) of the draws (1-based), i.e. the
/// smallest t >= 0 whose empirical CDF reaches 1 - alpha. alpha = 1 gives 0.
double bootstrap_quantile(const Vector& draws, double alpha);

/// G_b = ||W^T N_b||_inf / sqrt(n) with N_b ~ N(0, I_n) drawn from
/// seed.child(b). Replicates are independent of thread count.
BootstrapResult multiplier_bootstrap(const Matrix& W, Index B, double alpha, SeedSpec seed);

/// Same with caller-supplied multipliers (n x B), one column per replicate.
BootstrapResult multiplier_bootstrap_with(const Matrix& W, const Matrix& multipliers,
                                          double alpha);

struct FastOptions {
  std::optional<Index> K;      // absent: eigenvalue-ratio selection
  std::optional<Index> K_max;
  Index bootstrap = 2000;
  double alpha = 0.05;
  SeedSpec seed{};
};

struct FastResult {
  double M_n = 0.0;
  Vector T_n;
  double critical_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
  Index B = 0;
  Index K = 0;
  Vector gamma_hat;
  Vector draws;
};

/// Factor-adjusted score-type test of H0: beta_h = 0.
FastResult fast_test(const Dataset& ds, const FastOptions& options);

}  // namespace fasim
