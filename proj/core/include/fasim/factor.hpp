#pragma once

#include <optional>

#include "fasim/types.hpp"

namespace fasim {

/// Principal-component estimate of X = F B^T + U under (1/n) F^T F = I_K.
struct FactorDecomposition {
  Matrix F_hat;        // n x K, columns sqrt(n) * unit eigenvectors of X X^T
  Matrix B_hat;        // p x K, X^T F_hat / n
  Matrix U_hat;        // n x p, X - F_hat B_hat^T
  Index K = 0;
  Vector eigenvalues;  // leading eigenvalues of X X^T, nonincreasing

  Index n() const noexcept { return U_hat.rows(); }
  Index p() const noexcept { return U_hat.cols(); }
};

/// Leading eigenpairs of the Gram matrix X X^T. Computed from whichever of
/// X X^T (n x n) or X^T X (p x p) is smaller; both share the nonzero spectrum.
struct GramSpectrum {
  Vector eigenvalues;  // min(n, p) values, nonincreasing, rest are zero
  Matrix vectors;      // n x r unit eigenvectors of X X^T for the r leading values
};

GramSpectrum gram_spectrum(const Matrix& X, Index leading);

/// min(floor(n/2), 15), clipped to [1, n-1].
Index default_max_factors(Index n) noexcept;

/// argmax_{k <= K_max} lambda_k / lambda_{k+1}. Eigenvalues below
/// 1e-12 * lambda_1 are clamped to that floor first.
Index select_num_factors(const Matrix& X, Index K_max);
Index select_num_factors_from_spectrum(const Vector& eigenvalues, Index K_max);

FactorDecomposition fit_factors(const Matrix& X, Index K);

/// One eigendecomposition serving both K selection (when K is absent) and the
/// fit. K_max defaults to default_max_factors(n).
FactorDecomposition estimate_factors(const Matrix& X, std::optional<Index> K,
                                     std::optional<Index> K_max = std::nullopt);

struct ProjectedObservation {
  Vector f;  // (B^T B)^{-1} B^T x
  Vector u;  // x - B f
};

/// Factor scores and idiosyncratic part of a new (already centered) row,
/// using the trained loadings only.
ProjectedObservation project_observation(const FactorDecomposition& fd, const Vector& x);

}  // namespace fasim
