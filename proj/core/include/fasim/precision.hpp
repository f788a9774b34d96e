#pragma once

#include <optional>
#include <vector>

#include "fasim/random.hpp"
#include "fasim/types.hpp"

namespace fasim {

struct PrecisionEstimate {
  Matrix Theta;               // symmetrized
  double delta_n = 0.0;
  std::vector<bool> feasible; // per column of the unsymmetrized solution
  Matrix Sigma_u_hat;
};

/// U^T U / n.
Matrix sample_cov_u(const Matrix& U_hat);

/// argmin ||theta||_1 subject to ||Sigma theta - e_j||_inf <= delta, solved as
/// a linear program over (theta+, theta-) >= 0. Throws Infeasible naming j.
Vector clime_column(const Matrix& Sigma_hat, Index j, double delta_n);

/// Min-magnitude symmetrization: entry (i, j) keeps whichever of xi_ij and
/// xi_ji is smaller in absolute value, xi_ij on ties.
Matrix symmetrize_min_magnitude(const Matrix& xi);

/// Column problems solved in parallel, then symmetrized. A column whose LP is
/// infeasible is set to zero and flagged rather than aborting the estimate.
PrecisionEstimate clime(const Matrix& Sigma_hat, double delta_n);

/// 2 sqrt(log p / n), with log p floored at log 2.
double default_delta(Index n, Index p);

struct DeltaOptions {
  std::optional<Vector> grid;  // absent: default * 2^{k/2}, k = -4..4
  bool cross_validate = false;
  Index folds = 5;
  SeedSpec seed{};
};

/// A one-element grid is returned as is. Otherwise, when cross-validation is
/// requested or a grid is supplied, returns the grid point minimizing the
/// summed held-out ||Theta Sigma_holdout - I||_max (ties toward larger
/// delta); with neither, the default.
double select_delta(const Matrix& U_hat, const DeltaOptions& options = {});

}  // namespace fasim
