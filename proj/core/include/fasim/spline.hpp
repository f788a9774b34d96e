#pragma once

#include "fasim/types.hpp"

namespace fasim {

/// Cubic B-spline g on [lo, hi] with constant extrapolation outside.
class SplineLink {
 public:
  SplineLink() = default;
  SplineLink(Vector interior_knots, double lo, double hi, Vector coefficients, int degree = 3);

  double operator()(double x) const;
  Vector operator()(const Vector& x) const;

  const Vector& knots() const noexcept { return interior_; }
  const Vector& coefficients() const noexcept { return coef_; }
  int degree() const noexcept { return degree_; }
  double lower() const noexcept { return lo_; }
  double upper() const noexcept { return hi_; }

  /// Values of the n_basis B-spline functions at x (clamped to [lo, hi]).
  Vector basis(double x) const;
  Index basis_size() const noexcept { return interior_.size() + degree_ + 1; }

 private:
  Vector interior_;
  Vector full_;  // interior knots with degree + 1 copies of each boundary
  double lo_ = 0.0;
  double hi_ = 0.0;
  Vector coef_;
  int degree_ = 3;
};

/// Least-squares cubic B-spline of Y on index with n_knots interior knots at
/// empirical quantiles of the index; normal equations carry a 1e-10 ridge.
SplineLink fit_link(const Vector& index, const Vector& Y, Index n_knots = 6);

}  // namespace fasim
