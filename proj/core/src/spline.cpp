#include "fasim/spline.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <vector>

#include "fasim/error.hpp"

namespace fasim {

SplineLink::SplineLink(Vector interior_knots, double lo, double hi, Vector coefficients,
                       int degree)
    : interior_(std::move(interior_knots)), lo_(lo), hi_(hi), coef_(std::move(coefficients)),
      degree_(degree) {
  if (degree_ < 0) throw_invalid("spline degree must be nonnegative");
  if (!(lo_ <= hi_)) throw_invalid("spline range is empty");
  if (coef_.size() != basis_size()) throw_invalid("spline coefficient count mismatch");
  full_.resize(interior_.size() + 2 * (degree_ + 1));
  for (int k = 0; k <= degree_; ++k) {
    full_[k] = lo_;
    full_[full_.size() - 1 - k] = hi_;
  }
  full_.segment(degree_ + 1, interior_.size()) = interior_;
}

Vector SplineLink::basis(double x) const {
  const Index nb = basis_size();
  Vector out = Vector::Zero(nb);
  if (hi_ == lo_) {
    out.setConstant(1.0 / static_cast<double>(nb));
    return out;
  }
  x = std::clamp(x, lo_, hi_);
  const int d = degree_;
  // span: full_[k] <= x < full_[k + 1] with k in [d, nb - 1]
  Index k = d;
  while (k < nb - 1 && full_[k + 1] <= x) ++k;
  // de Boor's triangular recursion for the d + 1 nonzero functions
  std::vector<double> N(static_cast<std::size_t>(d + 1), 0.0);
  std::vector<double> left(static_cast<std::size_t>(d + 1), 0.0);
  std::vector<double> right(static_cast<std::size_t>(d + 1), 0.0);
  N[0] = 1.0;
  for (int j = 1; j <= d; ++j) {
    left[j] = x - full_[k + 1 - j];
    right[j] = full_[k + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom != 0.0 ? N[r] / denom : 0.0;
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }
  for (int r = 0; r <= d; ++r) out[k - d + r] = N[r];
  return out;
}

double SplineLink::operator()(double x) const { return basis(x).dot(coef_); }

Vector SplineLink::operator()(const Vector& x) const {
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) out[i] = (*this)(x[i]);
  return out;
}

SplineLink fit_link(const Vector& index, const Vector& Y, Index n_knots) {
  constexpr int kDegree = 3;
  if (index.size() != Y.size()) throw_invalid("spline: index and response differ in length");
  if (n_knots < 0) throw_invalid("spline: knot count must be nonnegative");
  const Index n = index.size();
  if (n < n_knots + kDegree + 1) {
    throw_invalid("spline: need at least n_knots + 4 points, got " + std::to_string(n));
  }
  if (!index.allFinite() || !Y.allFinite()) throw_invalid("spline: inputs must be finite");

  std::vector<double> sorted(index.data(), index.data() + n);
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  Vector interior(n_knots);
  for (Index j = 0; j < n_knots; ++j) {
    // type-7 quantile at (j + 1) / (n_knots + 1)
    const double pos = static_cast<double>(n - 1) * static_cast<double>(j + 1) /
                       static_cast<double>(n_knots + 1);
    const auto base = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(base);
    const double upper = sorted[std::min(base + 1, sorted.size() - 1)];
    interior[j] = sorted[base] + frac * (upper - sorted[base]);
  }

  const Index nb = n_knots + kDegree + 1;
  SplineLink shape(interior, lo, hi, Vector::Zero(nb), kDegree);
  Matrix design(n, nb);
  for (Index i = 0; i < n; ++i) design.row(i) = shape.basis(index[i]).transpose();
  Matrix gram = design.transpose() * design;
  gram.diagonal().array() += 1e-10;
  const Vector coef = gram.ldlt().solve(design.transpose() * Y);
  return SplineLink(interior, lo, hi, coef, kDegree);
}

}  // namespace fasim
