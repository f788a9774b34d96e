#include "fasim/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fasim/error.hpp"

namespace fasim {

double lasso_objective(const Matrix& U, const Vector& y, const Vector& beta, double lambda) {
  const double n = static_cast<double>(U.rows());
  return (y - U * beta).squaredNorm() / (2.0 * n) + lambda * beta.lpNorm<1>();
}

double lambda_max(const Matrix& U, const Vector& y) {
  if (U.cols() == 0) return 0.0;
  return (U.transpose() * y).cwiseAbs().maxCoeff() / static_cast<double>(U.rows());
}

LassoResult lasso_fit(const Matrix& U, const Vector& y, double lambda, const Vector* warm_start,
                      const LassoOptions& options) {
  const Index n = U.rows();
  const Index p = U.cols();
  if (y.size() != n) throw_invalid("lasso: response length does not match design rows");
  if (!(lambda > 0.0)) throw_invalid("lasso: lambda must be positive");
  const double inv_n = 1.0 / static_cast<double>(n);

  LassoResult out;
  out.beta = Vector::Zero(p);
  if (warm_start) {
    if (warm_start->size() != p) throw_invalid("lasso: warm start has wrong length");
    out.beta = *warm_start;
  }
  const Vector col_sq = U.colwise().squaredNorm().transpose() * inv_n;
  Vector residual = y - U * out.beta;

  auto update = [&](Index j) {
    const double old = out.beta[j];
    if (col_sq[j] <= 0.0) {
      if (old != 0.0) {
        out.beta[j] = 0.0;
        return std::abs(old);
      }
      return 0.0;
    }
    const double z = U.col(j).dot(residual) * inv_n + col_sq[j] * old;
    const double fresh = soft_threshold(z, lambda) / col_sq[j];
    const double delta = fresh - old;
    if (delta != 0.0) {
      residual.noalias() -= delta * U.col(j);
      out.beta[j] = fresh;
    }
    return std::abs(delta);
  };
  auto threshold = [&] {
    return options.tolerance * std::max(1.0, out.beta.size() ? out.beta.cwiseAbs().maxCoeff() : 0.0);
  };

  std::vector<Index> active;
  while (out.sweeps < options.max_sweeps) {
    double max_delta = 0.0;
    for (Index j = 0; j < p; ++j) max_delta = std::max(max_delta, update(j));
    ++out.sweeps;
    if (max_delta < threshold()) {
      out.converged = true;
      break;
    }
    active.clear();
    for (Index j = 0; j < p; ++j) {
      if (out.beta[j] != 0.0) active.push_back(j);
    }
    while (out.sweeps < options.max_sweeps) {
      double active_delta = 0.0;
      for (const Index j : active) active_delta = std::max(active_delta, update(j));
      ++out.sweeps;
      if (active_delta < threshold()) break;
    }
  }
  if (!out.converged) {
    out.diagnostic = "coordinate descent stopped after " + std::to_string(out.sweeps) +
                     " sweeps without meeting the update tolerance";
  }
  out.objective = residual.squaredNorm() * inv_n * 0.5 + lambda * out.beta.lpNorm<1>();
  return out;
}

}  // namespace fasim
