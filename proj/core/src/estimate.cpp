#include "fasim/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fasim/error.hpp"
#include "fasim/fast.hpp"
#include "fasim/parallel.hpp"

namespace fasim {

Vector project_response(const FactorDecomposition& fd, const TransformedResponse& h) {
  if (h.size() != fd.F_hat.rows()) throw_invalid("response length does not match factors");
  const double n = static_cast<double>(fd.F_hat.rows());
  return h.values - fd.F_hat * (fd.F_hat.transpose() * h.values) / n;
}

Vector default_lambda_grid(Index n, Index p) {
  constexpr Index kPoints = 30;
  const double base =
      std::sqrt(std::log(static_cast<double>(std::max<Index>(p, 2))) / static_cast<double>(n));
  Vector grid(kPoints);
  const double lo = std::log10(0.01);
  const double hi = std::log10(10.0);
  for (Index k = 0; k < kPoints; ++k) {
    const double c = std::pow(10.0, hi - (hi - lo) * static_cast<double>(k) / (kPoints - 1));
    grid[k] = c * base;
  }
  return grid;
}

LambdaSelection select_lambda(const Matrix& U, const Vector& y, const std::optional<Vector>& grid,
                              Index folds, SeedSpec seed) {
  const Index n = U.rows();
  if (y.size() != n) throw_invalid("select_lambda: response length does not match design");
  if (folds < 2 || folds > n) throw_invalid("cross-validation folds must lie in [2, n]");
  if (n / folds < 2) {
    throw_invalid("cross-validation needs at least 2 observations per fold");
  }

  LambdaSelection out;
  out.grid = grid ? *grid : default_lambda_grid(n, U.cols());
  if (out.grid.size() == 0) throw_invalid("lambda grid is empty");
  if ((out.grid.array() <= 0.0).any()) throw_invalid("lambda grid entries must be positive");
  std::sort(out.grid.data(), out.grid.data() + out.grid.size(), std::greater<>());
  const Index points = out.grid.size();

  // seeded Fisher-Yates permutation
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  RandomStream rng(seed);
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }

  Matrix fold_error = Matrix::Zero(points, folds);
  parallel_for(static_cast<std::size_t>(folds), [&](std::size_t f) {
    const Index start = static_cast<Index>(f) * n / folds;
    const Index stop = (static_cast<Index>(f) + 1) * n / folds;
    std::vector<char> held(static_cast<std::size_t>(n), 0);
    for (Index k = start; k < stop; ++k) held[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = 1;
    const Index n_test = stop - start;
    Matrix U_train(n - n_test, U.cols());
    Vector y_train(n - n_test);
    Matrix U_test(n_test, U.cols());
    Vector y_test(n_test);
    Index a = 0;
    Index b = 0;
    for (Index i = 0; i < n; ++i) {
      if (held[static_cast<std::size_t>(i)]) {
        U_test.row(b) = U.row(i);
        y_test[b++] = y[i];
      } else {
        U_train.row(a) = U.row(i);
        y_train[a++] = y[i];
      }
    }
    Vector beta = Vector::Zero(U.cols());
    for (Index g = 0; g < points; ++g) {
      const LassoResult fit = lasso_fit(U_train, y_train, out.grid[g], &beta);
      beta = fit.beta;
      fold_error(g, static_cast<Index>(f)) = (y_test - U_test * beta).squaredNorm();
    }
  });

  out.cv_error = fold_error.rowwise().sum();
  // grid is descending, so the first minimizer is the largest lambda
  Index best = 0;
  for (Index g = 1; g < points; ++g) {
    if (out.cv_error[g] < out.cv_error[best]) best = g;
  }
  out.lambda = out.grid[best];
  return out;
}

ScaledLassoResult scaled_lasso(const Matrix& U, const Vector& y, double c,
                               const LassoOptions& options) {
  if (!(c > 0.0)) throw_invalid("noise scale must be positive");
  const Index n = U.rows();
  const double base =
      std::sqrt(std::log(static_cast<double>(std::max<Index>(U.cols(), 2))) / static_cast<double>(n));
  const double root_n = std::sqrt(static_cast<double>(n));
  ScaledLassoResult out;
  out.sigma = y.norm() / root_n;
  if (out.sigma <= 0.0) throw Error(ErrorKind::DegenerateInput, "scaled lasso: response is zero");
  Vector warm = Vector::Zero(U.cols());
  for (out.iterations = 1; out.iterations <= 100; ++out.iterations) {
    out.lambda = c * out.sigma * base;
    out.fit = lasso_fit(U, y, out.lambda, &warm, options);
    warm = out.fit.beta;
    const double next = (y - U * out.fit.beta).norm() / root_n;
    const bool settled = std::abs(next - out.sigma) <= 1e-8 * out.sigma;
    out.sigma = next;
    if (settled || out.sigma <= 0.0) break;
  }
  if (out.sigma <= 0.0) {
    throw Error(ErrorKind::DegenerateInput, "scaled lasso: residual vanished");
  }
  out.lambda = c * out.sigma * base;
  out.fit = lasso_fit(U, y, out.lambda, &warm, options);
  return out;
}

LassoResult penalized_fit(const Matrix& U_hat, const Vector& y_tilde, double lambda,
                          bool standardize, const LassoOptions& options) {
  if (!standardize) return lasso_fit(U_hat, y_tilde, lambda, nullptr, options);
  const Index n = U_hat.rows();
  Vector scale = (U_hat.colwise().squaredNorm().transpose() / static_cast<double>(n)).cwiseSqrt();
  for (Index j = 0; j < scale.size(); ++j) {
    if (scale[j] <= 0.0) scale[j] = 1.0;
  }
  const Matrix scaled = U_hat * scale.cwiseInverse().asDiagonal();
  LassoResult fit = lasso_fit(scaled, y_tilde, lambda, nullptr, options);
  fit.beta = fit.beta.cwiseQuotient(scale);
  return fit;
}

FasimModel fit_fasim_model(const Dataset& ds, const FitOptions& options) {
  FasimModel model;
  model.centered = center_columns(ds.X());
  model.factors = estimate_factors(model.centered.centered, options.K, options.K_max);
  model.h = rank_transform(ds.Y());

  PenalizedFit& fit = model.fit;
  fit.projected_h = project_response(model.factors, model.h);
  if (options.lambda) {
    if (!(*options.lambda > 0.0)) throw_invalid("lambda must be positive");
    fit.lambda = *options.lambda;
  } else if (options.noise_scale) {
    if (options.standardize) throw_invalid("noise-scaled lambda does not support standardize");
    fit.lambda = scaled_lasso(model.factors.U_hat, fit.projected_h, *options.noise_scale,
                              options.lasso)
                     .lambda;
  } else {
    const Matrix* design = &model.factors.U_hat;
    Matrix scaled;
    if (options.standardize) {
      Vector scale = (model.factors.U_hat.colwise().squaredNorm().transpose() /
                      static_cast<double>(ds.n()))
                         .cwiseSqrt();
      for (Index j = 0; j < scale.size(); ++j) {
        if (scale[j] <= 0.0) scale[j] = 1.0;
      }
      scaled = model.factors.U_hat * scale.cwiseInverse().asDiagonal();
      design = &scaled;
    }
    fit.lambda = select_lambda(*design, fit.projected_h, options.lambda_grid, options.cv_folds,
                               options.seed)
                     .lambda;
  }
  const LassoResult lasso = penalized_fit(model.factors.U_hat, fit.projected_h, fit.lambda,
                                          options.standardize, options.lasso);
  fit.beta_hat = lasso.beta;
  fit.objective = lasso_objective(model.factors.U_hat, fit.projected_h, fit.beta_hat, fit.lambda);
  fit.n_iter = lasso.sweeps;
  fit.converged = lasso.converged;
  fit.diagnostic = lasso.diagnostic;
  fit.gamma_hat = gamma_ls(model.factors.F_hat, model.h);
  return model;
}

PenalizedFit fit_fasim(const Dataset& ds, const FitOptions& options) {
  return fit_fasim_model(ds, options).fit;
}

}  // namespace fasim
