#include "fasim/precision.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fasim/error.hpp"
#include "fasim/lp.hpp"
#include "fasim/parallel.hpp"

namespace fasim {
namespace {

// [Sigma, -Sigma]: shared by every column problem
Matrix split_constraints(const Matrix& Sigma) {
  const Index p = Sigma.rows();
  Matrix A(p, 2 * p);
  A.leftCols(p) = Sigma;
  A.rightCols(p) = -Sigma;
  return A;
}

Vector solve_column(const Matrix& A, const Matrix& At, Index j, double delta_n) {
  const Index p = A.rows();
  Vector lo = Vector::Constant(p, -delta_n);
  Vector hi = Vector::Constant(p, delta_n);
  lo[j] += 1.0;
  hi[j] += 1.0;
  const Vector cost = Vector::Ones(2 * p);
  try {
    const LpResult lp = solve_bounded_lp(A, At, cost, lo, hi);
    return lp.x.head(p) - lp.x.tail(p);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Infeasible) throw;
    throw Error(ErrorKind::Infeasible, "precision column " + std::to_string(j) +
                                           " is infeasible at delta " + std::to_string(delta_n));
  }
}

void check_square(const Matrix& Sigma) {
  if (Sigma.rows() != Sigma.cols() || Sigma.rows() == 0) {
    throw_invalid("covariance matrix must be square and nonempty");
  }
}

}  // namespace

Matrix sample_cov_u(const Matrix& U_hat) {
  if (U_hat.rows() < 2) throw_invalid("sample covariance needs at least 2 rows");
  Matrix S = Matrix::Zero(U_hat.cols(), U_hat.cols());
  S.selfadjointView<Eigen::Lower>().rankUpdate(U_hat.transpose(),
                                               1.0 / static_cast<double>(U_hat.rows()));
  return S.selfadjointView<Eigen::Lower>();
}

Vector clime_column(const Matrix& Sigma_hat, Index j, double delta_n) {
  check_square(Sigma_hat);
  if (!(delta_n > 0.0)) throw_invalid("delta_n must be positive");
  if (j < 0 || j >= Sigma_hat.rows()) throw_invalid("column index out of range");
  const Matrix A = split_constraints(Sigma_hat);
  return solve_column(A, A.transpose(), j, delta_n);
}

Matrix symmetrize_min_magnitude(const Matrix& xi) {
  if (xi.rows() != xi.cols()) throw_invalid("symmetrization needs a square matrix");
  Matrix out(xi.rows(), xi.cols());
  for (Index j = 0; j < xi.cols(); ++j) {
    out(j, j) = xi(j, j);
    for (Index i = 0; i < j; ++i) {
      const double v = std::abs(xi(i, j)) <= std::abs(xi(j, i)) ? xi(i, j) : xi(j, i);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

PrecisionEstimate clime(const Matrix& Sigma_hat, double delta_n) {
  check_square(Sigma_hat);
  if (!(delta_n > 0.0)) throw_invalid("delta_n must be positive");
  const Index p = Sigma_hat.rows();
  const Matrix A = split_constraints(Sigma_hat);
  const Matrix At = A.transpose();
  Matrix columns = Matrix::Zero(p, p);
  std::vector<char> ok(static_cast<std::size_t>(p), 1);
  parallel_for(static_cast<std::size_t>(p), [&](std::size_t j) {
    try {
      columns.col(static_cast<Index>(j)) = solve_column(A, At, static_cast<Index>(j), delta_n);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Infeasible) throw;
      ok[j] = 0;
    }
  });
  PrecisionEstimate out;
  out.Theta = symmetrize_min_magnitude(columns);
  out.delta_n = delta_n;
  out.feasible.assign(ok.begin(), ok.end());
  out.Sigma_u_hat = Sigma_hat;
  return out;
}

double default_delta(Index n, Index p) {
  if (n < 1) throw_invalid("default_delta needs n >= 1");
  return 2.0 * std::sqrt(std::log(static_cast<double>(std::max<Index>(p, 2))) /
                         static_cast<double>(n));
}

double select_delta(const Matrix& U_hat, const DeltaOptions& options) {
  const Index n = U_hat.rows();
  const Index p = U_hat.cols();
  const double base = default_delta(n, p);
  Vector grid;
  if (options.grid) {
    grid = *options.grid;
    if (grid.size() == 0 || (grid.array() <= 0.0).any()) {
      throw_invalid("delta grid must be nonempty and positive");
    }
  } else {
    grid.resize(9);
    for (Index k = 0; k < 9; ++k) grid[k] = base * std::pow(2.0, (static_cast<double>(k) - 4.0) / 2.0);
  }
  if (grid.size() == 1) return grid[0];
  if (!options.cross_validate && !options.grid) return base;

  const Index folds = options.folds;
  if (folds < 2 || n / folds < 2) throw_invalid("delta cross-validation needs >= 2 rows per fold");
  std::sort(grid.data(), grid.data() + grid.size(), std::greater<>());

  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  RandomStream rng(options.seed);
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }

  Vector loss = Vector::Zero(grid.size());
  const Matrix identity = Matrix::Identity(p, p);
  for (Index f = 0; f < folds; ++f) {
    const Index start = f * n / folds;
    const Index stop = (f + 1) * n / folds;
    Matrix train(n - (stop - start), p);
    Matrix test(stop - start, p);
    Index a = 0;
    for (Index k = 0; k < n; ++k) {
      const Index row = perm[static_cast<std::size_t>(k)];
      if (k >= start && k < stop) {
        test.row(k - start) = U_hat.row(row);
      } else {
        train.row(a++) = U_hat.row(row);
      }
    }
    const Matrix S_train = sample_cov_u(train);
    const Matrix S_test = sample_cov_u(test);
    for (Index g = 0; g < grid.size(); ++g) {
      const PrecisionEstimate est = clime(S_train, grid[g]);
      loss[g] += (est.Theta * S_test - identity).cwiseAbs().maxCoeff();
    }
  }
  Index best = 0;
  for (Index g = 1; g < grid.size(); ++g) {
    if (loss[g] < loss[best]) best = g;
  }
  return grid[best];
}

}  // namespace fasim
