#include "fasim/factor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fasim/error.hpp"

namespace fasim {
namespace {

constexpr double kRelativeFloor = 1e-12;
constexpr double kDegenerateEigenvalue = 1e-20;

Index argmax_abs(const Eigen::Ref<const Vector>& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  return best;
}

}  // namespace

Index default_max_factors(Index n) noexcept {
  Index k = std::min<Index>(n / 2, 15);
  k = std::min<Index>(k, n - 1);
  return std::max<Index>(k, 1);
}

GramSpectrum gram_spectrum(const Matrix& X, Index leading) {
  const Index n = X.rows();
  const Index p = X.cols();
  const Index r = std::min(n, p);
  leading = std::clamp<Index>(leading, 0, r);

  GramSpectrum out;
  out.eigenvalues = Vector::Zero(r);
  if (n <= p) {
    const Matrix gram = X * X.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::NotConverged, "eigendecomposition of X X^T failed");
    }
    // ascending -> descending
    for (Index k = 0; k < r; ++k) {
      out.eigenvalues[k] = std::max(0.0, solver.eigenvalues()[n - 1 - k]);
    }
    out.vectors.resize(n, leading);
    for (Index k = 0; k < leading; ++k) {
      out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
    }
  } else {
    const Matrix cov = X.transpose() * X;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::NotConverged, "eigendecomposition of X^T X failed");
    }
    for (Index k = 0; k < r; ++k) {
      out.eigenvalues[k] = std::max(0.0, solver.eigenvalues()[p - 1 - k]);
    }
    out.vectors.resize(n, leading);
    for (Index k = 0; k < leading; ++k) {
      const double lambda = out.eigenvalues[k];
      if (lambda > 0.0) {
        out.vectors.col(k) = X * solver.eigenvectors().col(p - 1 - k) / std::sqrt(lambda);
        out.vectors.col(k).normalize();
      } else {
        out.vectors.col(k).setZero();
      }
    }
  }
  return out;
}

Index select_num_factors_from_spectrum(const Vector& eigenvalues, Index K_max) {
  if (K_max < 1) throw_invalid("K_max must be at least 1");
  if (eigenvalues.size() == 0 || eigenvalues[0] <= kDegenerateEigenvalue) {
    throw Error(ErrorKind::DegenerateInput,
                "all eigenvalues of X X^T are numerically zero");
  }
  const double floor = kRelativeFloor * eigenvalues[0];
  auto clamped = [&](Index k) {
    const double value = k < eigenvalues.size() ? eigenvalues[k] : 0.0;
    return std::max(value, floor);
  };
  Index best = 1;
  double best_ratio = -1.0;
  for (Index k = 1; k <= K_max; ++k) {
    const double ratio = clamped(k - 1) / clamped(k);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = k;
    }
  }
  return best;
}

Index select_num_factors(const Matrix& X, Index K_max) {
  if (K_max < 1 || K_max > X.rows() - 1) {
    throw_invalid("K_max must lie in [1, n-1]");
  }
  const GramSpectrum spectrum = gram_spectrum(X, 0);
  return select_num_factors_from_spectrum(spectrum.eigenvalues, K_max);
}

namespace {

FactorDecomposition assemble(const Matrix& X, const GramSpectrum& spectrum, Index K,
                             Index spectrum_size) {
  const Index n = X.rows();
  const double lambda_1 = spectrum.eigenvalues.size() > 0 ? spectrum.eigenvalues[0] : 0.0;
  for (Index k = 0; k < K; ++k) {
    if (!(spectrum.eigenvalues[k] > kRelativeFloor * lambda_1) ||
        spectrum.eigenvalues[k] <= kDegenerateEigenvalue) {
      throw Error(ErrorKind::RankDeficient,
                  "K = " + std::to_string(K) + " exceeds the numerical rank of X: eigenvalue " +
                      std::to_string(k + 1) + " is numerically zero");
    }
  }

  // order by eigenvalue, then by the position of the largest-magnitude entry
  std::vector<Index> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<Index> peak(static_cast<std::size_t>(K));
  for (Index k = 0; k < K; ++k) peak[static_cast<std::size_t>(k)] = argmax_abs(spectrum.vectors.col(k));
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double la = spectrum.eigenvalues[a];
    const double lb = spectrum.eigenvalues[b];
    if (la != lb) return la > lb;
    return peak[static_cast<std::size_t>(a)] < peak[static_cast<std::size_t>(b)];
  });

  FactorDecomposition fd;
  fd.K = K;
  fd.F_hat.resize(n, K);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (Index k = 0; k < K; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    Vector column = spectrum.vectors.col(src);
    if (column[peak[static_cast<std::size_t>(src)]] < 0.0) column = -column;
    fd.F_hat.col(k) = root_n * column;
  }
  fd.B_hat = X.transpose() * fd.F_hat / static_cast<double>(n);
  fd.U_hat = X - fd.F_hat * fd.B_hat.transpose();
  const Index keep = std::min<Index>(spectrum_size, spectrum.eigenvalues.size());
  fd.eigenvalues = Vector::Zero(std::min<Index>(spectrum_size, n));
  fd.eigenvalues.head(keep) = spectrum.eigenvalues.head(keep);
  return fd;
}

}  // namespace

FactorDecomposition fit_factors(const Matrix& X, Index K) {
  const Index n = X.rows();
  if (K < 1 || K > std::min(n - 1, X.cols())) {
    throw_invalid("number of factors must lie in [1, min(n-1, p)]");
  }
  const GramSpectrum spectrum = gram_spectrum(X, K);
  const Index spectrum_size = std::max(K, default_max_factors(n)) + 1;
  return assemble(X, spectrum, K, spectrum_size);
}

FactorDecomposition estimate_factors(const Matrix& X, std::optional<Index> K,
                                     std::optional<Index> K_max) {
  const Index n = X.rows();
  const Index k_max = K_max.value_or(default_max_factors(n));
  if (k_max < 1 || k_max > n - 1) throw_invalid("K_max must lie in [1, n-1]");
  if (K && (*K < 1 || *K > std::min(n - 1, X.cols()))) {
    throw_invalid("number of factors must lie in [1, min(n-1, p)]");
  }
  const Index leading = std::min(std::max(K.value_or(0), k_max), std::min(n, X.cols()));
  const GramSpectrum spectrum = gram_spectrum(X, leading);
  const Index chosen = K ? *K : select_num_factors_from_spectrum(spectrum.eigenvalues, k_max);
  if (chosen > std::min(n - 1, X.cols())) {
    throw Error(ErrorKind::RankDeficient, "selected factor count exceeds min(n-1, p)");
  }
  return assemble(X, spectrum, chosen, std::max(chosen, k_max) + 1);
}

ProjectedObservation project_observation(const FactorDecomposition& fd, const Vector& x) {
  if (x.size() != fd.B_hat.rows()) throw_invalid("observation length does not match p");
  ProjectedObservation out;
  const Matrix gram = fd.B_hat.transpose() * fd.B_hat;
  out.f = gram.ldlt().solve(fd.B_hat.transpose() * x);
  out.u = x - fd.B_hat * out.f;
  return out;
}

}  // namespace fasim
