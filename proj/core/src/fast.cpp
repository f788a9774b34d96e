#include "fasim/fast.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fasim/error.hpp"
#include "fasim/parallel.hpp"

namespace fasim {
namespace {

constexpr Index kBootstrapBlock = 64;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw_invalid("alpha must lie in (0, 1]");
}

}  // namespace

Vector gamma_ls(const Matrix& F_hat, const TransformedResponse& h) {
  const Index n = F_hat.rows();
  if (h.size() != n) throw_invalid("factor rows do not match response length");
  if (F_hat.cols() == 0) return Vector::Zero(0);
  const Matrix gram = F_hat.transpose() * F_hat / static_cast<double>(n);
  const double deviation =
      (gram - Matrix::Identity(F_hat.cols(), F_hat.cols())).cwiseAbs().maxCoeff();
  if (deviation > 1e-6) {
    throw Error(ErrorKind::InconsistentFactors,
                "factors violate F^T F / n = I (max deviation " + std::to_string(deviation) +
                    ")");
  }
  return F_hat.transpose() * h.values / static_cast<double>(n);
}

FastStatistic fast_statistic(const FactorDecomposition& fd, const TransformedResponse& h) {
  if (h.size() != fd.n() || fd.F_hat.rows() != fd.n()) {
    throw_invalid("factor decomposition and response come from different samples");
  }
  FastStatistic out;
  out.gamma_hat = gamma_ls(fd.F_hat, h);
  out.residual = h.values - fd.F_hat * out.gamma_hat;
  out.T_n = fd.U_hat.transpose() * out.residual / std::sqrt(static_cast<double>(fd.n()));
  out.M_n = out.T_n.size() > 0 ? out.T_n.cwiseAbs().maxCoeff() : 0.0;
  return out;
}

Matrix m_hat_matrix(const FactorDecomposition& fd, const Vector& Y) {
  const Index n = fd.n();
  const Index p = fd.p();
  if (Y.size() != n) throw_invalid("response length does not match factor decomposition");
  const TransformedResponse h = rank_transform(Y);
  const double inv_n = 1.0 / static_cast<double>(n);

  // constant part: (1/n) sum_k U_kj F_n(Y_k)
  Vector cdf = h.values.array() + 0.5;
  const Vector offset = fd.U_hat.transpose() * cdf * inv_n;

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return Y[a] < Y[b]; });

  // suffix[k] = (1/n) sum of U rows at sorted positions >= k
  Matrix suffix = Matrix::Zero(n + 1, p);
  for (Index k = n - 1; k >= 0; --k) {
    suffix.row(k) = suffix.row(k + 1) + fd.U_hat.row(order[k]) * inv_n;
  }

  Matrix out(n, p);
  Index k = 0;
  while (k < n) {
    // first sorted position of this value: every Y_j >= Y_i starts here
    Index stop = k + 1;
    while (stop < n && Y[order[stop]] == Y[order[k]]) ++stop;
    for (Index t = k; t < stop; ++t) {
      out.row(order[t]) = suffix.row(k) - offset.transpose();
    }
    k = stop;
  }
  return out;
}

Matrix score_matrix(const Matrix& U_hat, const Vector& residual, const Matrix& m_hat) {
  if (U_hat.rows() != residual.size() || m_hat.rows() != U_hat.rows() ||
      m_hat.cols() != U_hat.cols()) {
    throw_invalid("score matrix inputs have inconsistent dimensions");
  }
  return residual.asDiagonal() * U_hat + m_hat;
}

double bootstrap_quantile(const Vector& draws, double alpha) {
  check_alpha(alpha);
  const Index B = draws.size();
  if (B < 1) throw_invalid("bootstrap needs at least one replicate");
  const double target = static_cast<double>(B) * (1.0 - alpha);
  // guard against (1 - alpha) * B landing a hair above an integer
  Index order_stat = static_cast<Index>(std::ceil(target - 1e-9));
  order_stat = std::clamp<Index>(order_stat, 0, B);
  if (order_stat == 0) return 0.0;
  std::vector<double> sorted(draws.data(), draws.data() + B);
  std::nth_element(sorted.begin(), sorted.begin() + (order_stat - 1), sorted.end());
  return std::max(0.0, sorted[static_cast<std::size_t>(order_stat - 1)]);
}

BootstrapResult multiplier_bootstrap_with(const Matrix& W, const Matrix& multipliers,
                                          double alpha) {
  if (multipliers.rows() != W.rows()) throw_invalid("multiplier rows must equal n");
  if (multipliers.cols() < 1) throw_invalid("bootstrap needs at least one replicate");
  const double scale = 1.0 / std::sqrt(static_cast<double>(W.rows()));
  BootstrapResult out;
  const Matrix projected = W.transpose() * multipliers;
  out.draws = projected.cwiseAbs().colwise().maxCoeff().transpose() * scale;
  out.critical_value = bootstrap_quantile(out.draws, alpha);
  return out;
}

BootstrapResult multiplier_bootstrap(const Matrix& W, Index B, double alpha, SeedSpec seed) {
  if (B < 1) throw_invalid("bootstrap replicate count must be at least 1");
  check_alpha(alpha);
  const Index n = W.rows();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  BootstrapResult out;
  out.draws.resize(B);
  const Index blocks = (B + kBootstrapBlock - 1) / kBootstrapBlock;
  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t block) {
    const Index first = static_cast<Index>(block) * kBootstrapBlock;
    const Index width = std::min(kBootstrapBlock, B - first);
    Matrix N(n, width);
    for (Index c = 0; c < width; ++c) {
      RandomStream stream(seed.child(static_cast<std::uint64_t>(first + c)));
      for (Index i = 0; i < n; ++i) N(i, c) = stream.normal();
    }
    const Matrix projected = W.transpose() * N;
    for (Index c = 0; c < width; ++c) {
      out.draws[first + c] = projected.col(c).cwiseAbs().maxCoeff() * scale;
    }
  });
  out.critical_value = bootstrap_quantile(out.draws, alpha);
  return out;
}

FastResult fast_test(const Dataset& ds, const FastOptions& options) {
  check_alpha(options.alpha);
  if (options.bootstrap < 1) throw_invalid("bootstrap replicate count must be at least 1");
  const CenteredMatrix centered = center_columns(ds.X());
  const FactorDecomposition fd = estimate_factors(centered.centered, options.K, options.K_max);
  const TransformedResponse h = rank_transform(ds.Y());
  const FastStatistic stat = fast_statistic(fd, h);
  const Matrix m_hat = m_hat_matrix(fd, ds.Y());
  const Matrix W = score_matrix(fd.U_hat, stat.residual, m_hat);
  BootstrapResult boot = multiplier_bootstrap(W, options.bootstrap, options.alpha, options.seed);

  FastResult out;
  out.M_n = stat.M_n;
  out.T_n = stat.T_n;
  out.critical_value = boot.critical_value;
  out.reject = stat.M_n >= boot.critical_value;
  const auto exceed = (boot.draws.array() >= stat.M_n).count();
  out.p_value = static_cast<double>(1 + exceed) / static_cast<double>(options.bootstrap + 1);
  out.B = options.bootstrap;
  out.K = fd.K;
  out.gamma_hat = stat.gamma_hat;
  out.draws = std::move(boot.draws);
  return out;
}

}  // namespace fasim
