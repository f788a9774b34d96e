#include "fasim/inference.hpp"

#include <Eigen/SparseCore>
#include <cmath>

#include "fasim/error.hpp"
#include "fasim/fast.hpp"
#include "fasim/normal.hpp"

namespace fasim {

Vector debias(const PenalizedFit& fit, const FactorDecomposition& fd, const TransformedResponse& h,
              const Matrix& Theta) {
  const Index n = fd.n();
  const Index p = fd.p();
  if (h.size() != n || fit.beta_hat.size() != p || Theta.rows() != p || Theta.cols() != p) {
    throw_invalid("debias inputs have inconsistent dimensions");
  }
  const Vector r = h.values - fd.U_hat * fit.beta_hat;
  return fit.beta_hat + Theta * (fd.U_hat.transpose() * r) / static_cast<double>(n);
}

Vector debias(const PenalizedFit& fit, const FactorDecomposition& fd, const TransformedResponse& h,
              const PrecisionEstimate& Theta) {
  return debias(fit, fd, h, Theta.Theta);
}

Vector inference_residuals(const PenalizedFit& fit, const FactorDecomposition& fd) {
  if (fit.projected_h.size() != fd.n() || fit.beta_hat.size() != fd.p()) {
    throw_invalid("fit and factor decomposition come from different samples");
  }
  // projected_h already equals h - F gamma_hat because gamma_hat = F^T h / n
  return fit.projected_h - fd.U_hat * fit.beta_hat;
}

Vector sandwich_sd(const FactorDecomposition& fd, const PenalizedFit& fit, const Matrix& Theta,
                   const Matrix& m_hat) {
  const Index p = fd.p();
  if (Theta.rows() != p || Theta.cols() != p) throw_invalid("Theta must be p x p");
  const Matrix W = score_matrix(fd.U_hat, inference_residuals(fit, fd), m_hat);
  // column j of W Theta^T is W theta_j with theta_j the j-th row of Theta
  const Eigen::SparseMatrix<double> sparse = Matrix(Theta.transpose()).sparseView(1.0, 0.0);
  const Matrix projected = W * sparse;
  return (projected.colwise().squaredNorm().transpose() / static_cast<double>(fd.n())).cwiseSqrt();
}

std::pair<Vector, Vector> confidence_intervals(const Vector& beta_tilde, const Vector& sigma_z,
                                               Index n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw_invalid("alpha must lie in (0, 1)");
  if (beta_tilde.size() != sigma_z.size()) throw_invalid("interval inputs differ in length");
  if (n < 1) throw_invalid("interval needs n >= 1");
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const Vector half = sigma_z * (z / std::sqrt(static_cast<double>(n)));
  return {beta_tilde - half, beta_tilde + half};
}

DebiasedInference infer_fasim(const Dataset& ds, const InferenceOptions& options) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw_invalid("alpha must lie in (0, 1)");
  const FasimModel model = fit_fasim_model(ds, options.fit);
  const FactorDecomposition& fd = model.factors;

  double delta = 0.0;
  if (options.delta) {
    if (!(*options.delta > 0.0)) throw_invalid("delta must be positive");
    delta = *options.delta;
  } else {
    DeltaOptions d;
    d.cross_validate = options.cv_delta;
    d.seed = options.fit.seed.child(1);
    delta = select_delta(fd.U_hat, d);
  }
  const PrecisionEstimate theta = clime(sample_cov_u(fd.U_hat), delta);

  DebiasedInference out;
  out.beta_hat = model.fit.beta_hat;
  out.beta_tilde = debias(model.fit, fd, model.h, theta);
  const Matrix m_hat = m_hat_matrix(fd, ds.Y());
  out.sigma_z = sandwich_sd(fd, model.fit, theta.Theta, m_hat);
  auto [lower, upper] = confidence_intervals(out.beta_tilde, out.sigma_z, ds.n(), options.alpha);
  out.ci_lower = std::move(lower);
  out.ci_upper = std::move(upper);
  out.alpha = options.alpha;
  out.residuals_tilde = inference_residuals(model.fit, fd);
  out.lambda = model.fit.lambda;
  out.delta_n = delta;
  out.K = fd.K;
  return out;
}

}  // namespace fasim
