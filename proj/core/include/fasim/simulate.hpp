#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fasim/data.hpp"
#include "fasim/random.hpp"

namespace fasim {

enum class Model { Linear, Nonlinear };
enum class FactorCase { IidNormal, Ar1 };
enum class UStructure { Toeplitz, Iid };

struct NoiseSpec {
  enum class Kind { Gaussian, Uniform, StudentT };
  Kind kind = Kind::Gaussian;
  double param = 0.25;  // variance, half-width, or degrees of freedom

  static NoiseSpec gaussian(double variance) { return {Kind::Gaussian, variance}; }
  static NoiseSpec uniform(double half_width) { return {Kind::Uniform, half_width}; }
  static NoiseSpec student_t(int df) { return {Kind::StudentT, static_cast<double>(df)}; }
};

struct OutlierSpec {
  double fraction = 0.1;
  double multiplier = 10.0;
};

struct DgpConfig {
  Model model = Model::Linear;
  Index n = 200;
  Index p = 200;
  Index K = 2;
  Index s = 3;
  double omega = 0.0;
  Vector gamma = Vector::Constant(2, 0.5);
  FactorCase factor_case = FactorCase::IidNormal;
  NoiseSpec noise{};
  UStructure u_structure = UStructure::Toeplitz;
  double u_rho = 0.5;
  std::optional<OutlierSpec> outliers;
  SeedSpec seed{};
};

/// Testing design: n = 200, K = 2, Toeplitz(0.5) idiosyncratic rows.
DgpConfig testing_config(Model model, Index p, NoiseSpec noise, FactorCase factors,
                         bool outliers);
/// Estimation / coverage design: i.i.d. standard normal F and U,
/// s = 3, beta_S = 0.5.
DgpConfig estimation_config(Model model, Index n, Index p, NoiseSpec noise);

void validate(const DgpConfig& cfg);
std::string describe(const DgpConfig& cfg);
std::string describe(const NoiseSpec& noise);

struct Truth {
  Vector beta;
  Vector gamma;
  Matrix F;
  Matrix U;
  Matrix B;
  Vector index;  // u'beta + f'gamma + eps, before the link and outliers
};

struct Simulated {
  Dataset data;
  Truth truth;
};

/// Factor/loading/noise draws use separate child streams of cfg.seed, so
/// configs that differ only in omega share every random draw.
Simulated generate(const DgpConfig& cfg);

/// floor(fraction * n) positions drawn without replacement each gain
/// multiplier * max(Y).
Vector inject_outliers(const Vector& Y, double fraction, double multiplier, SeedSpec seed);

/// Population Sigma_u of the idiosyncratic component.
Matrix sigma_u(const DgpConfig& cfg);

struct OracleEstimate {
  Vector beta_h;
  Vector se;
};

/// Monte Carlo beta_h = Sigma_u^{-1} Cov(u, F(Y) - 1/2). Y depends on u only
/// through u_S and u is Gaussian, so beta_h vanishes off S and equals
/// Sigma_SS^{-1} Cov(u_S, F(Y) - 1/2) on it. F is the empirical CDF of a
/// second, independent sample of size N_mc. Outliers are not part of the
/// population. Streams derive from cfg.seed.
OracleEstimate beta_h_oracle(const DgpConfig& cfg, Index N_mc);

struct ReportRow {
  std::string config;
  std::string grid_name;
  double grid_value = 0.0;
  std::string metric;
  double value = 0.0;
  double mc_se = 0.0;
  Index replications = 0;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<ReportRow> rows;

  /// First row with the given metric at the given grid value, or nullptr.
  const ReportRow* find(const std::string& metric, double grid_value) const;
  /// All rows of a metric, in grid order.
  std::vector<ReportRow> series(const std::string& metric) const;
  void write_csv(std::ostream& out) const;
};

/// sqrt(p_hat (1 - p_hat) / R)
double proportion_se(double p_hat, Index R) noexcept;

struct PowerOptions {
  Index replications = 200;
  double alpha = 0.05;
  Index bootstrap = 500;
};

/// Replication r of every omega uses generator stream r (common random
/// numbers), and bootstrap streams derived from it.
ExperimentReport run_size_power(const std::vector<double>& omega_grid, const DgpConfig& base,
                                const PowerOptions& options);

/// lambda or delta as a fixed multiple of sqrt(log p / n), or by
/// cross-validation when scale is absent. For lambda, noise_scaled multiplies
/// the scale by the fitted residual scale as in scaled_lasso.
struct TuningRule {
  std::optional<double> scale;
  bool noise_scaled = false;
};

double scaled_tuning(double scale, Index n, Index p);

struct EstimationOptions {
  Index replications = 100;
  TuningRule lambda{};
  Index cv_folds = 10;
  Index oracle_draws = 1000000;
};

/// s log p / rate^2 rounded to the nearest integer, so that
/// sqrt(s log p / n) is approximately rate.
Index n_for_rate(double rate, Index s, Index p);

/// Relative l2 / l1 error of beta_hat against the oracle for each n. With s = 0
/// the absolute l2 error is reported instead.
ExperimentReport run_estimation_error(const std::vector<Index>& n_grid, const DgpConfig& base,
                                      const EstimationOptions& options);

struct CoverageOptions {
  Index replications = 200;
  double alpha = 0.05;
  TuningRule lambda{2.0, true};
  TuningRule delta{0.85};
  Index cv_folds = 10;
  Index oracle_draws = 1000000;
};

/// CP, AL over all coordinates, over S and over its complement.
ExperimentReport run_coverage(const DgpConfig& base, const CoverageOptions& options);

}  // namespace fasim
