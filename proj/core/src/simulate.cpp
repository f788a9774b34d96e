#include "fasim/simulate.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fasim/error.hpp"
#include "fasim/fast.hpp"
#include "fasim/inference.hpp"
#include "fasim/parallel.hpp"

namespace fasim {
namespace {

enum Stream : std::uint64_t {
  kLoadings = 0,
  kFactors = 1,
  kIdiosyncratic = 2,
  kNoise = 3,
  kOutliers = 4,
  kOracle = 5,
  kOracleReference = 6,
  kTuning = 7,
  kBootstrap = 8,
};

double draw_noise(RandomStream& rng, const NoiseSpec& noise) {
  switch (noise.kind) {
    case NoiseSpec::Kind::Gaussian:
      return std::sqrt(noise.param) * rng.normal();
    case NoiseSpec::Kind::Uniform:
      return rng.uniform(-noise.param, noise.param);
    case NoiseSpec::Kind::StudentT:
      return rng.student_t(static_cast<int>(noise.param));
  }
  return 0.0;
}

Matrix ar1_factor_matrix(Index K) {
  Matrix Phi(K, K);
  for (Index i = 0; i < K; ++i) {
    for (Index j = 0; j < K; ++j) {
      Phi(i, j) = std::pow(0.4, static_cast<double>(std::abs(i - j) + 1));
    }
  }
  return Phi;
}

Matrix draw_factors(const DgpConfig& cfg, Index n, RandomStream& rng) {
  Matrix F(n, cfg.K);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < cfg.K; ++k) F(i, k) = rng.normal();
  }
  if (cfg.factor_case == FactorCase::Ar1) {
    const Matrix Phi = ar1_factor_matrix(cfg.K);
    for (Index i = 1; i < n; ++i) {
      const Vector prev = F.row(i - 1).transpose();
      F.row(i) += (Phi * prev).transpose();
    }
  }
  return F;
}

// rows with covariance Sigma_u restricted to the first `cols` coordinates
Matrix draw_idiosyncratic(const DgpConfig& cfg, Index n, Index cols, RandomStream& rng) {
  Matrix U(n, cols);
  const double rho = cfg.u_structure == UStructure::Toeplitz ? cfg.u_rho : 0.0;
  const double innovation = std::sqrt(1.0 - rho * rho);
  for (Index i = 0; i < n; ++i) {
    double prev = 0.0;
    for (Index j = 0; j < cols; ++j) {
      const double z = rng.normal();
      prev = j == 0 ? z : rho * prev + innovation * z;
      U(i, j) = prev;
    }
  }
  return U;
}

Vector true_beta(const DgpConfig& cfg) {
  Vector beta = Vector::Zero(cfg.p);
  beta.head(cfg.s).setConstant(cfg.omega);
  return beta;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double mean_se(const std::vector<double>& v) {
  const auto R = static_cast<double>(v.size());
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (R - 1.0) / R);
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

DgpConfig testing_config(Model model, Index p, NoiseSpec noise, FactorCase factors,
                         bool outliers) {
  DgpConfig cfg;
  cfg.model = model;
  cfg.n = 200;
  cfg.p = p;
  cfg.noise = noise;
  cfg.factor_case = factors;
  cfg.u_structure = UStructure::Toeplitz;
  if (outliers) cfg.outliers = OutlierSpec{};
  return cfg;
}

DgpConfig estimation_config(Model model, Index n, Index p, NoiseSpec noise) {
  DgpConfig cfg;
  cfg.model = model;
  cfg.n = n;
  cfg.p = p;
  cfg.noise = noise;
  cfg.omega = 0.5;
  cfg.u_structure = UStructure::Iid;
  cfg.factor_case = FactorCase::IidNormal;
  return cfg;
}

void validate(const DgpConfig& cfg) {
  if (cfg.n < 2) throw_invalid("n must be at least 2");
  if (cfg.p < 1) throw_invalid("p must be at least 1");
  if (cfg.K < 1) throw_invalid("K must be at least 1");
  if (cfg.s < 0 || cfg.s > cfg.p) throw_invalid("s must lie in [0, p]");
  if (cfg.gamma.size() != cfg.K) throw_invalid("gamma must have K entries");
  if (!std::isfinite(cfg.omega)) throw_invalid("omega must be finite");
  if (cfg.u_structure == UStructure::Toeplitz && !(std::abs(cfg.u_rho) < 1.0)) {
    throw_invalid("Toeplitz correlation must lie in (-1, 1)");
  }
  switch (cfg.noise.kind) {
    case NoiseSpec::Kind::Gaussian:
      if (!(cfg.noise.param >= 0.0)) throw_invalid("noise variance must be nonnegative");
      break;
    case NoiseSpec::Kind::Uniform:
      if (!(cfg.noise.param >= 0.0)) throw_invalid("uniform half-width must be nonnegative");
      break;
    case NoiseSpec::Kind::StudentT:
      if (!(cfg.noise.param >= 1.0) || cfg.noise.param != std::floor(cfg.noise.param)) {
        throw_invalid("t noise needs a positive integer df");
      }
      break;
  }
  if (cfg.outliers) {
    if (!(cfg.outliers->fraction >= 0.0 && cfg.outliers->fraction <= 1.0)) {
      throw_invalid("outlier fraction must lie in [0, 1]");
    }
    if (!(cfg.outliers->multiplier >= 0.0)) throw_invalid("outlier multiplier must be >= 0");
  }
}

std::string describe(const NoiseSpec& noise) {
  switch (noise.kind) {
    case NoiseSpec::Kind::Gaussian:
      return "gaussian:" + format_double(noise.param);
    case NoiseSpec::Kind::Uniform:
      return "uniform:" + format_double(noise.param);
    case NoiseSpec::Kind::StudentT:
      return "t:" + format_double(noise.param);
  }
  return "?";
}

std::string describe(const DgpConfig& cfg) {
  std::ostringstream os;
  os << "model=" << (cfg.model == Model::Linear ? "linear" : "nonlinear") << " n=" << cfg.n
     << " p=" << cfg.p << " K=" << cfg.K << " s=" << cfg.s
     << " factor=" << (cfg.factor_case == FactorCase::IidNormal ? "iid" : "ar1")
     << " noise=" << describe(cfg.noise) << " u="
     << (cfg.u_structure == UStructure::Iid ? std::string("iid")
                                            : "toeplitz:" + format_double(cfg.u_rho))
     << " gamma=";
  for (Index k = 0; k < cfg.gamma.size(); ++k) {
    os << (k ? "," : "") << format_double(cfg.gamma[k]);
  }
  os << " outliers=";
  if (cfg.outliers) {
    os << format_double(cfg.outliers->fraction) << ":" << format_double(cfg.outliers->multiplier);
  } else {
    os << "none";
  }
  return os.str();
}

Simulated generate(const DgpConfig& cfg) {
  validate(cfg);
  RandomStream load_rng(cfg.seed.child(kLoadings));
  RandomStream factor_rng(cfg.seed.child(kFactors));
  RandomStream u_rng(cfg.seed.child(kIdiosyncratic));
  RandomStream noise_rng(cfg.seed.child(kNoise));

  Truth truth;
  truth.B.resize(cfg.p, cfg.K);
  for (Index j = 0; j < cfg.p; ++j) {
    for (Index k = 0; k < cfg.K; ++k) truth.B(j, k) = load_rng.uniform(-1.0, 1.0);
  }
  truth.F = draw_factors(cfg, cfg.n, factor_rng);
  truth.U = draw_idiosyncratic(cfg, cfg.n, cfg.p, u_rng);
  truth.beta = true_beta(cfg);
  truth.gamma = cfg.gamma;
  truth.index = truth.U * truth.beta + truth.F * truth.gamma;
  for (Index i = 0; i < cfg.n; ++i) truth.index[i] += draw_noise(noise_rng, cfg.noise);

  Vector Y = truth.index;
  if (cfg.model == Model::Nonlinear) Y = Y.array().exp();
  if (cfg.outliers) {
    Y = inject_outliers(Y, cfg.outliers->fraction, cfg.outliers->multiplier,
                        cfg.seed.child(kOutliers));
  }
  Matrix X = truth.F * truth.B.transpose() + truth.U;
  return Simulated{Dataset(std::move(X), std::move(Y)), std::move(truth)};
}

Vector inject_outliers(const Vector& Y, double fraction, double multiplier, SeedSpec seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw_invalid("outlier fraction must lie in [0, 1]");
  if (!(multiplier >= 0.0)) throw_invalid("outlier multiplier must be nonnegative");
  const Index n = Y.size();
  Vector out = Y;
  if (n == 0) return out;
  // the small guard keeps e.g. 0.1 * 10 from flooring to 0
  const auto count = static_cast<Index>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  if (count == 0) return out;
  const double shift = multiplier * Y.maxCoeff();
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  RandomStream rng(seed);
  for (Index k = 0; k < count; ++k) {
    const auto j = k + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - k)));
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(j)]);
    out[idx[static_cast<std::size_t>(k)]] += shift;
  }
  return out;
}

Matrix sigma_u(const DgpConfig& cfg) {
  Matrix S = Matrix::Identity(cfg.p, cfg.p);
  if (cfg.u_structure == UStructure::Toeplitz) {
    for (Index i = 0; i < cfg.p; ++i) {
      for (Index j = 0; j < cfg.p; ++j) {
        S(i, j) = std::pow(cfg.u_rho, static_cast<double>(std::abs(i - j)));
      }
    }
  }
  return S;
}

OracleEstimate beta_h_oracle(const DgpConfig& cfg, Index N_mc) {
  validate(cfg);
  if (N_mc < 2) throw_invalid("oracle needs at least 2 draws");
  OracleEstimate out;
  out.beta_h = Vector::Zero(cfg.p);
  out.se = Vector::Zero(cfg.p);
  const Index s = cfg.s;
  if (s == 0) return out;

  // the link is strictly increasing, so ranks (and beta_h) are computed on
  // the inner index for both models
  auto draw_index = [&](SeedSpec seed, Matrix* keep_u) {
    RandomStream factor_rng(seed.child(kFactors));
    RandomStream u_rng(seed.child(kIdiosyncratic));
    RandomStream noise_rng(seed.child(kNoise));
    DgpConfig iid = cfg;
    iid.factor_case = FactorCase::IidNormal;  // stationary law of population draws
    Matrix F = draw_factors(iid, N_mc, factor_rng);
    if (cfg.factor_case == FactorCase::Ar1) {
      // stationary covariance of the AR(1) factors: solve V = Phi V Phi^T + I
      const Matrix Phi = ar1_factor_matrix(cfg.K);
      Matrix V = Matrix::Identity(cfg.K, cfg.K);
      for (int it = 0; it < 200; ++it) V = Phi * V * Phi.transpose() + Matrix::Identity(cfg.K, cfg.K);
      const Matrix L = Eigen::LLT<Matrix>(V).matrixL();
      F = F * L.transpose();
    }
    Matrix U = draw_idiosyncratic(cfg, N_mc, s, u_rng);
    Vector index = U * Vector::Constant(s, cfg.omega) + F * cfg.gamma;
    for (Index i = 0; i < N_mc; ++i) index[i] += draw_noise(noise_rng, cfg.noise);
    if (keep_u) *keep_u = std::move(U);
    return index;
  };

  Matrix U;
  const Vector index = draw_index(cfg.seed.child(kOracle), &U);
  Vector reference = draw_index(cfg.seed.child(kOracleReference), nullptr);
  std::sort(reference.data(), reference.data() + N_mc);
  Vector h(N_mc);
  for (Index i = 0; i < N_mc; ++i) {
    const auto count = std::upper_bound(reference.data(), reference.data() + N_mc, index[i]) -
                       reference.data();
    h[i] = static_cast<double>(count) / static_cast<double>(N_mc) - 0.5;
  }
  h.array() -= h.mean();

  DgpConfig head = cfg;
  head.p = s;
  const Matrix Sigma_SS_inv = sigma_u(head).inverse();
  // per-draw contributions z_i = Sigma_SS^{-1} u_i h_i; beta_h is their mean
  const Matrix Z = (U.array().colwise() * h.array()).matrix() * Sigma_SS_inv.transpose();
  const Vector m = Z.colwise().mean().transpose();
  const Matrix centered = Z.rowwise() - m.transpose();
  const Vector var = centered.colwise().squaredNorm().transpose() / static_cast<double>(N_mc - 1);
  out.beta_h.head(s) = m;
  out.se.head(s) = (var / static_cast<double>(N_mc)).cwiseSqrt();
  return out;
}

const ReportRow* ExperimentReport::find(const std::string& metric, double grid_value) const {
  for (const auto& row : rows) {
    if (row.metric == metric && row.grid_value == grid_value) return &row;
  }
  return nullptr;
}

std::vector<ReportRow> ExperimentReport::series(const std::string& metric) const {
  std::vector<ReportRow> out;
  for (const auto& row : rows) {
    if (row.metric == metric) out.push_back(row);
  }
  return out;
}

void ExperimentReport::write_csv(std::ostream& out) const {
  out << "experiment,config,grid_name,grid_value,metric,value,mc_se,replications\n";
  for (const auto& row : rows) {
    out << experiment << ",\"" << row.config << "\"," << row.grid_name << ","
        << format_double(row.grid_value) << "," << row.metric << "," << format_double(row.value)
        << "," << format_double(row.mc_se) << "," << row.replications << "\n";
  }
}

double proportion_se(double p_hat, Index R) noexcept {
  if (R < 1) return 0.0;
  return std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / static_cast<double>(R));
}

ExperimentReport run_size_power(const std::vector<double>& omega_grid, const DgpConfig& base,
                                const PowerOptions& options) {
  validate(base);
  if (omega_grid.empty()) throw_invalid("omega grid is empty");
  if (options.replications < 1) throw_invalid("replications must be at least 1");
  ExperimentReport report;
  report.experiment = "size_power";
  const auto R = static_cast<std::size_t>(options.replications);
  for (const double omega : omega_grid) {
    DgpConfig cfg = base;
    cfg.omega = omega;
    validate(cfg);
    std::vector<char> rejected(R, 0);
    std::vector<double> p_values(R, 0.0);
    parallel_for(R, [&](std::size_t r) {
      DgpConfig rep = cfg;
      rep.seed = SeedSpec{base.seed.root_seed, static_cast<std::uint64_t>(r)};
      const Simulated sim = generate(rep);
      FastOptions fast;
      fast.K = rep.K;
      fast.bootstrap = options.bootstrap;
      fast.alpha = options.alpha;
      fast.seed = rep.seed.child(kBootstrap);
      const FastResult res = fast_test(sim.data, fast);
      rejected[r] = res.reject ? 1 : 0;
      p_values[r] = res.p_value;
    });
    const double rate =
        static_cast<double>(std::count(rejected.begin(), rejected.end(), 1)) / static_cast<double>(R);
    report.rows.push_back({describe(cfg), "omega", omega, "rejection_rate", rate,
                           proportion_se(rate, options.replications), options.replications});
    report.rows.push_back({describe(cfg), "omega", omega, "mean_p_value", mean(p_values),
                           mean_se(p_values), options.replications});
  }
  return report;
}

double scaled_tuning(double scale, Index n, Index p) {
  if (!(scale > 0.0)) throw_invalid("tuning scale must be positive");
  return scale * std::sqrt(std::log(static_cast<double>(std::max<Index>(p, 2))) /
                           static_cast<double>(n));
}

Index n_for_rate(double rate, Index s, Index p) {
  if (!(rate > 0.0)) throw_invalid("rate must be positive");
  const double n = static_cast<double>(s) * std::log(static_cast<double>(p)) / (rate * rate);
  return static_cast<Index>(std::llround(n));
}

ExperimentReport run_estimation_error(const std::vector<Index>& n_grid, const DgpConfig& base,
                                      const EstimationOptions& options) {
  validate(base);
  if (n_grid.empty()) throw_invalid("n grid is empty");
  if (options.replications < 1) throw_invalid("replications must be at least 1");
  ExperimentReport report;
  report.experiment = "estimation_error";
  // beta_h does not depend on n
  DgpConfig oracle_cfg = base;
  oracle_cfg.seed = base.seed.child(kOracle);
  const OracleEstimate oracle = beta_h_oracle(oracle_cfg, options.oracle_draws);
  const double oracle_norm = oracle.beta_h.norm();
  const bool null_model = base.s == 0 || base.omega == 0.0;
  const auto R = static_cast<std::size_t>(options.replications);

  for (const Index n : n_grid) {
    DgpConfig cfg = base;
    cfg.n = n;
    validate(cfg);
    std::vector<double> l2(R, 0.0);
    std::vector<double> l1(R, 0.0);
    std::vector<double> lambdas(R, 0.0);
    parallel_for(R, [&](std::size_t r) {
      DgpConfig rep = cfg;
      rep.seed = SeedSpec{base.seed.root_seed, static_cast<std::uint64_t>(r)};
      const Simulated sim = generate(rep);
      FitOptions fit;
      fit.K = rep.K;
      fit.cv_folds = options.cv_folds;
      fit.seed = rep.seed.child(kTuning);
      if (options.lambda.scale && options.lambda.noise_scaled) {
        fit.noise_scale = *options.lambda.scale;
      } else if (options.lambda.scale) {
        fit.lambda = scaled_tuning(*options.lambda.scale, n, cfg.p);
      }
      const PenalizedFit est = fit_fasim(sim.data, fit);
      const Vector diff = est.beta_hat - oracle.beta_h;
      if (null_model) {
        l2[r] = diff.norm();
        l1[r] = diff.lpNorm<1>();
      } else {
        l2[r] = diff.norm() / oracle_norm;
        l1[r] = diff.lpNorm<1>() / oracle.beta_h.lpNorm<1>();
      }
      lambdas[r] = est.lambda;
    });
    const std::string config = describe(cfg);
    const auto nd = static_cast<double>(n);
    const double rate = std::sqrt(static_cast<double>(cfg.s) *
                                  std::log(static_cast<double>(cfg.p)) / nd);
    report.rows.push_back({config, "n", nd, "rate", rate, 0.0, options.replications});
    report.rows.push_back({config, "n", nd, null_model ? "abs_l2" : "rel_l2", mean(l2),
                           mean_se(l2), options.replications});
    report.rows.push_back({config, "n", nd, null_model ? "abs_l1" : "rel_l1", mean(l1),
                           mean_se(l1), options.replications});
    report.rows.push_back({config, "n", nd, "mean_lambda", mean(lambdas), mean_se(lambdas),
                           options.replications});
    // the oracle's own uncertainty, for reading the error curves
    report.rows.push_back({config, "n", nd, "oracle_norm", oracle_norm, oracle.se.norm(),
                           options.oracle_draws});
  }
  return report;
}

ExperimentReport run_coverage(const DgpConfig& base, const CoverageOptions& options) {
  validate(base);
  if (options.replications < 1) throw_invalid("replications must be at least 1");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw_invalid("alpha must lie in (0, 1)");
  ExperimentReport report;
  report.experiment = "coverage";
  DgpConfig oracle_cfg = base;
  oracle_cfg.seed = base.seed.child(kOracle);
  const OracleEstimate oracle = beta_h_oracle(oracle_cfg, options.oracle_draws);

  const auto R = static_cast<std::size_t>(options.replications);
  const Index p = base.p;
  const Index s = base.s;
  Matrix per_rep(static_cast<Index>(R), 6);  // CP, AL, CP_S, AL_S, CP_Sc, AL_Sc
  parallel_for(R, [&](std::size_t r) {
    DgpConfig rep = base;
    rep.seed = SeedSpec{base.seed.root_seed, static_cast<std::uint64_t>(r)};
    const Simulated sim = generate(rep);
    InferenceOptions inf;
    inf.alpha = options.alpha;
    inf.fit.K = rep.K;
    inf.fit.cv_folds = options.cv_folds;
    inf.fit.seed = rep.seed.child(kTuning);
    if (options.lambda.scale && options.lambda.noise_scaled) {
      inf.fit.noise_scale = *options.lambda.scale;
    } else if (options.lambda.scale) {
      inf.fit.lambda = scaled_tuning(*options.lambda.scale, rep.n, p);
    }
    if (options.delta.scale) {
      inf.delta = scaled_tuning(*options.delta.scale, rep.n, p);
    } else {
      inf.cv_delta = true;
    }
    const DebiasedInference res = infer_fasim(sim.data, inf);
    double cover_s = 0.0, cover_c = 0.0, len_s = 0.0, len_c = 0.0;
    for (Index j = 0; j < p; ++j) {
      const bool covers = res.ci_lower[j] <= oracle.beta_h[j] && oracle.beta_h[j] <= res.ci_upper[j];
      const double len = res.ci_upper[j] - res.ci_lower[j];
      if (j < s) {
        cover_s += covers;
        len_s += len;
      } else {
        cover_c += covers;
        len_c += len;
      }
    }
    const auto row = static_cast<Index>(r);
    const double ps = static_cast<double>(s);
    const double pc = static_cast<double>(p - s);
    per_rep(row, 0) = (cover_s + cover_c) / static_cast<double>(p);
    per_rep(row, 1) = (len_s + len_c) / static_cast<double>(p);
    per_rep(row, 2) = s > 0 ? cover_s / ps : 0.0;
    per_rep(row, 3) = s > 0 ? len_s / ps : 0.0;
    per_rep(row, 4) = p > s ? cover_c / pc : 0.0;
    per_rep(row, 5) = p > s ? len_c / pc : 0.0;
  });

  static const char* names[] = {"CP", "AL", "CP_S", "AL_S", "CP_Sc", "AL_Sc"};
  const std::string config = describe(base);
  for (Index m = 0; m < 6; ++m) {
    std::vector<double> v(per_rep.col(m).data(), per_rep.col(m).data() + per_rep.rows());
    const double value = mean(v);
    const double se = m % 2 == 0 ? proportion_se(value, options.replications) : mean_se(v);
    report.rows.push_back({config, "alpha", options.alpha, names[m], value, se,
                           options.replications});
  }
  return report;
}

}  // namespace fasim
