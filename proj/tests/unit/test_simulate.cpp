#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fasim/error.hpp"
#include "fasim/parallel.hpp"
#include "fasim/simulate.hpp"
#include "test_support.hpp"

namespace fasim {
namespace {

DgpConfig small_testing(double omega, std::uint64_t seed) {
  DgpConfig cfg = testing_config(Model::Linear, 30, NoiseSpec::gaussian(0.25),
                                 FactorCase::IidNormal, false);
  cfg.n = 60;
  cfg.omega = omega;
  cfg.seed = {seed, 0};
  return cfg;
}

TEST(Generate, IsReproducible) {
  const auto a = generate(small_testing(0.5, 1));
  const auto b = generate(small_testing(0.5, 1));
  EXPECT_EQ(a.data.X(), b.data.X());
  EXPECT_EQ(a.data.Y(), b.data.Y());
  const auto c = generate(small_testing(0.5, 2));
  EXPECT_NE(a.data.Y(), c.data.Y());
}

TEST(Generate, OmegaSharesEveryOtherDraw) {
  const auto null = generate(small_testing(0.0, 3));
  const auto alt = generate(small_testing(0.7, 3));
  EXPECT_EQ(null.data.X(), alt.data.X());
  const Vector diff = alt.truth.index - null.truth.index;
  EXPECT_LT((diff - alt.truth.U.leftCols(3).rowwise().sum() * 0.7).cwiseAbs().maxCoeff(), 1e-12);
  // the null response ignores u entirely
  EXPECT_EQ(null.truth.beta.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Generate, NoiselessLinearModelIsTheIndex) {
  DgpConfig cfg = small_testing(0.5, 4);
  cfg.noise = NoiseSpec::gaussian(0.0);
  const auto sim = generate(cfg);
  const Vector expected = sim.truth.U * sim.truth.beta + sim.truth.F * sim.truth.gamma;
  EXPECT_LT((sim.data.Y() - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(rank_transform(sim.data.Y()).ranks, rank_transform(expected).ranks);
}

TEST(Generate, StructureOfTheDesign) {
  DgpConfig cfg = small_testing(0.5, 5);
  cfg.model = Model::Nonlinear;
  const auto sim = generate(cfg);
  EXPECT_LT((sim.data.X() - sim.truth.F * sim.truth.B.transpose() - sim.truth.U)
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  EXPECT_LT((sim.data.Y() - sim.truth.index.array().exp().matrix()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(sim.truth.B.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_EQ(sim.truth.beta.head(3), Vector::Constant(3, 0.5));
  EXPECT_EQ(sim.truth.beta.tail(27).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Generate, IdiosyncraticCovarianceMoments) {
  DgpConfig cfg = testing_config(Model::Linear, 8, NoiseSpec::gaussian(0.25),
                                 FactorCase::IidNormal, false);
  cfg.n = 100000;
  cfg.seed = {6, 0};
  const auto sim = generate(cfg);
  const Matrix& U = sim.truth.U;
  const Matrix S = U.transpose() * U / static_cast<double>(cfg.n);
  const Matrix truth = sigma_u(cfg);
  for (Index i = 0; i < 8; ++i) {
    for (Index j = 0; j < 8; ++j) {
      // Var(u_i u_j) = Sigma_ii Sigma_jj + Sigma_ij^2 for Gaussian rows
      const double se = std::sqrt((1.0 + truth(i, j) * truth(i, j)) / cfg.n);
      // 4 SE keeps the family-wise error over 36 distinct entries near 0.2%
      EXPECT_LE(std::abs(S(i, j) - truth(i, j)), 4.0 * se) << i << "," << j;
    }
  }
}

TEST(Generate, Ar1FactorAutocovariance) {
  DgpConfig cfg = small_testing(0.0, 7);
  cfg.factor_case = FactorCase::Ar1;
  cfg.n = 100000;
  cfg.p = 3;
  cfg.s = 0;
  const Matrix F = generate(cfg).truth.F;
  Matrix Phi(2, 2);
  Phi << 0.4, 0.16, 0.16, 0.4;
  Matrix V = Matrix::Identity(2, 2);
  for (int it = 0; it < 200; ++it) V = Phi * V * Phi.transpose() + Matrix::Identity(2, 2);
  const Index n = F.rows();
  const Matrix lag1 =
      F.bottomRows(n - 1).transpose() * F.topRows(n - 1) / static_cast<double>(n - 1);
  const Matrix var = F.transpose() * F / static_cast<double>(n);
  EXPECT_LT((lag1 - Phi * V).cwiseAbs().maxCoeff(), 0.03);
  EXPECT_LT((var - V).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Generate, ValidatesConfigs) {
  DgpConfig cfg = small_testing(0.5, 8);
  cfg.s = 31;
  EXPECT_THROW(generate(cfg), Error);
  cfg = small_testing(0.5, 8);
  cfg.gamma = Vector::Ones(3);
  EXPECT_THROW(generate(cfg), Error);
  cfg = small_testing(0.5, 8);
  cfg.noise = NoiseSpec::student_t(0);
  EXPECT_THROW(generate(cfg), Error);
  cfg = small_testing(0.5, 8);
  cfg.outliers = OutlierSpec{1.5, 10.0};
  EXPECT_THROW(generate(cfg), Error);
}

TEST(InjectOutliers, Rules) {
  Vector Y(10);
  for (Index i = 0; i < 10; ++i) Y[i] = static_cast<double>(i + 1);
  EXPECT_EQ(inject_outliers(Y, 0.0, 10.0, {1, 0}), Y);
  EXPECT_EQ(inject_outliers(Y, 1.0, 0.0, {1, 0}), Y);
  const Vector out = inject_outliers(Y, 0.1, 10.0, {1, 0});
  const Vector diff = out - Y;
  EXPECT_EQ((diff.array() != 0.0).count(), 1);
  EXPECT_EQ(diff.maxCoeff(), 100.0);

  Vector big = testing::random_vector(200, 3);
  const Vector polluted = inject_outliers(big, 0.1, 10.0, {2, 0});
  const Vector shift = polluted - big;
  EXPECT_EQ((shift.array() != 0.0).count(), 20);
  EXPECT_NEAR(shift.maxCoeff(), 10.0 * big.maxCoeff(), 1e-12);
  EXPECT_THROW(inject_outliers(Y, -0.1, 10.0, {}), Error);
  EXPECT_THROW(inject_outliers(Y, 0.1, -1.0, {}), Error);
}

TEST(BetaHOracle, ZeroSignal) {
  DgpConfig cfg = estimation_config(Model::Linear, 200, 20, NoiseSpec::gaussian(1.0));
  cfg.omega = 0.0;
  const auto o = beta_h_oracle(cfg, 200000);
  for (Index j = 0; j < 3; ++j) EXPECT_LE(std::abs(o.beta_h[j]), 3.0 * o.se[j]);
  EXPECT_EQ(o.beta_h.tail(17).cwiseAbs().maxCoeff(), 0.0);
}

TEST(BetaHOracle, ProportionalToBeta) {
  const DgpConfig cfg = estimation_config(Model::Linear, 200, 20, NoiseSpec::gaussian(1.0));
  const auto o = beta_h_oracle(cfg, 1000000);
  Vector beta = Vector::Zero(20);
  beta.head(3).setConstant(1.0);
  const double cosine = o.beta_h.dot(beta) / (o.beta_h.norm() * beta.norm());
  EXPECT_GE(cosine, 0.999);
  EXPECT_GT(o.beta_h[0], 0.0);
}

TEST(BetaHOracle, MonotoneLinkInvariance) {
  const DgpConfig linear = estimation_config(Model::Linear, 200, 10, NoiseSpec::student_t(3));
  DgpConfig nonlinear = linear;
  nonlinear.model = Model::Nonlinear;
  const auto a = beta_h_oracle(linear, 100000);
  const auto b = beta_h_oracle(nonlinear, 100000);
  EXPECT_EQ(a.beta_h, b.beta_h);
}

// With Gaussian noise the index I ~ N(0, v) and F(I) = Phi(I / sqrt(v)), so by
// Stein's lemma Cov(u_j, F(I)) = Cov(u_j, I) E[phi(I / sqrt v)] / sqrt(v).
TEST(BetaHOracle, GaussianClosedForm) {
  DgpConfig cfg = estimation_config(Model::Linear, 200, 10, NoiseSpec::gaussian(1.0));
  const auto o = beta_h_oracle(cfg, 1000000);
  // index = u_S' beta_S + f' gamma + eps ~ N(0, v) with v = 3 w^2 + 0.5 + 1
  const double w = 0.5;
  const double v = 3.0 * w * w + 0.5 + 1.0;
  // E[phi(Z)] = 1 / sqrt(4 pi) for Z ~ N(0, 1)
  const double expected = w / std::sqrt(v) / std::sqrt(4.0 * M_PI);
  for (Index j = 0; j < 3; ++j) EXPECT_NEAR(o.beta_h[j], expected, 4.0 * o.se[j] + 1e-4);
}

TEST(Report, CsvAndLookups) {
  ExperimentReport report;
  report.experiment = "demo";
  report.rows.push_back({"cfg", "omega", 0.0, "rejection_rate", 0.05, 0.01, 200});
  report.rows.push_back({"cfg", "omega", 0.5, "rejection_rate", 1.0, 0.0, 200});
  std::ostringstream os;
  report.write_csv(os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
            "experiment,config,grid_name,grid_value,metric,value,mc_se,replications");
  EXPECT_EQ(report.find("rejection_rate", 0.5)->value, 1.0);
  EXPECT_EQ(report.find("rejection_rate", 0.25), nullptr);
  EXPECT_EQ(report.series("rejection_rate").size(), 2u);
  EXPECT_NEAR(proportion_se(0.05, 200), std::sqrt(0.05 * 0.95 / 200), 1e-15);
}

TEST(SizePower, AlphaOneRejectsEverywhere) {
  PowerOptions opt;
  opt.replications = 5;
  opt.bootstrap = 50;
  opt.alpha = 1.0;
  const auto report = run_size_power({0.0, 0.5}, small_testing(0.0, 9), opt);
  for (const auto& row : report.series("rejection_rate")) EXPECT_EQ(row.value, 1.0);
}

TEST(SizePower, IndependentOfThreadCount) {
  PowerOptions opt;
  opt.replications = 12;
  opt.bootstrap = 100;
  set_thread_count(1);
  const auto a = run_size_power({0.0, 0.3}, small_testing(0.0, 10), opt);
  set_thread_count(8);
  const auto b = run_size_power({0.0, 0.3}, small_testing(0.0, 10), opt);
  set_thread_count(1);
  std::ostringstream sa, sb;
  a.write_csv(sa);
  b.write_csv(sb);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Estimation, NullModelReportsAbsoluteError) {
  DgpConfig cfg = estimation_config(Model::Linear, 100, 30, NoiseSpec::gaussian(1.0));
  cfg.omega = 0.0;
  EstimationOptions opt;
  opt.replications = 6;
  opt.oracle_draws = 20000;
  const auto report = run_estimation_error({100, 200}, cfg, opt);
  for (double n : {100.0, 200.0}) {
    const auto* err = report.find("abs_l2", n);
    ASSERT_NE(err, nullptr);
    const double lambda = report.find("mean_lambda", n)->value;
    EXPECT_LE(err->value, lambda * std::sqrt(30.0));
  }
  EXPECT_EQ(report.find("rel_l2", 100.0), nullptr);
}

TEST(Estimation, RateGrid) {
  EXPECT_EQ(n_for_rate(0.10, 3, 500), 1864);
  EXPECT_EQ(n_for_rate(0.30, 3, 500), 207);
  EXPECT_NEAR(scaled_tuning(2.0, 200, 500), 2.0 * std::sqrt(std::log(500.0) / 200.0), 1e-15);
}

TEST(Coverage, MetricsAreReported) {
  DgpConfig cfg = estimation_config(Model::Linear, 150, 30, NoiseSpec::gaussian(0.25));
  CoverageOptions opt;
  opt.replications = 4;
  opt.oracle_draws = 20000;
  const auto report = run_coverage(cfg, opt);
  for (const char* m : {"CP", "AL", "CP_S", "AL_S", "CP_Sc", "AL_Sc"}) {
    const auto* row = report.find(m, 0.05);
    ASSERT_NE(row, nullptr) << m;
    EXPECT_GE(row->value, 0.0);
  }
  const double cp = report.find("CP", 0.05)->value;
  const double expected = (3.0 * report.find("CP_S", 0.05)->value +
                           27.0 * report.find("CP_Sc", 0.05)->value) / 30.0;
  EXPECT_NEAR(cp, expected, 1e-12);
}

TEST(Coverage, HalfLevelCalibration) {
  DgpConfig cfg = estimation_config(Model::Linear, 200, 50, NoiseSpec::gaussian(0.25));
  CoverageOptions opt;
  opt.replications = 20;
  opt.alpha = 0.5;
  opt.oracle_draws = 200000;
  const auto report = run_coverage(cfg, opt);
  EXPECT_NEAR(report.find("CP", 0.5)->value, 0.5, 0.05);
}

}  // namespace
}  // namespace fasim
