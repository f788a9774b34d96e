#include "fasim/forecast.hpp"

#include <Eigen/QR>
#include <cmath>

#include "fasim/error.hpp"
#include "fasim/fast.hpp"
#include "fasim/parallel.hpp"

namespace fasim {

WindowModel fit_window(const Matrix& X, const Vector& Y, const ForecastOptions& options,
                       SeedSpec seed) {
  FitOptions fit = options.fit;
  fit.seed = seed;
  const FasimModel model = fit_fasim_model(Dataset(X, Y), fit);
  WindowModel out;
  out.means = model.centered.means;
  out.factors = model.factors;
  out.beta_hat = model.fit.beta_hat;
  out.gamma_hat = model.fit.gamma_hat;
  const Vector index = model.factors.F_hat * out.gamma_hat + model.factors.U_hat * out.beta_hat;
  out.link = fit_link(index, Y, options.knots);
  return out;
}

double predict(const WindowModel& model, const Vector& x) {
  const ProjectedObservation obs = project_observation(model.factors, x - model.means);
  return model.link(obs.f.dot(model.gamma_hat) + obs.u.dot(model.beta_hat));
}

double forecast_mse(const std::vector<ForecastPoint>& predictions) {
  if (predictions.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& point : predictions) sum += (point.y - point.y_hat) * (point.y - point.y_hat);
  return sum / static_cast<double>(predictions.size());
}

ForecastReport moving_window_with(const Dataset& panel, Index window,
                                  const WindowPredictor& predictor) {
  const Index T = panel.n();
  if (window < 2 || window >= T) throw_invalid("window must lie in [2, T)");
  ForecastReport out;
  out.predictions.resize(static_cast<std::size_t>(T - window));
  parallel_for(out.predictions.size(), [&](std::size_t k) {
    const Index t = window + static_cast<Index>(k);
    const Matrix X = panel.X().middleRows(t - window, window);
    const Vector Y = panel.Y().segment(t - window, window);
    out.predictions[k] = {t, panel.Y()[t], predictor(X, Y, panel.X().row(t).transpose())};
  });
  out.mse = forecast_mse(out.predictions);
  return out;
}

ForecastReport moving_window_forecast(const Dataset& panel, const ForecastOptions& options) {
  if (options.fit.K && options.window <= *options.fit.K) {
    throw_invalid("window must exceed the number of factors");
  }
  if (options.window < 2 || options.window >= panel.n()) throw_invalid("window must lie in [2, T)");
  const SeedSpec seed = options.fit.seed;
  const Index window = options.window;
  ForecastReport out;
  out.predictions.resize(static_cast<std::size_t>(panel.n() - window));
  parallel_for(out.predictions.size(), [&](std::size_t k) {
    const Index t = window + static_cast<Index>(k);
    const WindowModel model = fit_window(panel.X().middleRows(t - window, window),
                                         panel.Y().segment(t - window, window), options,
                                         seed.child(static_cast<std::uint64_t>(t)));
    out.predictions[k] = {t, panel.Y()[t], predict(model, panel.X().row(t).transpose())};
  });
  out.mse = forecast_mse(out.predictions);
  return out;
}

double least_squares_prediction(const Matrix& X, const Vector& Y, const Vector& x) {
  Matrix design(X.rows(), X.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(X.cols()) = X;
  const Vector coef = design.colPivHouseholderQr().solve(Y);
  return coef[0] + x.dot(coef.tail(X.cols()));
}

ForecastComparison compare_forecasts(const DgpConfig& cfg, const ForecastOptions& options) {
  DgpConfig clean_cfg = cfg;
  clean_cfg.outliers.reset();
  const Simulated sim = generate(clean_cfg);
  const OutlierSpec pollution = cfg.outliers.value_or(OutlierSpec{});
  const Dataset polluted = sim.data.with_response(
      inject_outliers(sim.data.Y(), pollution.fraction, pollution.multiplier,
                      cfg.seed.child(4)));

  // score against clean responses
  auto rescore = [&](ForecastReport report) {
    for (auto& point : report.predictions) point.y = sim.data.Y()[point.t];
    return forecast_mse(report.predictions);
  };
  ForecastComparison out;
  out.fasim_clean = moving_window_forecast(sim.data, options).mse;
  out.fasim_polluted = rescore(moving_window_forecast(polluted, options));
  out.ls_clean = moving_window_with(sim.data, options.window, least_squares_prediction).mse;
  out.ls_polluted =
      rescore(moving_window_with(polluted, options.window, least_squares_prediction));

  std::vector<ForecastPoint> oracle;
  const Vector signal = sim.truth.U * sim.truth.beta + sim.truth.F * sim.truth.gamma;
  for (Index t = options.window; t < sim.data.n(); ++t) {
    const double g = cfg.model == Model::Linear ? signal[t] : std::exp(signal[t]);
    oracle.push_back({t, sim.data.Y()[t], g});
  }
  out.oracle = forecast_mse(oracle);
  return out;
}

}  // namespace fasim
