#pragma once

#include <functional>
#include <vector>

#include "fasim/estimate.hpp"
#include "fasim/simulate.hpp"
#include "fasim/spline.hpp"

namespace fasim {

struct ForecastPoint {
  Index t = 0;  // 0-based row of the panel
  double y = 0.0;
  double y_hat = 0.0;
};

struct ForecastReport {
  std::vector<ForecastPoint> predictions;
  double mse = 0.0;
};

struct ForecastOptions {
  Index window = 90;
  Index knots = 6;
  FitOptions fit{};  // fit.seed is re-derived per window as seed.child(t)
};

/// Everything learned from one training window.
struct WindowModel {
  Vector means;
  FactorDecomposition factors;
  Vector beta_hat;
  Vector gamma_hat;
  SplineLink link;
};

WindowModel fit_window(const Matrix& X, const Vector& Y, const ForecastOptions& options,
                       SeedSpec seed);
/// g_hat(f_t^T gamma + u_t^T beta) with f_t, u_t from the trained loadings.
double predict(const WindowModel& model, const Vector& x);

/// mean squared error over the predictions
double forecast_mse(const std::vector<ForecastPoint>& predictions);

/// For every t >= window, fit on rows [t - window, t) and predict row t.
ForecastReport moving_window_forecast(const Dataset& panel, const ForecastOptions& options);

/// Same protocol with a caller-supplied one-step predictor
/// (training X, training Y, new row) -> prediction.
using WindowPredictor = std::function<double(const Matrix&, const Vector&, const Vector&)>;
ForecastReport moving_window_with(const Dataset& panel, Index window,
                                  const WindowPredictor& predictor);

/// Ordinary least squares of Y on (1, X) over the window.
double least_squares_prediction(const Matrix& X, const Vector& Y, const Vector& x);

struct ForecastComparison {
  double fasim_clean = 0.0;
  double fasim_polluted = 0.0;
  double ls_clean = 0.0;
  double ls_polluted = 0.0;
  double oracle = 0.0;

  double fasim_inflation() const { return fasim_polluted / fasim_clean; }
  double ls_inflation() const { return ls_polluted / ls_clean; }
};

/// Synthetic benchmark. The clean panel is drawn from cfg (without outliers);
/// the polluted run injects cfg.outliers (default 10% + 10 x max) into the
/// responses seen in training while every MSE is scored against the clean
/// responses. The oracle predicts g(u_t^T beta + f_t^T gamma) from the true
/// components, g being the identity or exp.
ForecastComparison compare_forecasts(const DgpConfig& cfg, const ForecastOptions& options);

}  // namespace fasim
