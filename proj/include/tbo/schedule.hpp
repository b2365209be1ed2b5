#pragma once

#include <vector>

namespace tbo {

enum class ScheduleMode { Fixed, Adaptive };

// Prequential information-matching tempering schedule.
//
// After t observations, with PV_s and MSE_s the untempered one-step-ahead
// predictive variance and squared residual at the s-th query,
//
//   alpha_t = min{ sqrt( (mean PV + sigma2_hat) / (mean PV + mean MSE) ), 1 },
//
// clamped from below by alpha_floor. The predictive quantities must come from
// the alpha = 1 posterior fitted before y_s was revealed.
struct ScheduleState {
  ScheduleMode mode = ScheduleMode::Adaptive;
  double fixed_alpha = 1.0;
  int t = 0;
  double sum_pv = 0.0;
  double sum_mse = 0.0;
  double sigma2_hat = 1.0;
  double alpha_floor = 0.05;

  static ScheduleState fixed(double alpha);
  static ScheduleState adaptive(double sigma2_hat, double alpha_floor = 0.05);
};

ScheduleState schedule_update(const ScheduleState& state, double pred_mean_untempered,
                              double pred_var_untempered, double y);

double current_alpha(const ScheduleState& state);

enum class NoiseEstimateMode { Known, PrequentialMin };

struct NoiseEstimateConfig {
  NoiseEstimateMode mode = NoiseEstimateMode::Known;
  double value = 1e-4;  // Known value, and the fallback for short histories
};

// Known: the configured value. PrequentialMin: the history is split into
// four consecutive windows of ceil(n/4) residuals (at least 2 per window) and
// the smallest window mean square is returned, floored at 1e-8. Histories
// shorter than two residuals fall back to the configured value.
double estimate_noise(const std::vector<double>& residuals, const NoiseEstimateConfig& config);

}  // namespace tbo
