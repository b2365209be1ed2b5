#include "tbo/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tbo/common.hpp"

namespace tbo {

ScheduleState ScheduleState::fixed(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw UsageError("fixed schedule: alpha must lie in (0,1]");
  ScheduleState s;
  s.mode = ScheduleMode::Fixed;
  s.fixed_alpha = alpha;
  return s;
}

ScheduleState ScheduleState::adaptive(double sigma2_hat, double alpha_floor) {
  if (!(sigma2_hat > 0.0)) throw UsageError("adaptive schedule: sigma2_hat must be positive");
  if (!(alpha_floor > 0.0 && alpha_floor < 1.0)) {
    throw UsageError("adaptive schedule: alpha_floor must lie in (0,1)");
  }
  ScheduleState s;
  s.mode = ScheduleMode::Adaptive;
  s.sigma2_hat = sigma2_hat;
  s.alpha_floor = alpha_floor;
  return s;
}

ScheduleState schedule_update(const ScheduleState& state, double pred_mean_untempered,
                              double pred_var_untempered, double y) {
  if (!(pred_var_untempered >= 0.0)) {
    throw UsageError("schedule_update: predictive variance must be nonnegative");
  }
  ScheduleState s = state;
  const double r = y - pred_mean_untempered;
  s.sum_pv += pred_var_untempered;
  s.sum_mse += r * r;
  s.t += 1;
  return s;
}

double current_alpha(const ScheduleState& state) {
  if (state.mode == ScheduleMode::Fixed) return state.fixed_alpha;
  if (state.t == 0) return 1.0;
  const double n = state.t;
  const double pv = state.sum_pv / n;
  const double mse = state.sum_mse / n;
  const double denom = pv + mse;
  double alpha = 1.0;
  if (denom > 0.0) alpha = std::min(std::sqrt((pv + state.sigma2_hat) / denom), 1.0);
  return std::clamp(alpha, state.alpha_floor, 1.0);
}

double estimate_noise(const std::vector<double>& residuals, const NoiseEstimateConfig& config) {
  if (config.mode == NoiseEstimateMode::Known) return config.value;
  const std::size_t n = residuals.size();
  if (n < 2) return config.value;
  const std::size_t window = std::max<std::size_t>(2, (n + 3) / 4);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t start = 0; start < n; start += window) {
    const std::size_t end = std::min(n, start + window);
    if (end - start < 2 && start > 0) break;  // short tail: already covered
    double ss = 0.0;
    for (std::size_t i = start; i < end; ++i) ss += residuals[i] * residuals[i];
    best = std::min(best, ss / static_cast<double>(end - start));
  }
  return std::max(best, 1e-8);
}

}  // namespace tbo
