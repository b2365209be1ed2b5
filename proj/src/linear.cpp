#include "tbo/linear.hpp"

#include <cmath>
#include <numbers>

#include "tbo/acquisition.hpp"

namespace tbo {

namespace {

Eigen::LLT<Matrix> factor_precision(const LinearState& s) {
  Eigen::LLT<Matrix> llt(s.precision);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("linear surrogate: precision matrix is not positive definite");
  }
  return llt;
}

}  // namespace

Vector LinearState::posterior_mean() const { return factor_precision(*this).solve(weighted_sum); }

Matrix LinearState::posterior_covariance() const {
  return factor_precision(*this).solve(Matrix::Identity(feature_dim, feature_dim));
}

double LinearState::log_det_ratio() const {
  const Eigen::LLT<Matrix> llt = factor_precision(*this);
  const Matrix L = llt.matrixL();
  return 2.0 * L.diagonal().array().log().sum() - feature_dim * std::log(prior_precision);
}

LinearState linear_init(int d, double lambda, double noise_variance, double alpha) {
  if (d < 1) throw UsageError("linear_init: feature dimension must be positive");
  if (!(lambda > 0.0)) throw UsageError("linear_init: lambda must be positive");
  if (!(noise_variance > 0.0)) throw UsageError("linear_init: noise variance must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw UsageError("linear_init: alpha must lie in (0,1]");
  LinearState s;
  s.feature_dim = d;
  s.precision = lambda * Matrix::Identity(d, d);
  s.weighted_sum = Vector::Zero(d);
  s.prior_precision = lambda;
  s.noise_variance = noise_variance;
  s.alpha = alpha;
  return s;
}

LinearState linear_update(const LinearState& state, const Vector& phi, double y) {
  if (phi.size() != state.feature_dim) throw UsageError("linear_update: feature dimension mismatch");
  if (!phi.allFinite() || !std::isfinite(y)) throw UsageError("linear_update: non-finite input");
  LinearState s = state;
  const double w = state.alpha / state.noise_variance;
  s.precision.noalias() += w * phi * phi.transpose();
  s.weighted_sum += (w * y) * phi;
  s.t += 1;
  return s;
}

LinearPrediction linear_predict(const LinearState& state, const Vector& phi) {
  if (phi.size() != state.feature_dim) throw UsageError("linear_predict: feature dimension mismatch");
  const Eigen::LLT<Matrix> llt = factor_precision(state);
  const Vector mu = llt.solve(state.weighted_sum);
  const Matrix L = llt.matrixL();
  const Vector v = L.triangularView<Eigen::Lower>().solve(phi);
  return {phi.dot(mu), v.squaredNorm()};
}

double beta_radius(const LinearState& state, double s_theta, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw UsageError("beta_radius: delta must lie in (0,1)");
  const double logdet = state.t == 0 ? 0.0 : state.log_det_ratio();
  return std::sqrt(state.prior_precision) * s_theta +
         std::sqrt(state.alpha) * std::sqrt(logdet + 2.0 * std::log(1.0 / delta));
}

int ei_linear_select(const LinearState& state, const std::vector<Vector>& candidates) {
  if (candidates.empty()) throw UsageError("ei_linear_select: empty candidate set");
  std::vector<LinearPrediction> preds;
  preds.reserve(candidates.size());
  double incumbent = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    preds.push_back(linear_predict(state, c));
    incumbent = std::max(incumbent, preds.back().mean);
  }
  AcqConfig ei;
  ei.g = 1.0;
  int best = 0;
  double best_val = -1.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double val = gei_value(preds[i].mean, std::sqrt(preds[i].variance), incumbent, ei);
    if (val > best_val) {
      best_val = val;
      best = static_cast<int>(i);
    }
  }
  return best;
}

DetGrowth det_growth_check(const LinearState& state, double feature_bound) {
  if (state.t == 0) return {0.0, 0.0};
  const double d = state.feature_dim;
  const double rhs = d * std::log1p(state.alpha * feature_bound * feature_bound * state.t /
                                    (state.prior_precision * state.noise_variance * d));
  return {state.log_det_ratio(), rhs};
}

FeatureMap identity_features() {
  return [](const Vector& x) { return x; };
}

FeatureMap random_fourier_features(int input_dim, int num_features, double lengthscale, Rng& rng) {
  if (input_dim < 1 || num_features < 1 || !(lengthscale > 0.0)) {
    throw UsageError("random_fourier_features: invalid arguments");
  }
  std::normal_distribution<double> normal(0.0, 1.0 / lengthscale);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
  Matrix W(num_features, input_dim);
  Vector b(num_features);
  for (int i = 0; i < num_features; ++i) {
    for (int j = 0; j < input_dim; ++j) W(i, j) = normal(rng);
    b[i] = unif(rng);
  }
  const double scale = std::sqrt(2.0 / num_features);
  return [W, b, scale](const Vector& x) -> Vector {
    return scale * (W * x + b).array().cos().matrix();
  };
}

}  // namespace tbo
