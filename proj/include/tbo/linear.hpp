#pragma once

#include <functional>
#include <vector>

#include "tbo/common.hpp"

namespace tbo {

// Tempered Bayesian linear regression on features phi(x):
//   prior theta ~ N(0, lambda^{-1} I),
//   precision V = lambda I + (alpha / sigma^2) sum phi phi^T,
//   weighted_sum = (alpha / sigma^2) sum y phi,
//   posterior mean V^{-1} weighted_sum.
struct LinearState {
  int feature_dim = 0;
  Matrix precision;
  Vector weighted_sum;
  double prior_precision = 1.0;
  double noise_variance = 1.0;
  double alpha = 1.0;
  int t = 0;

  [[nodiscard]] Vector posterior_mean() const;
  [[nodiscard]] Matrix posterior_covariance() const;
  // log det V - d log lambda, from a Cholesky factor of V.
  [[nodiscard]] double log_det_ratio() const;
};

LinearState linear_init(int d, double lambda, double noise_variance, double alpha);

LinearState linear_update(const LinearState& state, const Vector& phi, double y);

struct LinearPrediction {
  double mean;
  double variance;
};

LinearPrediction linear_predict(const LinearState& state, const Vector& phi);

// Confidence radius sqrt(lambda) S + sqrt(alpha) sqrt(log det V / det(lambda I) + 2 log(1/delta)).
double beta_radius(const LinearState& state, double s_theta, double delta);

// Index of the EI-maximizing candidate; the incumbent is the largest
// candidate posterior mean. Ties go to the lowest index.
int ei_linear_select(const LinearState& state, const std::vector<Vector>& candidates);

struct DetGrowth {
  double lhs;
  double rhs;
};

// lhs = log det V / det(lambda I); rhs = d log(1 + alpha L^2 t / (lambda sigma^2 d)).
DetGrowth det_growth_check(const LinearState& state, double feature_bound);

using FeatureMap = std::function<Vector(const Vector&)>;

FeatureMap identity_features();

// Random Fourier features for an SE kernel with the given lengthscale:
// sqrt(2/m) cos(W x + b), W ~ N(0, 1/l^2), b ~ U[0, 2 pi). Norm <= sqrt(2).
FeatureMap random_fourier_features(int input_dim, int num_features, double lengthscale, Rng& rng);

}  // namespace tbo
