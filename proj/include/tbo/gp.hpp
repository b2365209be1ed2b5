#pragma once

#include <optional>

#include "tbo/common.hpp"
#include "tbo/kernel.hpp"

namespace tbo {

// Diagonal jitter escalation used when the tempered system matrix is not
// numerically positive definite: try 0, then start * signal_variance,
// multiplied by `factor` until max * signal_variance.
struct JitterPolicy {
  double start = 1e-10;
  double factor = 10.0;
  double max = 1e-4;
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
  // Amount by which a slightly negative variance was lifted to zero.
  double clipped = 0.0;
};

// Tempered GP posterior. Tempering the likelihood by alpha is the same as
// conditioning on y with noise variance noise_variance / alpha, so the system
// matrix is  Lambda = K + (noise_variance / alpha) I + jitter I.
class GPState {
 public:
  [[nodiscard]] const Matrix& X() const { return X_; }
  [[nodiscard]] const Vector& y() const { return y_; }
  [[nodiscard]] const KernelSpec& spec() const { return spec_; }
  [[nodiscard]] double noise_variance() const { return noise_variance_; }
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] double mean_offset() const { return mean_offset_; }
  [[nodiscard]] double jitter() const { return jitter_; }
  [[nodiscard]] int size() const { return static_cast<int>(X_.rows()); }
  [[nodiscard]] int dim() const { return spec_.dim(); }
  // Lower-triangular L with L L^T = Lambda.
  [[nodiscard]] const Matrix& factor() const { return L_; }
  // Lambda^{-1} (y - mean_offset).
  [[nodiscard]] const Vector& weights() const { return weights_; }

  [[nodiscard]] Prediction predict(const Vector& x) const;
  // Posterior covariance k_{t,alpha}(x, x2).
  [[nodiscard]] double covariance(const Vector& x, const Vector& x2) const;
  [[nodiscard]] double mean(const Vector& x) const;

  // log det Lambda from the factor.
  [[nodiscard]] double log_det() const;

 private:
  friend GPState tempered_posterior(const Matrix&, const Vector&, const KernelSpec&, double,
                                    double, const JitterPolicy&, double);
  Matrix X_;
  Vector y_;
  KernelSpec spec_;
  double noise_variance_ = 0.0;
  double alpha_ = 1.0;
  double mean_offset_ = 0.0;
  double jitter_ = 0.0;
  Matrix L_;
  Vector weights_;
};

// Builds the alpha-tempered posterior. Throws NumericalError if the system
// matrix cannot be factorized even at the largest jitter.
GPState tempered_posterior(const Matrix& X, const Vector& y, const KernelSpec& spec,
                           double noise_variance, double alpha,
                           const JitterPolicy& jitter = {}, double mean_offset = 0.0);

Prediction predict(const GPState& state, const Vector& x);

// log N(y | 0, K + (noise_variance/alpha) I).
double log_marginal_tempered(const Matrix& X, const Vector& y, const KernelSpec& spec,
                             double noise_variance, double alpha,
                             const JitterPolicy& jitter = {});

struct Interval {
  double lo;
  double hi;
};

struct HyperBounds {
  std::vector<Interval> lengthscales;  // one per dimension
  Interval signal_variance{1.0, 1.0};
  Interval noise_variance{1e-6, 1e-6};
};

struct HyperFitResult {
  KernelSpec spec;
  double noise_variance;
  double log_marginal;
  int failed_restarts;
};

struct HyperFitOptions {
  HyperBounds bounds;
  int restarts = 5;
  // When set, the first restart starts here instead of at a quasi-random point.
  std::optional<std::pair<KernelSpec, double>> initial;
  int max_iterations = 100;
  JitterPolicy jitter{};
};

// Multistart bounded quasi-Newton ascent of the tempered log marginal
// likelihood in log-hyperparameter space. The kernel family is taken from
// `family`; lengthscales, signal variance and noise variance are fitted.
HyperFitResult fit_hyperparams(const Matrix& X, const Vector& y, KernelFamily family,
                               double alpha, const HyperFitOptions& options, Rng& rng);

struct MeanMax {
  Vector x;
  double value;
};

// Maximizes the posterior mean over the box: quasi-random screen of `budget`
// points plus the training inputs, then compass refinement from the best few.
MeanMax posterior_mean_max(const GPState& state, const Box& domain, int budget, Rng& rng);

}  // namespace tbo
