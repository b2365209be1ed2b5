#pragma once

#include <vector>

#include "tbo/bo_loop.hpp"
#include "tbo/common.hpp"
#include "tbo/gp.hpp"
#include "tbo/kernel.hpp"

namespace tbo {

// 1/2 log det(I + (alpha / noise_variance) K) from a Cholesky factor.
double info_gain(const Matrix& K, double noise_variance, double alpha);

struct GreedyInfoGain {
  double value = 0.0;
  std::vector<int> selected;  // pool row indices in selection order
  int pool_size = 0;
};

// Greedy selection of t pool rows, each step taking the row with the largest
// tempered posterior variance given those already chosen (first index on
// ties). The value is info_gain on the selected rows.
GreedyInfoGain greedy_info_gain(const Matrix& pool, const KernelSpec& spec, double noise_variance,
                                double alpha, int t);

struct RegretTrace {
  std::vector<double> instantaneous;  // r_t = f* - f(x_t)
  std::vector<double> cumulative;     // R_t
  std::vector<double> average;        // R_t / t
  std::vector<double> normalized;     // average / average[0]; empty when r_1 = 0
  bool f_star_estimated = false;
  bool normalized_defined = false;
  double clipped = 0.0;  // total negative regret lifted to zero (estimated f* only)
};

// Regret of every evaluation in the record (initial design included), from
// the noiseless f_true column. With an exact f*, values of f above
// f* + 1e-6 are a UsageError; with an estimated f* they are clipped.
RegretTrace regret_trace(const RunRecord& record, double f_star, bool f_star_estimated = false);

// Largest deviation, over the test points, between the tempered posterior
// mean after conditioning on (x_new, y_new) with noise sigma^2 / alpha_step
// and the one-step update
//   mu(x) + eta (y_new - mu(x_new)) c(x, x_new),  eta = alpha / (sigma^2 + alpha v(x_new)).
// The reference conditions on the augmented data directly.
double sgd_equivalence_residual(const GPState& prior, const Vector& x_new, double y_new,
                                double alpha_step, const std::vector<Vector>& test_points);

// tau_g(0) = 2^{g/2 - 1} Gamma((g + 1) / 2) / sqrt(pi).
double tau_at_zero(double g);

struct BoundInputs {
  int T = 2;
  double alpha = 1.0;
  double g = 1.0;
  double gamma = 0.0;  // information gain at horizon T
  double f_norm = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double c_prime = 1.0;  // small-g constant
  double noise_variance = 1.0;
  double delta = 0.1;
};

struct BoundConstants {
  double m = 0.0;
  double tau_inverse_term = 0.0;  // tau_g^{-1}(tau_g(0) r^{g/2}), r = sigma^2 / (alpha (T-1) + sigma^2)
  double eta = 0.0;               // small-g extra term; zero for g >= 1
  double beta = 0.0;
  double bound = 0.0;  // beta sqrt(gamma T / alpha)
};

// Regret-bound constants for g-EI on a tempered GP. Unknown constants
// default to 1, so values are meaningful only for comparing shapes across
// alpha, g and T.
BoundConstants bound_constants(const BoundInputs& in);

struct LinearBoundInputs {
  int T = 1;
  double alpha = 1.0;
  int d = 1;
  double L = 1.0;
  double lambda = 1.0;
  double noise_variance = 1.0;
  double s_theta = 1.0;
  double delta = 0.1;
};

// 2 beta_T sqrt(c d T log(1 + alpha L^2 T / (lambda sigma^2 d))) with
// c = 2 sigma^2 / alpha + (L^2 / lambda) / log 2 and
// beta_T = sqrt(lambda) S + sqrt(alpha) sqrt(d log(1 + alpha L^2 T / (lambda sigma^2 d)) + 2 log(1/delta)).
double linear_bound_value(const LinearBoundInputs& in);

}  // namespace tbo
