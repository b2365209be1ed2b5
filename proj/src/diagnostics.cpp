#include "tbo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tbo/acquisition.hpp"

namespace tbo {

double info_gain(const Matrix& K, double noise_variance, double alpha) {
  if (K.rows() != K.cols()) throw UsageError("info_gain: K must be square");
  if (!(noise_variance > 0.0)) throw UsageError("info_gain: noise variance must be positive");
  if (!(alpha >= 0.0)) throw UsageError("info_gain: alpha must be nonnegative");
  const Eigen::Index t = K.rows();
  if (t == 0) return 0.0;
  Matrix A = (alpha / noise_variance) * K;
  A.diagonal().array() += 1.0;
  const Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("info_gain: I + (alpha/sigma^2) K is not positive definite");
  }
  const Matrix L = llt.matrixL();
  return std::max(0.0, L.diagonal().array().log().sum());
}

GreedyInfoGain greedy_info_gain(const Matrix& pool, const KernelSpec& spec, double noise_variance,
                                double alpha, int t) {
  const int n = static_cast<int>(pool.rows());
  if (t < 0 || t > n) throw UsageError("greedy_info_gain: need 0 <= t <= pool size");
  if (!(alpha > 0.0)) throw UsageError("greedy_info_gain: alpha must be positive");
  GreedyInfoGain out;
  out.pool_size = n;
  if (t == 0) return out;

  const Matrix K = kernel_matrix(pool, spec);
  const double tempered_noise = noise_variance / alpha;
  // Incremental Cholesky of K_S + (sigma^2/alpha) I over the selected set S;
  // column j of C holds L^{-1} k_S(x_j) so the residual variance is
  // K_jj - ||C_j||^2.
  Matrix C(t, n);
  Vector var = K.diagonal();
  std::vector<bool> taken(n, false);
  for (int s = 0; s < t; ++s) {
    int best = -1;
    for (int j = 0; j < n; ++j) {
      if (taken[j]) continue;
      if (best < 0 || var[j] > var[best]) best = j;
    }
    taken[best] = true;
    out.selected.push_back(best);
    const double diag = std::sqrt(var[best] + tempered_noise);
    for (int j = 0; j < n; ++j) {
      double c = K(best, j);
      for (int r = 0; r < s; ++r) c -= C(r, best) * C(r, j);
      C(s, j) = c / diag;
    }
    for (int j = 0; j < n; ++j) var[j] = std::max(0.0, var[j] - C(s, j) * C(s, j));
  }
  Matrix Ks(t, t);
  for (int a = 0; a < t; ++a) {
    for (int b = 0; b < t; ++b) Ks(a, b) = K(out.selected[a], out.selected[b]);
  }
  out.value = info_gain(Ks, noise_variance, alpha);
  return out;
}

RegretTrace regret_trace(const RunRecord& record, double f_star, bool f_star_estimated) {
  RegretTrace tr;
  tr.f_star_estimated = f_star_estimated;
  double total = 0.0;
  for (std::size_t i = 0; i < record.rows.size(); ++i) {
    double r = f_star - record.rows[i].f_true;
    if (r < 0.0) {
      if (!f_star_estimated && r < -1e-6) {
        throw UsageError("regret_trace: f(x_" + std::to_string(i + 1) + ") exceeds f* by " +
                         std::to_string(-r));
      }
      tr.clipped += -r;
      r = 0.0;
    }
    total += r;
    tr.instantaneous.push_back(r);
    tr.cumulative.push_back(total);
    tr.average.push_back(total / static_cast<double>(i + 1));
  }
  if (!tr.average.empty() && tr.average.front() != 0.0) {
    tr.normalized_defined = true;
    for (const double a : tr.average) tr.normalized.push_back(a / tr.average.front());
  }
  return tr;
}

double sgd_equivalence_residual(const GPState& prior, const Vector& x_new, double y_new,
                                double alpha_step, const std::vector<Vector>& test_points) {
  if (!(alpha_step > 0.0)) throw UsageError("sgd_equivalence_residual: alpha must be positive");
  const double sigma2 = prior.noise_variance();
  const Prediction p = prior.predict(x_new);
  const double eta = alpha_step / (sigma2 + alpha_step * p.variance);
  const double innovation = y_new - p.mean;

  // Reference: condition on the augmented data with per-point noise.
  const int n = prior.size();
  Matrix X(n + 1, prior.dim());
  X.topRows(n) = prior.X();
  X.row(n) = x_new.transpose();
  Matrix Lambda = kernel_matrix(X, prior.spec());
  for (int i = 0; i < n; ++i) Lambda(i, i) += sigma2 / prior.alpha() + prior.jitter();
  Lambda(n, n) += sigma2 / alpha_step;
  Vector y(n + 1);
  y.head(n) = prior.y().array() - prior.mean_offset();
  y[n] = y_new - prior.mean_offset();
  const Eigen::LLT<Matrix> llt(Lambda);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("sgd_equivalence_residual: augmented system is not positive definite");
  }
  const Vector w = llt.solve(y);

  double worst = 0.0;
  for (const auto& x : test_points) {
    const double full = prior.mean_offset() + cross_vector(X, x, prior.spec()).dot(w);
    const double step = prior.mean(x) + eta * innovation * prior.covariance(x, x_new);
    worst = std::max(worst, std::abs(full - step));
  }
  return worst;
}

double tau_at_zero(double g) {
  if (!(g >= 0.0)) throw UsageError("tau_at_zero: g must be nonnegative");
  return std::pow(2.0, 0.5 * g - 1.0) * std::tgamma(0.5 * (g + 1.0)) / std::sqrt(std::numbers::pi);
}

BoundConstants bound_constants(const BoundInputs& in) {
  if (in.T < 2) throw UsageError("bound_constants: T must be >= 2");
  if (!(in.delta > 0.0 && in.delta < 1.0)) throw UsageError("bound_constants: delta must lie in (0,1)");
  if (!(in.alpha > 0.0 && in.alpha <= 1.0)) throw UsageError("bound_constants: alpha must lie in (0,1]");
  if (!(in.g >= 0.0)) throw UsageError("bound_constants: g must be nonnegative");
  if (!(in.gamma >= 0.0)) throw UsageError("bound_constants: gamma must be nonnegative");
  if (!(in.noise_variance > 0.0)) throw UsageError("bound_constants: noise variance must be positive");
  const double pi = std::numbers::pi;
  const double T = in.T;
  BoundConstants out;
  out.m = std::sqrt(in.alpha) *
          (std::sqrt(in.gamma) + std::sqrt(std::log(2.0 * T * T * pi * pi / (3.0 * in.delta))));
  const double r = in.noise_variance / (in.alpha * (T - 1.0) + in.noise_variance);
  const double cg = tau_at_zero(in.g);
  out.tau_inverse_term = tau_g_inverse(cg * std::pow(r, 0.5 * in.g), in.g);
  const double prior_part = std::sqrt(2.0 * in.c2) * in.f_norm;
  if (in.g >= 1.0) {
    out.beta = prior_part + (in.c1 * in.c3 * std::pow(cg, 1.0 / in.g) + 2.0 * std::numbers::sqrt2 +
                             in.c1 * out.tau_inverse_term) *
                                out.m;
  } else {
    out.eta = in.c_prime * std::pow(out.m, in.g) * std::pow(r, 0.5 * (in.g - 1.0));
    out.beta = prior_part + (2.0 * std::numbers::sqrt2 + in.c1 * out.tau_inverse_term) * out.m + out.eta;
  }
  out.bound = out.beta * std::sqrt(in.gamma * T / in.alpha);
  return out;
}

double linear_bound_value(const LinearBoundInputs& in) {
  if (in.T < 1 || in.d < 1) throw UsageError("linear_bound_value: T and d must be positive");
  if (!(in.alpha > 0.0) || !(in.L > 0.0) || !(in.lambda > 0.0) || !(in.noise_variance > 0.0) ||
      !(in.s_theta >= 0.0)) {
    throw UsageError("linear_bound_value: parameters must be positive");
  }
  if (!(in.delta > 0.0 && in.delta < 1.0)) throw UsageError("linear_bound_value: delta must lie in (0,1)");
  const double d = in.d;
  const double T = in.T;
  const double logterm =
      std::log1p(in.alpha * in.L * in.L * T / (in.lambda * in.noise_variance * d));
  const double beta = std::sqrt(in.lambda) * in.s_theta +
                      std::sqrt(in.alpha) * std::sqrt(d * logterm + 2.0 * std::log(1.0 / in.delta));
  const double c = 2.0 * in.noise_variance / in.alpha + (in.L * in.L / in.lambda) / std::numbers::ln2;
  return 2.0 * beta * std::sqrt(c * d * T * logterm);
}

}  // namespace tbo
