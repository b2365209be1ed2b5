#include "tbo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "tbo/optim.hpp"
#include "tbo/sampling.hpp"

namespace tbo {

namespace {

struct Factorized {
  Matrix L;
  double jitter = 0.0;
};

bool try_cholesky(const Matrix& A, Matrix& L) {
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) return false;
  L = llt.matrixL();
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    if (!(L(i, i) > 0.0) || !std::isfinite(L(i, i))) return false;
  }
  return true;
}

std::optional<Factorized> factorize(const Matrix& Lambda, double sf2, const JitterPolicy& policy) {
  Factorized out;
  if (try_cholesky(Lambda, out.L)) return out;
  for (double rel = policy.start; rel <= policy.max * (1.0 + 1e-12); rel *= policy.factor) {
    const double jitter = rel * sf2;
    Matrix A = Lambda;
    A.diagonal().array() += jitter;
    if (try_cholesky(A, out.L)) {
      out.jitter = jitter;
      return out;
    }
  }
  return std::nullopt;
}

[[noreturn]] void throw_factorization_failure(const Matrix& Lambda, const JitterPolicy& policy) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Lambda, Eigen::EigenvaluesOnly);
  std::ostringstream msg;
  msg << "tempered posterior: Cholesky failed after jitter " << policy.max
      << " x signal variance; eigenvalue range [" << es.eigenvalues().minCoeff() << ", "
      << es.eigenvalues().maxCoeff() << "], size " << Lambda.rows();
  throw NumericalError(msg.str());
}

void check_inputs(const Matrix& X, const Vector& y, const KernelSpec& spec, double noise_variance,
                  double alpha) {
  spec.validate();
  if (X.rows() < 1) throw UsageError("tempered posterior: need at least one observation");
  if (X.rows() != y.size()) throw UsageError("tempered posterior: X and y row counts differ");
  if (X.cols() != spec.dim()) throw UsageError("tempered posterior: design dimension mismatch");
  if (!y.allFinite()) throw UsageError("tempered posterior: non-finite observation");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw UsageError("tempered posterior: alpha must lie in (0,1]");
  if (!(noise_variance > 0.0)) throw UsageError("tempered posterior: noise variance must be positive");
}

}  // namespace

GPState tempered_posterior(const Matrix& X, const Vector& y, const KernelSpec& spec,
                           double noise_variance, double alpha, const JitterPolicy& jitter,
                           double mean_offset) {
  check_inputs(X, y, spec, noise_variance, alpha);
  Matrix Lambda = kernel_matrix(X, spec);
  Lambda.diagonal().array() += noise_variance / alpha;
  auto fac = factorize(Lambda, spec.signal_variance, jitter);
  if (!fac) throw_factorization_failure(Lambda, jitter);

  GPState s;
  s.X_ = X;
  s.y_ = y;
  s.spec_ = spec;
  s.noise_variance_ = noise_variance;
  s.alpha_ = alpha;
  s.mean_offset_ = mean_offset;
  s.jitter_ = fac->jitter;
  s.L_ = std::move(fac->L);
  const Vector centered = (y.array() - mean_offset).matrix();
  s.weights_ = s.L_.triangularView<Eigen::Lower>().solve(centered);
  s.L_.triangularView<Eigen::Lower>().transpose().solveInPlace(s.weights_);
  return s;
}

double GPState::mean(const Vector& x) const {
  return mean_offset_ + cross_vector(X_, x, spec_).dot(weights_);
}

Prediction GPState::predict(const Vector& x) const {
  const Vector k = cross_vector(X_, x, spec_);
  Prediction p;
  p.mean = mean_offset_ + k.dot(weights_);
  const Vector v = L_.triangularView<Eigen::Lower>().solve(k);
  const double var = spec_.signal_variance - v.squaredNorm();
  if (var < 0.0) {
    p.clipped = -var;
    p.variance = 0.0;
  } else {
    p.variance = var;
  }
  return p;
}

double GPState::covariance(const Vector& x, const Vector& x2) const {
  const Vector a = L_.triangularView<Eigen::Lower>().solve(cross_vector(X_, x, spec_));
  const Vector b = L_.triangularView<Eigen::Lower>().solve(cross_vector(X_, x2, spec_));
  return eval_kernel(x, x2, spec_) - a.dot(b);
}

double GPState::log_det() const { return 2.0 * L_.diagonal().array().log().sum(); }

Prediction predict(const GPState& state, const Vector& x) {
  if (x.size() != state.dim()) throw UsageError("predict: point dimension mismatch");
  return state.predict(x);
}

double log_marginal_tempered(const Matrix& X, const Vector& y, const KernelSpec& spec,
                             double noise_variance, double alpha, const JitterPolicy& jitter) {
  const GPState s = tempered_posterior(X, y, spec, noise_variance, alpha, jitter);
  const double t = static_cast<double>(y.size());
  return -0.5 * y.dot(s.weights()) - 0.5 * s.log_det() -
         0.5 * t * std::log(2.0 * std::numbers::pi);
}

HyperFitResult fit_hyperparams(const Matrix& X, const Vector& y, KernelFamily family, double alpha,
                               const HyperFitOptions& options, Rng& rng) {
  const int d = static_cast<int>(X.cols());
  const HyperBounds& b = options.bounds;
  if (static_cast<int>(b.lengthscales.size()) != d) {
    throw UsageError("fit_hyperparams: need one lengthscale interval per dimension");
  }
  if (options.restarts < 1) throw UsageError("fit_hyperparams: restarts must be >= 1");
  const int n = d + 2;
  Vector lo(n), hi(n);
  auto set_bound = [&](int i, const Interval& iv, const char* what) {
    if (!(iv.lo > 0.0) || !(iv.hi >= iv.lo) || !std::isfinite(iv.hi)) {
      throw UsageError(std::string("fit_hyperparams: invalid bounds for ") + what);
    }
    lo[i] = std::log(iv.lo);
    hi[i] = std::log(iv.hi);
  };
  for (int k = 0; k < d; ++k) set_bound(k, b.lengthscales[k], "lengthscale");
  set_bound(d, b.signal_variance, "signal_variance");
  set_bound(d + 1, b.noise_variance, "noise_variance");

  const Eigen::Index t = X.rows();
  const double log2pi = std::log(2.0 * std::numbers::pi);

  auto unpack = [&](const Vector& theta, KernelSpec& spec, double& noise) {
    spec.family = family;
    spec.lengthscales = theta.head(d).array().exp().matrix();
    spec.signal_variance = std::exp(theta[d]);
    noise = std::exp(theta[d + 1]);
  };

  SmoothObjective objective = [&](const Vector& theta, double& value, Vector& grad) {
    KernelSpec spec;
    double noise = 0.0;
    unpack(theta, spec, noise);
    const Matrix K = kernel_matrix(X, spec);
    Matrix Lambda = K;
    Lambda.diagonal().array() += noise / alpha;
    auto fac = factorize(Lambda, spec.signal_variance, options.jitter);
    if (!fac) return false;
    const Matrix& Lm = fac->L;
    const auto L = Lm.triangularView<Eigen::Lower>();
    Vector a = L.solve(y);
    const double quad = a.squaredNorm();
    L.transpose().solveInPlace(a);
    const double logdet = 2.0 * fac->L.diagonal().array().log().sum();
    value = -0.5 * quad - 0.5 * logdet - 0.5 * static_cast<double>(t) * log2pi;

    Matrix Linv = L.solve(Matrix::Identity(t, t));
    const Matrix Lambda_inv = Linv.transpose() * Linv;
    const Matrix W = a * a.transpose() - Lambda_inv;
    grad.resize(n);
    const auto dK = kernel_matrix_log_lengthscale_grads(X, spec);
    for (int k = 0; k < d; ++k) grad[k] = 0.5 * W.cwiseProduct(dK[k]).sum();
    grad[d] = 0.5 * W.cwiseProduct(K).sum();
    grad[d + 1] = 0.5 * (noise / alpha) * W.trace();
    return std::isfinite(value) && grad.allFinite();
  };

  Matrix starts = quasi_random_points(Box(lo, hi), options.restarts, rng);
  if (options.initial) {
    const auto& [spec0, noise0] = *options.initial;
    Vector theta0(n);
    theta0.head(d) = spec0.lengthscales.array().log().matrix();
    theta0[d] = std::log(spec0.signal_variance);
    theta0[d + 1] = std::log(noise0);
    starts.row(0) = theta0.transpose();
  }

  std::optional<BoxAscentResult> best;
  int failed = 0;
  for (int r = 0; r < options.restarts; ++r) {
    const Vector x0 = starts.row(r).transpose();
    BoxAscentResult res = bfgs_box_maximize(objective, lo, hi, x0, options.max_iterations);
    if (!res.ok) {
      ++failed;
      continue;
    }
    if (!best || res.value > best->value) best = std::move(res);
  }
  if (!best) {
    throw NumericalError("fit_hyperparams: all " + std::to_string(options.restarts) +
                         " restarts failed to evaluate the marginal likelihood");
  }
  HyperFitResult out;
  unpack(best->x, out.spec, out.noise_variance);
  out.log_marginal = best->value;
  out.failed_restarts = failed;
  return out;
}

MeanMax posterior_mean_max(const GPState& state, const Box& domain, int budget, Rng& rng) {
  if (domain.dim() != state.dim()) throw UsageError("posterior_mean_max: domain dimension mismatch");
  std::vector<Vector> train;
  train.reserve(state.size());
  for (int i = 0; i < state.size(); ++i) train.emplace_back(state.X().row(i).transpose());
  const BoxMax best = screen_and_refine([&](const Vector& x) { return state.mean(x); }, domain,
                                        budget, train, rng, 0.05);
  return {best.x, best.value};
}

}  // namespace tbo
