#include "tbo/kernel.hpp"

#include <cmath>

namespace tbo {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.2360679774997897;

double scaled_sq_distance(const Vector& x, const Vector& x2, const Vector& ls) {
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double u = (x[i] - x2[i]) / ls[i];
    r2 += u * u;
  }
  return r2;
}

// d k / d (r^2), expressed so that it stays finite at r = 0 for the smooth
// families. Matern 1/2 is not differentiable at the origin; its gradient
// contribution there is zero because r^2 itself has zero derivative.
double dk_dr2(KernelFamily family, double r2, double sf2) {
  switch (family) {
    case KernelFamily::SquaredExponential:
      return -0.5 * sf2 * std::exp(-0.5 * r2);
    case KernelFamily::Matern12: {
      const double r = std::sqrt(r2);
      if (r == 0.0) return 0.0;
      return -sf2 * std::exp(-r) / (2.0 * r);
    }
    case KernelFamily::Matern32: {
      const double r = std::sqrt(r2);
      return -1.5 * sf2 * std::exp(-kSqrt3 * r);
    }
    case KernelFamily::Matern52: {
      const double r = std::sqrt(r2);
      return -(5.0 / 6.0) * sf2 * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
    }
  }
  return 0.0;
}

void check_dims(const Vector& x, const KernelSpec& spec) {
  if (x.size() != spec.lengthscales.size()) {
    throw UsageError("kernel: point dimension " + std::to_string(x.size()) +
                     " does not match lengthscale dimension " +
                     std::to_string(spec.lengthscales.size()));
  }
}

}  // namespace

std::string_view kernel_family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::SquaredExponential: return "se";
    case KernelFamily::Matern12: return "matern12";
    case KernelFamily::Matern32: return "matern32";
    case KernelFamily::Matern52: return "matern52";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "se" || name == "rbf" || name == "squared_exponential") {
    return KernelFamily::SquaredExponential;
  }
  if (name == "matern12") return KernelFamily::Matern12;
  if (name == "matern32") return KernelFamily::Matern32;
  if (name == "matern52") return KernelFamily::Matern52;
  throw UsageError("unknown kernel family '" + std::string(name) + "'");
}

std::vector<std::string> kernel_family_names() {
  return {"se", "matern12", "matern32", "matern52"};
}

KernelSpec::KernelSpec(KernelFamily fam, Vector ls, double sf2)
    : family(fam), lengthscales(std::move(ls)), signal_variance(sf2) {
  validate();
}

KernelSpec KernelSpec::isotropic(KernelFamily fam, int d, double lengthscale, double sf2) {
  return KernelSpec(fam, Vector::Constant(d, lengthscale), sf2);
}

void KernelSpec::validate() const {
  if (lengthscales.size() == 0) throw UsageError("KernelSpec: empty lengthscale vector");
  for (Eigen::Index i = 0; i < lengthscales.size(); ++i) {
    if (!(lengthscales[i] > 0.0) || !std::isfinite(lengthscales[i])) {
      throw UsageError("KernelSpec: lengthscale " + std::to_string(i) + " must be positive");
    }
  }
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw UsageError("KernelSpec: signal_variance must be positive");
  }
}

double kernel_of_scaled_distance(KernelFamily family, double r, double sf2) {
  switch (family) {
    case KernelFamily::SquaredExponential:
      return sf2 * std::exp(-0.5 * r * r);
    case KernelFamily::Matern12:
      return sf2 * std::exp(-r);
    case KernelFamily::Matern32:
      return sf2 * (1.0 + kSqrt3 * r) * std::exp(-kSqrt3 * r);
    case KernelFamily::Matern52:
      return sf2 * (1.0 + kSqrt5 * r + 5.0 * r * r / 3.0) * std::exp(-kSqrt5 * r);
  }
  return 0.0;
}

double eval_kernel(const Vector& x, const Vector& x2, const KernelSpec& spec) {
  check_dims(x, spec);
  check_dims(x2, spec);
  const double r2 = scaled_sq_distance(x, x2, spec.lengthscales);
  return kernel_of_scaled_distance(spec.family, std::sqrt(r2), spec.signal_variance);
}

Matrix kernel_matrix(const Matrix& X, const KernelSpec& spec) {
  if (X.cols() != spec.dim()) {
    throw UsageError("kernel_matrix: design has " + std::to_string(X.cols()) +
                     " columns, kernel expects " + std::to_string(spec.dim()));
  }
  const Eigen::Index t = X.rows();
  Matrix K(t, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    K(i, i) = spec.signal_variance;
    const Vector xi = X.row(i).transpose();
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r2 = scaled_sq_distance(xi, X.row(j).transpose(), spec.lengthscales);
      K(i, j) = K(j, i) = kernel_of_scaled_distance(spec.family, std::sqrt(r2), spec.signal_variance);
    }
  }
  return K;
}

Vector cross_vector(const Matrix& X, const Vector& x, const KernelSpec& spec) {
  check_dims(x, spec);
  if (X.cols() != spec.dim()) throw UsageError("cross_vector: design dimension mismatch");
  Vector k(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double r2 = scaled_sq_distance(X.row(i).transpose(), x, spec.lengthscales);
    k[i] = kernel_of_scaled_distance(spec.family, std::sqrt(r2), spec.signal_variance);
  }
  return k;
}

std::vector<Matrix> kernel_matrix_log_lengthscale_grads(const Matrix& X, const KernelSpec& spec) {
  const Eigen::Index t = X.rows();
  const int d = spec.dim();
  std::vector<Matrix> grads(d, Matrix::Zero(t, t));
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const Vector diff = (X.row(i) - X.row(j)).transpose();
      double r2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double u = diff[k] / spec.lengthscales[k];
        r2 += u * u;
      }
      const double dk = dk_dr2(spec.family, r2, spec.signal_variance);
      for (int k = 0; k < d; ++k) {
        // d r^2 / d log(l_k) = -2 (diff_k / l_k)^2
        const double u = diff[k] / spec.lengthscales[k];
        grads[k](i, j) = grads[k](j, i) = dk * (-2.0 * u * u);
      }
    }
  }
  return grads;
}

}  // namespace tbo
