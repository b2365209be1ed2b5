#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tbo/common.hpp"

namespace tbo {

enum class KernelFamily { SquaredExponential, Matern12, Matern32, Matern52 };

// Short registry names: "se", "matern12", "matern32", "matern52".
std::string_view kernel_family_name(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);
std::vector<std::string> kernel_family_names();

// Stationary ARD covariance. Distances are scaled per dimension:
//   r^2 = sum_i ((x_i - x'_i) / lengthscale_i)^2.
struct KernelSpec {
  KernelFamily family = KernelFamily::SquaredExponential;
  Vector lengthscales;
  double signal_variance = 1.0;

  KernelSpec() = default;
  KernelSpec(KernelFamily fam, Vector ls, double sf2 = 1.0);
  static KernelSpec isotropic(KernelFamily fam, int d, double lengthscale, double sf2 = 1.0);

  [[nodiscard]] int dim() const { return static_cast<int>(lengthscales.size()); }

  // Throws UsageError on non-positive lengthscales or signal variance.
  void validate() const;
};

// Covariance as a function of the scaled distance r.
double kernel_of_scaled_distance(KernelFamily family, double r, double signal_variance);

double eval_kernel(const Vector& x, const Vector& x2, const KernelSpec& spec);

// X holds one point per row.
Matrix kernel_matrix(const Matrix& X, const KernelSpec& spec);

Vector cross_vector(const Matrix& X, const Vector& x, const KernelSpec& spec);

// Derivatives of K with respect to log(lengthscale_j) for every j, used by the
// marginal-likelihood gradient. Entry j is a t-by-t matrix.
std::vector<Matrix> kernel_matrix_log_lengthscale_grads(const Matrix& X, const KernelSpec& spec);

}  // namespace tbo
