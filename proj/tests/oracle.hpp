#pragma once

// Test-side oracles built from explicit dense inverses, independent of the
// Cholesky paths in the library.

#include <Eigen/Dense>

#include "tbo/common.hpp"
#include "tbo/kernel.hpp"

namespace oracle {

using tbo::Matrix;
using tbo::Vector;

struct MeanVar {
  double mean;
  double var;
};

// mu = m + k^T (K + s2/a I)^{-1} (y - m), var = k(x,x) - k^T (K + s2/a I)^{-1} k.
inline MeanVar dense_posterior(const Matrix& X, const Vector& y, const tbo::KernelSpec& spec,
                               double noise, double alpha, const Vector& x, double offset = 0.0) {
  const Eigen::Index t = X.rows();
  Matrix K(t, t);
  Vector k(t);
  for (Eigen::Index i = 0; i < t; ++i) {
    k[i] = tbo::eval_kernel(X.row(i).transpose(), x, spec);
    for (Eigen::Index j = 0; j < t; ++j) {
      K(i, j) = tbo::eval_kernel(X.row(i).transpose(), X.row(j).transpose(), spec);
    }
  }
  const Matrix inv = (K + (noise / alpha) * Matrix::Identity(t, t)).inverse();
  const Vector r = y.array() - offset;
  return {offset + k.dot(inv * r), tbo::eval_kernel(x, x, spec) - k.dot(inv * k)};
}

inline Matrix random_matrix(tbo::Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo = 0.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = u(rng);
  }
  return M;
}

inline Vector random_vector(tbo::Rng& rng, Eigen::Index n, double lo = 0.0, double hi = 1.0) {
  return random_matrix(rng, n, 1, lo, hi).col(0);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace oracle
