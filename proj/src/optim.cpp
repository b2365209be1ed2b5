#include "tbo/optim.hpp"

#include <cmath>

namespace tbo {

BoxAscentResult bfgs_box_maximize(const SmoothObjective& f, const Vector& lo, const Vector& hi,
                                  const Vector& x0, int max_iterations, double gradient_tol) {
  const Eigen::Index n = x0.size();
  BoxAscentResult res;
  res.x = x0.cwiseMax(lo).cwiseMin(hi);
  Vector g(n);
  if (!f(res.x, res.value, g) || !std::isfinite(res.value)) return res;
  res.ok = true;

  Matrix H = Matrix::Identity(n, n);
  constexpr double kMaxStep = 2.0;

  for (int iter = 0; iter < max_iterations; ++iter) {
    res.iterations = iter + 1;
    Eigen::Array<bool, Eigen::Dynamic, 1> free(n);
    double pg_norm = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool pinned = lo[i] >= hi[i] || (res.x[i] <= lo[i] && g[i] < 0.0) ||
                          (res.x[i] >= hi[i] && g[i] > 0.0);
      free[i] = !pinned;
      if (free[i]) pg_norm = std::max(pg_norm, std::abs(g[i]));
    }
    if (pg_norm < gradient_tol) break;

    Vector gf = g;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!free[i]) gf[i] = 0.0;
    }
    Vector d = H * gf;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!free[i]) d[i] = 0.0;
    }
    if (d.dot(gf) <= 0.0) {
      H.setIdentity();
      d = gf;
    }
    const double dmax = d.cwiseAbs().maxCoeff();
    if (dmax > kMaxStep) d *= kMaxStep / dmax;

    double step = 1.0;
    bool accepted = false;
    Vector xn(n), gn(n);
    double fn = 0.0;
    for (int ls = 0; ls < 40; ++ls) {
      xn = (res.x + step * d).cwiseMax(lo).cwiseMin(hi);
      if (f(xn, fn, gn) && std::isfinite(fn) && fn >= res.value + 1e-4 * g.dot(xn - res.x) &&
          fn >= res.value) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Vector s = xn - res.x;
    const Vector yk = g - gn;  // gradient difference of the negated objective
    const double sy = s.dot(yk);
    const double gain = fn - res.value;
    res.x = xn;
    res.value = fn;
    g = gn;
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Matrix I = Matrix::Identity(n, n);
      H = (I - rho * s * yk.transpose()) * H * (I - rho * yk * s.transpose()) +
          rho * s * s.transpose();
    }
    if (gain <= 1e-12 * (1.0 + std::abs(res.value)) && s.cwiseAbs().maxCoeff() < 1e-9) break;
  }
  return res;
}

}  // namespace tbo
