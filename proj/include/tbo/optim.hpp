#pragma once

#include <functional>

#include "tbo/common.hpp"

namespace tbo {

// Objective for box-constrained ascent. Returns false when the point cannot
// be evaluated (e.g. a failed factorization); otherwise fills value and grad.
using SmoothObjective = std::function<bool(const Vector& x, double& value, Vector& grad)>;

struct BoxAscentResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  bool ok = false;
};

// Projected BFGS ascent with Armijo backtracking. Coordinates sitting on a
// bound with the gradient pointing outward are frozen for that iteration.
// Accepted steps never decrease the objective.
BoxAscentResult bfgs_box_maximize(const SmoothObjective& f, const Vector& lo, const Vector& hi,
                                  const Vector& x0, int max_iterations = 100,
                                  double gradient_tol = 1e-6);

}  // namespace tbo
