#pragma once

#include <functional>
#include <vector>

#include "tbo/common.hpp"

namespace tbo {

// n points of a Sobol sequence mapped onto the box, with a random
// Cranley-Patterson shift drawn from rng. One point per row.
Matrix quasi_random_points(const Box& box, int n, Rng& rng);

// Latin-hypercube design: each axis is cut into n equal bins and every bin
// holds exactly one sample. One point per row.
Matrix latin_hypercube(const Box& box, int n, Rng& rng);

struct CompassOptions {
  double initial_step = 0.1;  // fraction of the box width
  double min_step = 1e-7;     // fraction of the box width
  int max_evals = 400;
};

struct LocalResult {
  Vector x;
  double value;
  int evals;
};

// Derivative-free coordinate (compass) ascent inside the box. The returned
// value is never below the starting value.
LocalResult compass_maximize(const std::function<double(const Vector&)>& f, const Box& box,
                             const Vector& start, double start_value,
                             const CompassOptions& opts = {});

struct BoxMax {
  Vector x;
  double value;
};

// Evaluates f on `budget` quasi-random points followed by `extra`, then runs
// compass ascent from the five best. Ties resolve to the earliest candidate.
BoxMax screen_and_refine(const std::function<double(const Vector&)>& f, const Box& domain,
                         int budget, const std::vector<Vector>& extra, Rng& rng,
                         double initial_step);

}  // namespace tbo
