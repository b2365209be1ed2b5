#include "tbo/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/random/sobol.hpp>

namespace tbo {

Matrix quasi_random_points(const Box& box, int n, Rng& rng) {
  if (box.empty()) throw UsageError("quasi_random_points: empty domain");
  if (n < 1) throw UsageError("quasi_random_points: need at least one point");
  const int d = box.dim();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector shift(d);
  for (int k = 0; k < d; ++k) shift[k] = unif(rng);

  boost::random::sobol engine(static_cast<std::size_t>(d));
  const double scale = 1.0 / (static_cast<double>(engine.max()) + 1.0);
  Matrix pts(n, d);
  Vector u(d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) {
      double v = static_cast<double>(engine()) * scale + shift[k];
      u[k] = v - std::floor(v);
    }
    pts.row(i) = box.from_unit(u).transpose();
  }
  return pts;
}

Matrix latin_hypercube(const Box& box, int n, Rng& rng) {
  if (box.empty()) throw UsageError("latin_hypercube: empty domain");
  if (n < 1) throw UsageError("latin_hypercube: need at least one point");
  const int d = box.dim();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix unit(n, d);
  std::vector<int> perm(n);
  for (int k = 0; k < d; ++k) {
    std::iota(perm.begin(), perm.end(), 0);
    // Fisher-Yates with our own draws so the design does not depend on the
    // standard library's shuffle implementation.
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(unif(rng) * (i + 1)) % (i + 1);
      std::swap(perm[i], perm[j]);
    }
    for (int i = 0; i < n; ++i) {
      unit(i, k) = (perm[i] + unif(rng)) / n;
    }
  }
  Matrix pts(n, d);
  for (int i = 0; i < n; ++i) pts.row(i) = box.from_unit(unit.row(i).transpose()).transpose();
  return pts;
}

LocalResult compass_maximize(const std::function<double(const Vector&)>& f, const Box& box,
                             const Vector& start, double start_value,
                             const CompassOptions& opts) {
  const int d = box.dim();
  const Vector width = box.width();
  Vector x = start;
  double fx = start_value;
  double step = opts.initial_step;
  int evals = 0;
  while (step >= opts.min_step && evals < opts.max_evals) {
    bool improved = false;
    for (int k = 0; k < d && evals < opts.max_evals; ++k) {
      if (width[k] <= 0.0) continue;
      for (const double sign : {1.0, -1.0}) {
        Vector trial = x;
        trial[k] = std::clamp(x[k] + sign * step * width[k], box.lower[k], box.upper[k]);
        if (trial[k] == x[k]) continue;
        const double ft = f(trial);
        ++evals;
        if (ft > fx) {
          x = std::move(trial);
          fx = ft;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {x, fx, evals};
}

BoxMax screen_and_refine(const std::function<double(const Vector&)>& f, const Box& domain,
                         int budget, const std::vector<Vector>& extra, Rng& rng,
                         double initial_step) {
  if (domain.empty()) throw UsageError("screen_and_refine: empty domain");
  if (budget < 1) throw UsageError("screen_and_refine: budget must be >= 1");
  const Matrix screen = quasi_random_points(domain, budget, rng);
  std::vector<Vector> cands;
  cands.reserve(budget + extra.size());
  for (int i = 0; i < budget; ++i) cands.emplace_back(screen.row(i).transpose());
  for (const auto& e : extra) cands.push_back(domain.clamp(e));
  const int total = static_cast<int>(cands.size());

  std::vector<double> vals(total);
  for (int i = 0; i < total; ++i) vals[i] = f(cands[i]);
  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] > vals[b]; });

  BoxMax best{cands[order[0]], vals[order[0]]};
  CompassOptions opts;
  opts.initial_step = initial_step;
  const int n_refine = std::min(total, 5);
  for (int r = 0; r < n_refine; ++r) {
    const int idx = order[r];
    const LocalResult loc = compass_maximize(f, domain, cands[idx], vals[idx], opts);
    if (loc.value > best.value) best = {loc.x, loc.value};
  }
  return best;
}

}  // namespace tbo
