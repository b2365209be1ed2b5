// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned here.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "tbo/acquisition.hpp"
#include "tbo/bo_loop.hpp"
#include "tbo/diagnostics.hpp"
#include "tbo/experiments.hpp"
#include "tbo/gp.hpp"
#include "tbo/io.hpp"
#include "tbo/linear.hpp"
#include "tbo/schedule.hpp"

using namespace tbo;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Runs shared between criteria 11-13.
std::vector<RunRecord> g_produced_runs;

// 1. Tempered posterior vs dense inversion.
Outcome criterion1() {
  constexpr double kTol = 1e-8;
  Rng rng(101);
  double worst = 0.0;
  const KernelFamily fams[] = {KernelFamily::SquaredExponential, KernelFamily::Matern52,
                               KernelFamily::Matern32};
  const double alphas[] = {0.1, 0.5, 1.0};
  for (int inst = 0; inst < 50; ++inst) {
    const int d = 1 + inst % 5;
    const int t = 1 + (inst * 7) % 30;
    const double alpha = alphas[inst % 3];
    const double sf2 = 0.5 + 0.1 * (inst % 10);
    const KernelSpec spec(fams[inst % 3], oracle::random_vector(rng, d, 0.2, 0.8), sf2);
    const double noise = 0.01 + 0.02 * (inst % 5);
    const Matrix X = oracle::random_matrix(rng, t, d);
    const Vector y = oracle::random_vector(rng, t, -2, 2);
    const double offset = inst % 2 ? y.mean() : 0.0;
    const GPState st = tempered_posterior(X, y, spec, noise, alpha, {}, offset);
    for (int q = 0; q < 5; ++q) {
      const Vector x = oracle::random_vector(rng, d);
      const Prediction p = st.predict(x);
      const oracle::MeanVar o = oracle::dense_posterior(X, y, spec, noise, alpha, x, offset);
      // Relative to max(|value|, prior variance) so near-zero variances use the natural scale.
      worst = std::max(worst, std::abs(p.mean - o.mean) / std::max(std::abs(o.mean), sf2));
      worst = std::max(worst, std::abs(p.variance - o.var) / std::max(std::abs(o.var), sf2));
    }
  }
  return {worst <= kTol, "max relative error " + fmt("%.3g", worst) + " (tol 1e-8, 50 instances)"};
}

// 2. tau consistency.
Outcome criterion2() {
  bool ok = true;
  double series_err = 0.0, zero_err = 0.0, deriv_err = 0.0, inv_err = 0.0;
  for (int g = 0; g <= 5; ++g) {
    for (const double v : {-5.0, -2.0, -0.5, 0.0, 0.5, 2.0, 5.0}) {
      const double q = tau_quadrature(v, g);
      series_err = std::max(series_err, std::abs(tau_series(v, g) - q) / q);
    }
  }
  ok &= series_err <= 1e-8;
  for (const double g : {0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) {
    const double closed = std::pow(2.0, g / 2 - 1) * std::tgamma((g + 1) / 2) / std::sqrt(M_PI);
    zero_err = std::max(zero_err, std::abs(tau_g(0.0, g) - closed));
  }
  ok &= zero_err <= 1e-10;
  for (const double g : {1.0, 1.5, 2.0, 2.5, 3.0}) {
    for (const double v : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
      const double h = 1e-5;
      const double fd = (tau_g(v + h, g) - tau_g(v - h, g)) / (2 * h);
      deriv_err = std::max(deriv_err, std::abs(fd + g * tau_g(v, g - 1)));
    }
  }
  ok &= deriv_err <= 1e-5;
  bool decreasing = true, lower = true;
  for (const double g : {0.0, 0.5, 1.0, 2.0, 3.0, 5.0}) {
    double prev = tau_g(-5.0, g);
    for (int i = 1; i <= 300; ++i) {
      const double cur = tau_g(-5.0 + 0.05 * i, g);
      decreasing &= cur < prev;
      prev = cur;
    }
    for (const double z : {-8.0, -4.0, -2.0, -1.0, -0.5, -0.1}) {
      const double u0 = std::min(1.0, -z / 2);
      lower &= tau_g(z, g) >= std::pow(u0, g + 1) / (g + 1) * normal_pdf(z + u0);
    }
  }
  ok &= decreasing && lower;
  for (const double g : {0.0, 0.5, 1.0, 2.0, 3.0}) {
    for (const double v : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
      inv_err = std::max(inv_err, std::abs(tau_g_inverse(tau_g(v, g), g) - v));
    }
  }
  ok &= inv_err <= 1e-9;
  return {ok, "series " + fmt("%.2g", series_err) + ", tau(0) " + fmt("%.2g", zero_err) +
                  ", derivative " + fmt("%.2g", deriv_err) + ", inverse " + fmt("%.2g", inv_err) +
                  (decreasing ? ", decreasing" : ", NOT decreasing") +
                  (lower ? ", lower bounds hold" : ", lower bound violated")};
}

// 3. EI partial derivatives.
Outcome criterion3() {
  AcqConfig c;
  c.g = 1.0;
  double worst = 0.0;
  for (const double mu : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
    for (const double sd : {0.1, 0.5, 1.0, 3.0}) {
      for (const double m : {-1.0, 0.0, 1.0}) {
        const double h = 1e-6;
        const double z = (mu - m) / sd;
        const double dmu = (gei_value(mu + h, sd, m, c) - gei_value(mu - h, sd, m, c)) / (2 * h);
        const double dsd = (gei_value(mu, sd + h, m, c) - gei_value(mu, sd - h, m, c)) / (2 * h);
        worst = std::max({worst, std::abs(dmu - normal_cdf(z)), std::abs(dsd - normal_pdf(z))});
      }
    }
  }
  return {worst <= 1e-5, "max deviation " + fmt("%.3g", worst) + " (tol 1e-5)"};
}

// 4. One-step update vs conditioning.
Outcome criterion4() {
  Rng rng(404);
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const int d = 1 + inst % 4;
    const KernelSpec spec(inst % 2 ? KernelFamily::Matern52 : KernelFamily::SquaredExponential,
                          oracle::random_vector(rng, d, 0.2, 0.7), 0.5 + (inst % 3) * 0.5);
    const double alpha = 0.1 + 0.1 * (inst % 10);
    const Matrix X = oracle::random_matrix(rng, 2 + inst % 15, d);
    const Vector y = oracle::random_vector(rng, X.rows(), -1, 1);
    const GPState prior = tempered_posterior(X, y, spec, 0.05, alpha);
    std::vector<Vector> tests;
    for (int i = 0; i < 8; ++i) tests.push_back(oracle::random_vector(rng, d));
    worst = std::max(worst, sgd_equivalence_residual(prior, oracle::random_vector(rng, d),
                                                     std::normal_distribution<double>(0, 1)(rng), alpha,
                                                     tests));
  }
  return {worst <= 1e-10, "max residual " + fmt("%.3g", worst) + " (tol 1e-10, 100 instances)"};
}

// 5. Information gain.
Outcome criterion5() {
  Rng rng(505);
  double worst = 0.0;
  bool monotone = true, concave = true;
  for (int inst = 0; inst < 20; ++inst) {
    const int d = 1 + inst % 3;
    const KernelSpec spec(KernelFamily::Matern52, Vector::Constant(d, 0.3), 1.0);
    const Matrix K = kernel_matrix(oracle::random_matrix(rng, 10 + inst, d), spec);
    const double s2 = 0.01 + 0.05 * (inst % 4);
    Eigen::SelfAdjointEigenSolver<Matrix> es(K);
    std::vector<double> vals;
    for (int k = 1; k <= 8; ++k) {
      const double a = k / 8.0;
      double eig = 0.0;
      for (Eigen::Index i = 0; i < K.rows(); ++i) eig += 0.5 * std::log1p(a / s2 * std::max(0.0, es.eigenvalues()[i]));
      const double v = info_gain(K, s2, a);
      worst = std::max(worst, std::abs(v - eig) / std::max(1.0, eig));
      vals.push_back(v);
    }
    for (std::size_t i = 1; i < vals.size(); ++i) monotone &= vals[i] >= vals[i - 1];
    for (std::size_t i = 1; i + 1 < vals.size(); ++i) concave &= 2 * vals[i] >= vals[i - 1] + vals[i + 1] - 1e-12;
  }
  return {worst <= 1e-10 && monotone && concave,
          "eigen mismatch " + fmt("%.3g", worst) + (monotone ? ", monotone" : ", NOT monotone") +
              (concave ? ", concave" : ", NOT concave")};
}

// 6. Determinant growth.
Outcome criterion6() {
  Rng rng(606);
  bool ok = true;
  for (int inst = 0; inst < 100; ++inst) {
    const int d = 1 + inst % 5;
    const int T = 1 + (inst * 13) % 100;
    LinearState s = linear_init(d, 0.5 + inst % 3, 0.1 + 0.2 * (inst % 4), 0.1 + 0.1 * (inst % 10));
    double L = 0.0;
    std::vector<Vector> feats;
    for (int t = 0; t < T; ++t) {
      feats.push_back(oracle::random_vector(rng, d, -1, 1));
      L = std::max(L, feats.back().norm());
    }
    for (const auto& f : feats) s = linear_update(s, f, 0.0);
    const DetGrowth g = det_growth_check(s, L);
    ok &= g.lhs <= g.rhs + 1e-12;
  }
  const double L = 1.3;
  const LinearState one = linear_update(linear_init(1, 1.0, 1.0, 1.0), Vector::Constant(1, L), 0.0);
  const DetGrowth eq = det_growth_check(one, L);
  const double gap = std::abs(eq.lhs - eq.rhs);
  return {ok && gap <= 1e-12, std::string(ok ? "lhs <= rhs on 100 streams" : "lhs > rhs found") +
                                  ", equality gap " + fmt("%.3g", gap)};
}

// 7. Variance floor at the incumbent with unit prior variance.
Outcome criterion7() {
  int checked = 0;
  double worst = 1e300;
  for (const char* name : {"toy", "branin", "hartmann3"}) {
    for (const double alpha : {0.1, 0.5, 1.0, -1.0}) {
      for (int seed = 0; seed < 3; ++seed) {
        BORunConfig c;
        c.objective = builtin(name, 0, 0.05);
        c.iterations = 10;
        c.init_size = 3;
        c.acq_budget = 256;
        c.hyperfit.fit_signal_variance = false;
        c.hyperfit.restarts = 2;
        c.kernel.signal_variance = 1.0;
        if (alpha > 0) {
          c.schedule_mode = ScheduleMode::Fixed;
          c.fixed_alpha = alpha;
        }
        c.record_timing = false;
        c.seed = derive_seed(7, std::string(name) + std::to_string(seed));
        const RunRecord r = run_bo(c);
        for (const IterationRow& row : r.rows) {
          if (row.initial) continue;
          const double floor = row.noise_variance / (row.alpha * row.n_train + row.noise_variance);
          worst = std::min(worst, row.var_at_incumbent - (floor - 1e-9));
          ++checked;
        }
      }
    }
  }
  return {worst >= 0.0, std::to_string(checked) + " iterations, min slack " + fmt("%.3g", worst)};
}

// 8. Linear surrogate: ridge equivalence and confidence-radius coverage.
Outcome criterion8() {
  Rng rng(808);
  double ridge_err = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const int d = 1 + inst % 5;
    const int t = 5 + inst;
    const double lambda = 0.5 + 0.25 * (inst % 4), s2 = 0.1 + 0.1 * (inst % 3);
    const Matrix Phi = oracle::random_matrix(rng, t, d, -1, 1);
    const Vector y = oracle::random_vector(rng, t, -1, 1);
    LinearState s = linear_init(d, lambda, s2, 1.0);
    for (int i = 0; i < t; ++i) s = linear_update(s, Phi.row(i).transpose(), y[i]);
    const Vector ridge = (Phi.transpose() * Phi + lambda * s2 * Matrix::Identity(d, d)).inverse() * (Phi.transpose() * y);
    ridge_err = std::max(ridge_err, (s.posterior_mean() - ridge).norm() / std::max(1.0, ridge.norm()));
  }
  constexpr double kDelta = 0.1;
  constexpr int kRuns = 200, kT = 100, kD = 3;
  constexpr double kS = 1.0, kLambda = 1.0, kNoise = 0.25;
  int covered = 0;
  for (int run = 0; run < kRuns; ++run) {
    Rng r(derive_seed(808, "coverage/" + std::to_string(run)));
    std::normal_distribution<double> n01(0.0, 1.0);
    Vector theta(kD);
    for (auto& v : theta) v = n01(r);
    theta *= kS / theta.norm();
    LinearState s = linear_init(kD, kLambda, kNoise, 1.0);
    bool inside = true;
    for (int t = 0; t < kT; ++t) {
      Vector phi(kD);
      for (auto& v : phi) v = n01(r);
      phi /= std::max(1.0, phi.norm());
      s = linear_update(s, phi, theta.dot(phi) + std::sqrt(kNoise) * n01(r));
      const Vector e = s.posterior_mean() - theta;
      inside &= std::sqrt(e.dot(s.precision * e)) <= beta_radius(s, kS, kDelta);
    }
    covered += inside;
  }
  const double rate = static_cast<double>(covered) / kRuns;
  return {ridge_err <= 1e-10 && rate >= 1 - kDelta,
          "ridge error " + fmt("%.3g", ridge_err) + ", anytime coverage " + fmt("%.3f", rate) +
              " (need >= 0.9, 200 runs)"};
}

double median_last(const ScheduleSimResult& r, int t) {
  const Vector col = r.alpha.col(t - 1);
  return median(std::vector<double>(col.begin(), col.end()));
}

// 9. Vanishing bias.
Outcome criterion9() {
  ScheduleSimOptions o;
  o.t_max = 500;
  o.seeds = 20;
  const double m = median_last(simulate_schedule(o), 500);
  return {m >= 0.95, "median alpha at t=500 " + fmt("%.4f", m) + " (need >= 0.95)"};
}

// 10. Constant bias.
Outcome criterion10() {
  ScheduleSimOptions o;
  o.constant_bias = true;
  o.bias = std::sqrt(3.0);
  o.sigma2 = 1.0;
  o.pv = 0.0;
  o.t_max = 1000;
  o.seeds = 20;
  const ScheduleSimResult r = simulate_schedule(o);
  const double m = median_last(r, 1000);
  return {std::abs(m - 0.5) <= 0.05 && std::abs(r.limit - 0.5) <= 1e-12,
          "median alpha at t=1000 " + fmt("%.4f", m) + ", limit " + fmt("%.4f", r.limit) + " (need 0.5 +- 0.05)"};
}

// 11. Toy: PI with alpha = 0.1 vs alpha = 1.
Outcome criterion11() {
  ToyOptions o;
  o.alphas = {0.1, 1.0};
  o.seeds = 20;
  const ToyResult res = run_toy(o);
  std::vector<double> a, b;
  int wins = 0, losses = 0;
  for (int s = 0; s < o.seeds; ++s) {
    const double va = best_observed_after(res.run(0, s), 10);
    const double vb = best_observed_after(res.run(1, s), 10);
    a.push_back(va);
    b.push_back(vb);
    wins += va > vb;
    losses += va < vb;
  }
  for (const auto& r : res.runs) g_produced_runs.push_back(r);
  const double ma = median(a), mb = median(b);
  const double p = sign_test_pvalue(wins, wins + losses);
  return {ma >= mb && p <= 0.1, "median at iteration 10: alpha=0.1 " + fmt("%.4f", ma) + ", alpha=1 " +
                                    fmt("%.4f", mb) + "; sign test " + std::to_string(wins) + " vs " +
                                    std::to_string(losses) + ", one-sided p=" + fmt("%.3f", p) +
                                    " (need <= 0.1)"};
}

// 12. Benchmark mini-sweep, g = 0 direction.
Outcome criterion12() {
  SweepGrid grid;
  for (const char* s : {"branin", "camel6", "hartmann3", "hartmann6", "ackley", "levy", "rastrigin",
                        "griewank", "sphere", "styblinski_tang", "drop_wave", "michalewicz:2"}) {
    grid.objectives.push_back(parse_sweep_objective(s));
  }
  grid.gs = {0.0, 2.0};
  grid.modes = {parse_sweep_mode("adaptive"), parse_sweep_mode("fixed-1")};
  grid.seeds = 5;
  grid.base_seed = 0;
  grid.noise_sd = 0.01;
  grid.base.iterations = 0;
  grid.base.init_size = 0;
  grid.base.record_timing = false;
  const auto results = sweep(grid);
  std::vector<Objective> objectives;
  for (const auto& o : grid.objectives) objectives.push_back(builtin(o.name, o.dim, grid.noise_sd));
  for (const auto& r : results) g_produced_runs.push_back(r.record);
  const auto rows = aggregate(results, objectives);
  const auto fw = function_wins(rows, "adaptive", "fixed-1");
  const auto pw = paired_wins(rows, "adaptive", "fixed-1");
  bool ok = false;
  std::string detail;
  for (const auto& w : fw) {
    const int decided = w.a_wins + w.b_wins;
    if (w.g == 0.0) ok = decided > 0 && 2 * w.a_wins > decided;
    detail += "g=" + fmt("%g", w.g) + ": functions " + std::to_string(w.a_wins) + " vs " +
              std::to_string(w.b_wins) + (w.g == 0.0 ? "" : " (informational)") + "; ";
  }
  for (const auto& w : pw) {
    if (w.function != "ALL") continue;
    detail += "g=" + fmt("%g", w.g) + " seed pairs " + std::to_string(w.a_wins) + " vs " +
              std::to_string(w.b_wins) + "; ";
  }
  return {ok, detail + std::to_string(results.size()) + " runs (need g=0 adaptive > 50% of decided functions)"};
}

// 13. Budget accounting and incumbent monotonicity on the runs of 11-12.
Outcome criterion13() {
  int bad = 0, failed = 0;
  for (const RunRecord& r : g_produced_runs) {
    if (r.failed) ++failed;
    bool ok = static_cast<int>(r.rows.size()) == r.init_size + r.iterations_completed &&
              r.evaluations == static_cast<int>(r.rows.size()) &&
              (r.failed || r.iterations_completed == r.iterations_requested);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      const IterationRow& row = r.rows[i];
      best = std::max(best, row.y);
      ok &= row.t == static_cast<int>(i) + 1;
      ok &= row.best_observed == best;
      ok &= row.initial == (static_cast<int>(i) < r.init_size);
      if (!row.initial) ok &= row.n_train == static_cast<int>(i);
    }
    bad += !ok;
  }
  return {bad == 0 && !g_produced_runs.empty(), std::to_string(g_produced_runs.size()) + " runs, " +
                                                    std::to_string(bad) + " violations, " +
                                                    std::to_string(failed) + " failed"};
}

// 14. Bound shapes.
Outcome criterion14() {
  constexpr int kT = 30;
  constexpr double kNoise = 0.01;
  Rng rng(1414);
  const Matrix pool = oracle::random_matrix(rng, 256, 2);
  const KernelSpec spec(KernelFamily::SquaredExponential, Vector::Constant(2, 0.2), 1.0);
  bool monotone = true, monotone_fixed = true;
  double prev = 0.0, prev_fixed = 0.0;
  const double gamma_fixed = greedy_info_gain(pool, spec, kNoise, 1.0, kT).value;
  std::string shape;
  for (int k = 1; k <= 10; ++k) {
    const double alpha = k / 10.0;
    BoundInputs in;
    in.T = kT;
    in.alpha = alpha;
    in.g = 1.0;
    in.noise_variance = kNoise;
    in.gamma = greedy_info_gain(pool, spec, kNoise, alpha, kT).value;
    const double v = bound_constants(in).beta / std::sqrt(alpha);
    in.gamma = gamma_fixed;
    const double vf = bound_constants(in).beta / std::sqrt(alpha);
    if (k > 1) {
      monotone &= v >= prev;
      monotone_fixed &= vf >= prev_fixed;
    }
    prev = v;
    prev_fixed = vf;
  }
  // tau_g^{-1}(tau_g(0) r^{g/2}) / sqrt(g log T) stays in a fixed band.
  constexpr double kLo = 0.5, kHi = 1.5;
  double lo = 1e300, hi = 0.0;
  for (const double g : {1.0, 2.0, 3.0}) {
    for (const int T : {1000, 10000, 100000, 1000000}) {
      BoundInputs in;
      in.T = T;
      in.g = g;
      const double ratio = bound_constants(in).tau_inverse_term / std::sqrt(g * std::log(T));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  const bool band = lo >= kLo && hi <= kHi;
  return {monotone && band,
          std::string("beta/sqrt(alpha) with gamma_{T,alpha} ") + (monotone ? "nondecreasing" : "NOT monotone") +
              " on alpha in {0.1..1}; fixed-gamma variant " + (monotone_fixed ? "monotone" : "not monotone") +
              " (informational); tau^{-1} ratio in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) +
              "] (band [0.5, 1.5])"};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion1},   {2, criterion2},   {3, criterion3},   {4, criterion4},   {5, criterion5},
      {6, criterion6},   {7, criterion7},   {8, criterion8},   {9, criterion9},   {10, criterion10},
      {11, criterion11}, {12, criterion12}, {13, criterion13}, {14, criterion14}};
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d: %s  %s [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
