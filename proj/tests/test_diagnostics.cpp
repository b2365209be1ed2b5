#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracle.hpp"
#include "tbo/acquisition.hpp"
#include "tbo/diagnostics.hpp"

using namespace tbo;

namespace {

double eigen_info_gain(const Matrix& K, double s2, double alpha) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(K);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < K.rows(); ++i) sum += std::log1p(alpha / s2 * std::max(0.0, es.eigenvalues()[i]));
  return 0.5 * sum;
}

IterationRow row_with(double f) {
  IterationRow r;
  r.f_true = f;
  return r;
}

}  // namespace

TEST_CASE("info_gain") {
  CHECK(info_gain(Matrix::Identity(1, 1), 1.0, 1.0) == doctest::Approx(0.34657359027997265).epsilon(1e-15));
  CHECK(info_gain(Matrix::Zero(3, 3), 0.1, 1.0) == 0.0);
  Rng rng(4);
  const KernelSpec spec(KernelFamily::Matern52, Vector::Constant(2, 0.3), 1.3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix X = oracle::random_matrix(rng, 5 + trial, 2);
    const Matrix K = kernel_matrix(X, spec);
    const double s2 = 0.05 + 0.05 * (trial % 4);
    double prev = 0.0;
    std::vector<double> vals;
    for (const double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double v = info_gain(K, s2, a);
      CHECK(std::abs(v - eigen_info_gain(K, s2, a)) <= 1e-9 * std::max(1.0, v));
      CHECK(v >= prev);
      prev = v;
      vals.push_back(v);
    }
    for (std::size_t i = 1; i + 1 < vals.size(); ++i) CHECK(vals[i] >= 0.5 * (vals[i - 1] + vals[i + 1]) - 1e-12);
  }
}

TEST_CASE("greedy information gain") {
  Rng rng(6);
  const KernelSpec spec(KernelFamily::SquaredExponential, Vector::Constant(2, 0.25), 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix pool = oracle::random_matrix(rng, 8, 2);
    const GreedyInfoGain one = greedy_info_gain(pool, spec, 0.1, 1.0, 1);
    CHECK(one.selected == std::vector<int>{0});
    CHECK(one.value == doctest::Approx(0.5 * std::log1p(10.0)));

    const GreedyInfoGain g3 = greedy_info_gain(pool, spec, 0.1, 0.5, 3);
    CHECK(g3.selected.size() == 3);
    CHECK(g3.pool_size == 8);
    Matrix sel(3, 2);
    for (int i = 0; i < 3; ++i) sel.row(i) = pool.row(g3.selected[i]);
    CHECK(g3.value == doctest::Approx(info_gain(kernel_matrix(sel, spec), 0.1, 0.5)).epsilon(1e-12));

    // Greedy is within 1 - 1/e of the best 3-subset.
    double best = 0.0;
    for (int a = 0; a < 8; ++a)
      for (int b = a + 1; b < 8; ++b)
        for (int c = b + 1; c < 8; ++c) {
          Matrix s(3, 2);
          s.row(0) = pool.row(a);
          s.row(1) = pool.row(b);
          s.row(2) = pool.row(c);
          best = std::max(best, info_gain(kernel_matrix(s, spec), 0.1, 0.5));
        }
    CHECK(g3.value <= best + 1e-12);
    CHECK(g3.value >= (1.0 - std::exp(-1.0)) * best);

    double prev = 0.0;
    for (int t = 1; t <= 8; ++t) {
      const double v = greedy_info_gain(pool, spec, 0.1, 0.5, t).value;
      CHECK(v >= prev);
      prev = v;
    }
    CHECK(greedy_info_gain(pool, spec, 0.1, 0.2, 4).value <= greedy_info_gain(pool, spec, 0.1, 1.0, 4).value);
  }
  CHECK_THROWS_AS(greedy_info_gain(Matrix::Zero(2, 1), spec, 0.1, 1.0, 1), UsageError);
}

TEST_CASE("regret_trace") {
  RunRecord rec;
  for (const double f : {0.0, 0.5, 1.0, 0.8}) rec.rows.push_back(row_with(f));
  const RegretTrace r = regret_trace(rec, 1.0);
  const std::vector<double> expected{1.0, 0.5, 0.0, 0.2};
  REQUIRE(r.instantaneous.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(r.instantaneous[i] == doctest::Approx(expected[i]).epsilon(1e-15));
  CHECK(r.cumulative[3] == doctest::Approx(1.7));
  CHECK(r.average[1] == doctest::Approx(0.75));
  CHECK(r.normalized_defined);
  CHECK(r.normalized[0] == 1.0);
  CHECK(r.normalized[3] == doctest::Approx(1.7 / 4.0));
  for (std::size_t i = 1; i < r.cumulative.size(); ++i) CHECK(r.cumulative[i] >= r.cumulative[i - 1]);

  RunRecord top;
  top.rows.push_back(row_with(1.0));
  top.rows.push_back(row_with(0.0));
  const RegretTrace z = regret_trace(top, 1.0);
  CHECK_FALSE(z.normalized_defined);
  CHECK(z.normalized.empty());

  RunRecord over;
  over.rows.push_back(row_with(1.5));
  CHECK_THROWS_AS(regret_trace(over, 1.0), UsageError);
  const RegretTrace est = regret_trace(over, 1.0, true);
  CHECK(est.instantaneous[0] == 0.0);
  CHECK(est.clipped == doctest::Approx(0.5));
  CHECK(est.f_star_estimated);
}

TEST_CASE("one-step update matches conditioning") {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + trial % 3;
    const KernelSpec spec(trial % 2 ? KernelFamily::Matern52 : KernelFamily::SquaredExponential,
                          Vector::Constant(d, 0.4), 1.0);
    const double alpha = 0.1 + 0.3 * (trial % 4);
    const Matrix X = oracle::random_matrix(rng, 4 + trial % 6, d);
    const Vector y = oracle::random_vector(rng, X.rows(), -1, 1);
    const GPState prior = tempered_posterior(X, y, spec, 0.05, alpha);
    std::vector<Vector> tests;
    for (int i = 0; i < 10; ++i) tests.push_back(oracle::random_vector(rng, d));
    CHECK(sgd_equivalence_residual(prior, oracle::random_vector(rng, d), 0.7, alpha, tests) <= 1e-10);
  }
}

TEST_CASE("bound constants") {
  CHECK(tau_at_zero(1.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
  CHECK(tau_at_zero(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  for (const double g : {0.5, 1.0, 2.0}) {
    for (const double alpha : {0.2, 1.0}) {
      BoundInputs in;
      in.T = 50;
      in.alpha = alpha;
      in.g = g;
      in.gamma = 3.0;
      const BoundConstants c = bound_constants(in);
      const double r = 1.0 / (alpha * 49.0 + 1.0);
      CHECK(tau_g(c.tau_inverse_term, g) == doctest::Approx(tau_at_zero(g) * std::pow(r, g / 2)).epsilon(1e-8));
      CHECK(c.tau_inverse_term > 0.0);
      CHECK(c.m == doctest::Approx(std::sqrt(alpha) * (std::sqrt(3.0) + std::sqrt(std::log(2.0 * 2500.0 * M_PI * M_PI / 0.3)))));
      CHECK(c.bound == doctest::Approx(c.beta * std::sqrt(3.0 * 50.0 / alpha)));
      if (g >= 1.0) CHECK(c.eta == 0.0);
      else CHECK(c.eta > 0.0);
    }
  }
  BoundInputs bad;
  bad.T = 1;
  CHECK_THROWS_AS(bound_constants(bad), UsageError);
}

TEST_CASE("linear bound scaling") {
  LinearBoundInputs in;
  in.T = 10000;
  in.d = 5;
  const double full = linear_bound_value(in);
  in.alpha = 0.5;
  const double half = linear_bound_value(in);
  CHECK(half / full >= 0.5);
  CHECK(half / full <= 1.5);
  in.alpha = 1.0;
  in.T = 40000;
  const double longer = linear_bound_value(in);
  CHECK(longer / full >= 1.9);
  CHECK(longer / full <= 2.4);
}
