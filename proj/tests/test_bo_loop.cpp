#include <doctest.h>

#include <cmath>
#include <set>

#include "oracle.hpp"
#include "tbo/bo_loop.hpp"

using namespace tbo;

namespace {

BORunConfig small_config(double noise_sd = 0.05) {
  BORunConfig c;
  c.objective = builtin("toy", 0, noise_sd);
  c.kernel = KernelSpec(KernelFamily::Matern52, Vector::Constant(1, 0.1), 1.0);
  c.iterations = 6;
  c.init_size = 3;
  c.acq_budget = 128;
  c.hyperfit.mode = HyperfitMode::Off;
  c.record_timing = false;
  c.seed = 11;
  return c;
}

Matrix rows_before(const RunRecord& r, std::size_t k, Vector& y) {
  const Eigen::Index d = r.rows.front().x.size();
  Matrix X(static_cast<Eigen::Index>(k), d);
  y.resize(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    X.row(static_cast<Eigen::Index>(i)) = r.rows[i].x.transpose();
    y[static_cast<Eigen::Index>(i)] = r.rows[i].y;
  }
  return X;
}

}  // namespace

TEST_CASE("defaults") {
  CHECK(default_init_size(1) == 2);
  CHECK(default_init_size(4) == 5);
  CHECK(default_iterations(2) == 20);
  CHECK(default_iterations(6) == 30);
  CHECK(default_hyperfit(3).mode == HyperfitMode::EveryStep);
  CHECK(default_hyperfit(4).mode == HyperfitMode::Every);
  HyperfitConfig h;
  h.mode = HyperfitMode::Every;
  h.every = 3;
  CHECK(h.due(0));
  CHECK_FALSE(h.due(1));
  CHECK(h.due(3));
}

TEST_CASE("initial design") {
  Rng rng(1);
  const Box box(Vector::Constant(3, -2.0), Vector::Constant(3, 4.0));
  const Matrix D = initialize_design(box, 10, rng);
  for (Eigen::Index j = 0; j < 3; ++j) {
    std::set<int> strata;
    for (Eigen::Index i = 0; i < 10; ++i) {
      const double u = (D(i, j) + 2.0) / 6.0;
      CHECK(u >= 0.0);
      CHECK(u <= 1.0);
      strata.insert(static_cast<int>(std::floor(u * 10.0)));
    }
    CHECK(strata.size() == 10);
  }
  const Matrix U = initialize_design(box, 50, rng, DesignKind::Uniform);
  for (Eigen::Index i = 0; i < 50; ++i) CHECK(box.contains(U.row(i).transpose()));
}

TEST_CASE("single iteration run") {
  BORunConfig c = small_config();
  c.iterations = 1;
  const RunRecord r = run_bo(c);
  CHECK_FALSE(r.failed);
  CHECK(r.rows.size() == 4);
  CHECK(r.evaluations == 4);
  CHECK(r.iterations_completed == 1);
  CHECK(r.rows[0].initial);
  CHECK_FALSE(r.rows[3].initial);
  CHECK(r.rows[3].n_train == 3);
  CHECK(r.rows[3].alpha == 1.0);
  CHECK(r.wall_ms == 0.0);
}

TEST_CASE("budget and incumbents") {
  const RunRecord r = run_bo(small_config());
  REQUIRE_FALSE(r.failed);
  CHECK(r.rows.size() == 9);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const IterationRow& row = r.rows[i];
    CHECK(row.t == static_cast<int>(i) + 1);
    CHECK(r.objective == "toy");
    CHECK(row.f_true == doctest::Approx(toy_function(row.x[0])).epsilon(1e-15));
    if (i > 0) {
      CHECK(row.best_observed >= r.rows[i - 1].best_observed);
      CHECK(row.best_observed == std::max(r.rows[i - 1].best_observed, row.y));
    }
    if (!row.initial) {
      CHECK(row.n_train == static_cast<int>(i));
      CHECK(row.var_tempered >= 0.0);
      CHECK(row.var_untempered >= 0.0);
      CHECK(std::isfinite(row.acq_value));
    }
  }
  CHECK(r.recommended_observed_y == r.rows.back().best_observed);
}

TEST_CASE("recorded posterior quantities match a dense oracle") {
  for (const double alpha : {1.0, 0.4}) {
    BORunConfig c = small_config();
    c.schedule_mode = ScheduleMode::Fixed;
    c.fixed_alpha = alpha;
    c.acquisition.g = 1.0;
    c.center = false;
    const RunRecord r = run_bo(c);
    REQUIRE_FALSE(r.failed);
    const double noise = 0.05 * 0.05;
    for (std::size_t k = 3; k < r.rows.size(); ++k) {
      const IterationRow& row = r.rows[k];
      CHECK(row.alpha == alpha);
      CHECK(row.noise_variance == doctest::Approx(noise));
      Vector y;
      const Matrix X = rows_before(r, k, y);
      const oracle::MeanVar t = oracle::dense_posterior(X, y, c.kernel, noise, alpha, row.x);
      const oracle::MeanVar u = oracle::dense_posterior(X, y, c.kernel, noise, 1.0, row.x);
      CHECK(oracle::rel_err(row.mean_tempered, t.mean) < 1e-8);
      CHECK(std::abs(row.var_tempered - t.var) < 1e-8);
      CHECK(oracle::rel_err(row.mean_untempered, u.mean) < 1e-8);
      CHECK(std::abs(row.var_untempered - u.var) < 1e-8);
      CHECK(row.acq_value == doctest::Approx(gei_value(row.mean_tempered, std::sqrt(row.var_tempered),
                                                       row.incumbent, c.acquisition)).epsilon(1e-9));
      for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const oracle::MeanVar at = oracle::dense_posterior(X, y, c.kernel, noise, alpha, X.row(i).transpose());
        CHECK(row.incumbent >= at.mean - 1e-9);
        CHECK(row.acq_value >= gei_value(at.mean, std::sqrt(std::max(0.0, at.var)), row.incumbent, c.acquisition) - 1e-9);
      }
    }
  }
}

TEST_CASE("adaptive schedule is fed by the BO iterations") {
  BORunConfig c = small_config(0.3);
  c.iterations = 12;
  c.noise_variance = 0.01;  // misspecified on purpose
  const RunRecord r = run_bo(c);
  REQUIRE_FALSE(r.failed);
  double pv = 0.0, mse = 0.0;
  int t = 0;
  for (const IterationRow& row : r.rows) {
    if (row.initial) continue;
    double expected = 1.0;
    if (t > 0) {
      expected = std::min(std::sqrt((pv / t + row.noise_variance) / (pv / t + mse / t)), 1.0);
      expected = std::max(expected, c.alpha_floor);
    }
    CHECK(row.alpha == doctest::Approx(expected).epsilon(1e-12));
    pv += row.var_untempered;
    mse += (row.y - row.mean_untempered) * (row.y - row.mean_untempered);
    ++t;
  }
  CHECK(r.rows.back().alpha < 1.0);

  BORunConfig f = c;
  f.schedule_mode = ScheduleMode::Fixed;
  f.fixed_alpha = 0.5;
  for (const IterationRow& row : run_bo(f).rows) {
    if (!row.initial) CHECK(row.alpha == 0.5);
  }
}

TEST_CASE("determinism and seeds") {
  BORunConfig c = small_config();
  c.hyperfit.mode = HyperfitMode::EveryStep;
  c.hyperfit.restarts = 2;
  const RunRecord a = run_bo(c);
  const RunRecord b = run_bo(c);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].x == b.rows[i].x);
    CHECK(a.rows[i].y == b.rows[i].y);
    if (!a.rows[i].initial) CHECK(a.rows[i].alpha == b.rows[i].alpha);
  }
  BORunConfig other = c;
  other.seed = 12;
  CHECK(config_hash(other) == config_hash(c));
  CHECK(run_bo(other).rows[0].x != a.rows[0].x);
  other.acquisition.g = 2.0;
  CHECK(config_hash(other) != config_hash(c));

  // Schedule modes with the same seed share the initial design and noise.
  BORunConfig fixed = c;
  fixed.schedule_mode = ScheduleMode::Fixed;
  const RunRecord fr = run_bo(fixed);
  for (int i = 0; i < c.init_size; ++i) {
    CHECK(fr.rows[static_cast<std::size_t>(i)].x == a.rows[static_cast<std::size_t>(i)].x);
    CHECK(fr.rows[static_cast<std::size_t>(i)].y == a.rows[static_cast<std::size_t>(i)].y);
  }
}

TEST_CASE("linear surrogate run") {
  BORunConfig c = small_config();
  c.surrogate = SurrogateKind::Linear;
  c.linear.features = 32;
  const RunRecord r = run_bo(c);
  CHECK_FALSE(r.failed);
  CHECK(r.rows.size() == 9);
  for (const IterationRow& row : r.rows) CHECK(c.objective.domain.contains(row.x));
}

TEST_CASE("sweep") {
  CHECK(sweep_seed(0, "branin", 2, 0) == sweep_seed(0, "branin", 2, 0));
  CHECK(sweep_seed(0, "branin", 2, 0) != sweep_seed(0, "branin", 2, 1));
  CHECK(sweep_seed(0, "branin", 2, 0) != sweep_seed(1, "branin", 2, 0));
  SweepGrid grid;
  grid.objectives = {{"sphere", 2}, {"branin", 0}};
  grid.gs = {0.0, 1.0};
  grid.modes = {{"adaptive", ScheduleMode::Adaptive, 1.0}, {"fixed-1", ScheduleMode::Fixed, 1.0}};
  grid.seeds = 2;
  grid.base.iterations = 2;
  grid.base.init_size = 3;
  grid.base.acq_budget = 64;
  grid.base.record_timing = false;
  grid.base.hyperfit.mode = HyperfitMode::Off;
  grid.keep_hyperfit = true;
  const auto results = sweep(grid);
  REQUIRE(results.size() == 16);
  CHECK(results[0].objective == "sphere");
  CHECK(results[0].g == 0.0);
  CHECK(results[0].mode == "adaptive");
  CHECK(results[1].seed_index == 1);
  CHECK(results[2].mode == "fixed-1");
  CHECK(results[8].objective == "branin");
  for (const auto& s : results) {
    CHECK_FALSE(s.record.failed);
    CHECK(s.record.rows.size() == 5);
    CHECK(s.record.seed == sweep_seed(0, s.objective, s.dim, s.seed_index));
  }
  // Same objective and seed index: identical initial design across g and mode.
  CHECK(results[0].record.rows[0].x == results[6].record.rows[0].x);
}

TEST_CASE("config validation") {
  BORunConfig c = small_config();
  c.iterations = -1;
  CHECK_THROWS_AS(run_bo(c), UsageError);
  c = small_config();
  c.schedule_mode = ScheduleMode::Fixed;
  c.fixed_alpha = 0.0;
  CHECK_THROWS_AS(run_bo(c), UsageError);
  c = small_config();
  c.init_size = 0;
  CHECK_THROWS_AS(run_bo(c), UsageError);
}
