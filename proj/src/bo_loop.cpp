#include "tbo/bo_loop.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "tbo/linear.hpp"
#include "tbo/sampling.hpp"

namespace tbo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += fmt(v[i]);
  }
  return out;
}

Matrix stack_rows(const std::vector<Vector>& xs, int d) {
  Matrix X(static_cast<Eigen::Index>(xs.size()), d);
  for (std::size_t i = 0; i < xs.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = xs[i].transpose();
  return X;
}

double resolve_noise(const BORunConfig& c) {
  if (c.noise_variance > 0.0) return c.noise_variance;
  if (c.objective.noise_sd > 0.0) return c.objective.noise_sd * c.objective.noise_sd;
  return 1e-4;
}

KernelSpec initial_kernel(const BORunConfig& c) {
  KernelSpec spec = c.kernel;
  if (spec.lengthscales.size() == 0) spec.lengthscales = 0.2 * c.objective.domain.width();
  return spec;
}

double population_variance(const Vector& y) {
  if (y.size() < 2) return 0.0;
  const double m = y.mean();
  return (y.array() - m).square().mean();
}

HyperBounds hyper_bounds(const BORunConfig& c, const Vector& y_centered, const KernelSpec& spec,
                         double noise) {
  HyperBounds b;
  const Vector w = c.objective.domain.width();
  for (int k = 0; k < w.size(); ++k) b.lengthscales.push_back({0.01 * w[k], 10.0 * w[k]});
  double vy = population_variance(y_centered);
  if (!(vy > 1e-12)) vy = 1.0;
  if (c.hyperfit.fit_signal_variance) {
    b.signal_variance = {1e-2 * vy, 1e2 * vy};
  } else {
    b.signal_variance = {spec.signal_variance, spec.signal_variance};
  }
  if (c.hyperfit.fit_noise) {
    b.noise_variance = {std::max(1e-10, 1e-8 * vy), std::max(vy, 1e-6)};
  } else {
    b.noise_variance = {noise, noise};
  }
  return b;
}

double clamp_to(double v, const Interval& iv) { return std::clamp(v, iv.lo, iv.hi); }

struct Chosen {
  Vector x;
  double incumbent;
  double acq_value;
  double var_at_incumbent;
  Prediction untempered;
  Prediction tempered;
};

// Everything the linear path needs for one step: features, tempered and
// untempered posteriors in closed form.
struct LinearModel {
  FeatureMap phi;
  Box domain;
  double offset = 0.0;
  Vector mean_a, mean_1;
  Matrix cov_a, cov_1;

  [[nodiscard]] Vector features(const Vector& x) const {
    return phi((x - domain.lower).cwiseQuotient(domain.width()));
  }
};

void linear_posterior(const std::vector<Vector>& feats, const Vector& yc, double lambda,
                      double noise, double alpha, Vector& mean, Matrix& cov) {
  LinearState s = linear_init(static_cast<int>(feats.front().size()), lambda, noise, alpha);
  for (std::size_t i = 0; i < feats.size(); ++i) s = linear_update(s, feats[i], yc[static_cast<Eigen::Index>(i)]);
  cov = s.posterior_covariance();
  mean = cov * s.weighted_sum;
}

}  // namespace

bool HyperfitConfig::due(int iter) const {
  switch (mode) {
    case HyperfitMode::Off:
      return false;
    case HyperfitMode::EveryStep:
      return true;
    case HyperfitMode::Every:
      return iter % std::max(every, 1) == 0;
  }
  return false;
}

HyperfitConfig default_hyperfit(int dim) {
  HyperfitConfig h;
  if (dim > 3) {
    h.mode = HyperfitMode::Every;
    h.every = 5;
  }
  return h;
}

int default_init_size(int dim) { return std::min(5, 2 * dim); }

int default_iterations(int dim) { return std::min(30, 10 * dim); }

void BORunConfig::validate() const {
  if (!objective.eval) throw UsageError("objective: not set");
  if (objective.domain.empty()) throw UsageError("objective: empty domain");
  if (iterations < 0) throw UsageError("iterations: must be >= 0");
  if (init_size < 1) throw UsageError("init_size: must be >= 1");
  if (acq_budget < 1) throw UsageError("acq_budget: must be >= 1");
  if (schedule_mode == ScheduleMode::Fixed && !(fixed_alpha > 0.0 && fixed_alpha <= 1.0)) {
    throw UsageError("fixed_alpha: must lie in (0, 1]");
  }
  if (!(alpha_floor > 0.0 && alpha_floor < 1.0)) throw UsageError("alpha_floor: must lie in (0, 1)");
  if (hyperfit.restarts < 1) throw UsageError("hyperfit.restarts: must be >= 1");
  if (hyperfit.mode == HyperfitMode::Every && hyperfit.every < 1) {
    throw UsageError("hyperfit.every: must be >= 1");
  }
  if (kernel.lengthscales.size() != 0) {
    if (kernel.lengthscales.size() != objective.dim()) {
      throw UsageError("kernel.lengthscales: expected " + std::to_string(objective.dim()) + " values");
    }
    kernel.validate();
  }
  if (!(kernel.signal_variance > 0.0)) throw UsageError("kernel.signal_variance: must be positive");
  if (linear.features < 1) throw UsageError("linear.features: must be >= 1");
  if (!(linear.lengthscale > 0.0)) throw UsageError("linear.lengthscale: must be positive");
  if (!(linear.prior_precision > 0.0)) throw UsageError("linear.prior_precision: must be positive");
  acquisition.validate();
}

Matrix initialize_design(const Box& domain, int n, Rng& rng, DesignKind kind) {
  if (n < 1) throw UsageError("initialize_design: n must be >= 1");
  if (kind == DesignKind::LatinHypercube) return latin_hypercube(domain, n, rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix X(n, domain.dim());
  for (int i = 0; i < n; ++i) {
    Vector v(domain.dim());
    for (int k = 0; k < domain.dim(); ++k) v[k] = u(rng);
    X.row(i) = domain.from_unit(v).transpose();
  }
  return X;
}

std::string describe_config(const BORunConfig& c) {
  std::ostringstream s;
  s << "objective=" << c.objective.name << '\n'
    << "domain.lower=" << fmt(c.objective.domain.lower) << '\n'
    << "domain.upper=" << fmt(c.objective.domain.upper) << '\n'
    << "noise_sd=" << fmt(c.objective.noise_sd) << '\n'
    << "surrogate=" << (c.surrogate == SurrogateKind::GP ? "gp" : "linear") << '\n'
    << "kernel.family=" << kernel_family_name(c.kernel.family) << '\n'
    << "kernel.lengthscales=" << fmt(c.kernel.lengthscales) << '\n'
    << "kernel.signal_variance=" << fmt(c.kernel.signal_variance) << '\n'
    << "g=" << fmt(c.acquisition.g) << '\n'
    << "nu=" << fmt(c.acquisition.nu) << '\n'
    << "xi=" << fmt(c.acquisition.xi) << '\n'
    << "quadrature_nodes=" << c.acquisition.quadrature_nodes << '\n'
    << "schedule=" << (c.schedule_mode == ScheduleMode::Fixed ? "fixed" : "adaptive") << '\n'
    << "fixed_alpha=" << fmt(c.fixed_alpha) << '\n'
    << "alpha_floor=" << fmt(c.alpha_floor) << '\n'
    << "iterations=" << c.iterations << '\n'
    << "init_size=" << c.init_size << '\n'
    << "design=" << (c.design == DesignKind::Uniform ? "uniform" : "lhs") << '\n'
    << "acq_budget=" << c.acq_budget << '\n'
    << "hyperfit.mode=" << static_cast<int>(c.hyperfit.mode) << '\n'
    << "hyperfit.every=" << c.hyperfit.every << '\n'
    << "hyperfit.restarts=" << c.hyperfit.restarts << '\n'
    << "hyperfit.fit_signal_variance=" << c.hyperfit.fit_signal_variance << '\n'
    << "hyperfit.fit_noise=" << c.hyperfit.fit_noise << '\n'
    << "noise_variance=" << fmt(c.noise_variance) << '\n'
    << "center=" << c.center << '\n'
    << "linear.features=" << c.linear.features << '\n'
    << "linear.lengthscale=" << fmt(c.linear.lengthscale) << '\n'
    << "linear.prior_precision=" << fmt(c.linear.prior_precision) << '\n';
  return s.str();
}

std::string config_hash(const BORunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(describe_config(config))));
  return buf;
}

RunRecord run_bo(const BORunConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const Objective& obj = config.objective;
  const Box& domain = obj.domain;
  const int d = obj.dim();

  RunRecord rec;
  rec.objective = obj.name;
  rec.dim = d;
  rec.seed = config.seed;
  rec.config_hash = config_hash(config);
  rec.init_size = config.init_size;
  rec.iterations_requested = config.iterations;

  Rng design_rng(derive_seed(config.seed, "design"));
  Rng noise_rng(derive_seed(config.seed, "noise"));
  Rng mean_rng(derive_seed(config.seed, "incumbent"));
  Rng acq_rng(derive_seed(config.seed, "acquisition"));
  Rng hyper_rng(derive_seed(config.seed, "hyperfit"));
  Rng feature_rng(derive_seed(config.seed, "features"));

  std::vector<Vector> xs;
  std::vector<double> ys;
  double best_y = -std::numeric_limits<double>::infinity();
  double best_f = kNaN;
  Vector best_x;

  auto observe = [&](const Vector& x, IterationRow& row) {
    row.x = x;
    row.y = evaluate_noisy(obj, x, noise_rng);
    row.f_true = obj(x);
    ++rec.evaluations;
    xs.push_back(x);
    ys.push_back(row.y);
    if (row.y > best_y) {
      best_y = row.y;
      best_f = row.f_true;
      best_x = x;
    }
    row.best_observed = best_y;
    row.best_observed_f = best_f;
    row.t = static_cast<int>(xs.size());
  };

  const Matrix design = initialize_design(domain, config.init_size, design_rng, config.design);
  for (int i = 0; i < config.init_size; ++i) {
    IterationRow row;
    row.initial = true;
    row.alpha = row.incumbent = row.acq_value = kNaN;
    row.mean_untempered = row.var_untempered = row.mean_tempered = row.var_tempered = kNaN;
    row.var_at_incumbent = row.signal_variance = row.noise_variance = row.mean_offset = kNaN;
    observe(design.row(i).transpose(), row);
    rec.rows.push_back(std::move(row));
  }

  KernelSpec spec = initial_kernel(config);
  double noise = resolve_noise(config);
  ScheduleState sched = config.schedule_mode == ScheduleMode::Fixed
                            ? ScheduleState::fixed(config.fixed_alpha)
                            : ScheduleState::adaptive(noise, config.alpha_floor);

  std::optional<LinearModel> lin;
  if (config.surrogate == SurrogateKind::Linear) {
    lin.emplace();
    lin->phi = random_fourier_features(d, config.linear.features, config.linear.lengthscale,
                                       feature_rng);
    lin->domain = domain;
  }

  auto y_vector = [&] { return Eigen::Map<const Vector>(ys.data(), static_cast<Eigen::Index>(ys.size())); };

  for (int iter = 0; iter < config.iterations; ++iter) {
    IterationRow row;
    Chosen ch;
    try {
      if (sched.mode == ScheduleMode::Adaptive) sched.sigma2_hat = noise;
      const double alpha = current_alpha(sched);
      const Vector y = y_vector();
      const double offset = config.center ? y.mean() : 0.0;
      const Matrix X = stack_rows(xs, d);

      if (config.surrogate == SurrogateKind::GP) {
        if (config.hyperfit.due(iter)) {
          HyperFitOptions opts;
          opts.bounds = hyper_bounds(config, y.array() - offset, spec, noise);
          opts.restarts = config.hyperfit.restarts;
          KernelSpec init = spec;
          for (int k = 0; k < d; ++k) init.lengthscales[k] = clamp_to(init.lengthscales[k], opts.bounds.lengthscales[k]);
          init.signal_variance = clamp_to(init.signal_variance, opts.bounds.signal_variance);
          opts.initial = std::make_pair(init, clamp_to(noise, opts.bounds.noise_variance));
          const Vector yc = y.array() - offset;
          // Untempered marginal likelihood: fitting the noise under the tempered
          // likelihood would absorb alpha into sigma^2.
          const HyperFitResult fit = fit_hyperparams(X, yc, spec.family, 1.0, opts, hyper_rng);
          spec = fit.spec;
          noise = fit.noise_variance;
        }
        const GPState tempered = tempered_posterior(X, y, spec, noise, alpha, {}, offset);
        const GPState untempered =
            alpha == 1.0 ? tempered : tempered_posterior(X, y, spec, noise, 1.0, {}, offset);
        const MeanMax mm = posterior_mean_max(tempered, domain, config.acq_budget, mean_rng);
        const AcqMax am = maximize_acquisition(tempered, mm.value, config.acquisition, domain,
                                               config.acq_budget, acq_rng);
        ch = {am.x, mm.value, am.value, tempered.predict(mm.x).variance,
              untempered.predict(am.x), tempered.predict(am.x)};
      } else {
        std::vector<Vector> feats;
        feats.reserve(xs.size());
        for (const auto& x : xs) feats.push_back(lin->features(x));
        const Vector yc = y.array() - offset;
        const double lambda = config.linear.prior_precision;
        linear_posterior(feats, yc, lambda, noise, alpha, lin->mean_a, lin->cov_a);
        if (alpha == 1.0) {
          lin->mean_1 = lin->mean_a;
          lin->cov_1 = lin->cov_a;
        } else {
          linear_posterior(feats, yc, lambda, noise, 1.0, lin->mean_1, lin->cov_1);
        }
        auto pred = [&](const Vector& x, const Vector& mu, const Matrix& cov) {
          const Vector f = lin->features(x);
          return Prediction{offset + f.dot(mu), std::max(0.0, f.dot(cov * f)), 0.0};
        };
        const auto mean_fn = [&](const Vector& x) { return pred(x, lin->mean_a, lin->cov_a).mean; };
        const BoxMax mm = screen_and_refine(mean_fn, domain, config.acq_budget, xs, mean_rng, 0.05);
        const auto acq_fn = [&](const Vector& x) {
          const Prediction p = pred(x, lin->mean_a, lin->cov_a);
          return gei_value(p.mean, std::sqrt(p.variance), mm.value, config.acquisition);
        };
        const BoxMax am = screen_and_refine(acq_fn, domain, config.acq_budget, {}, acq_rng, 0.02);
        ch = {am.x, mm.value, am.value, pred(mm.x, lin->mean_a, lin->cov_a).variance,
              pred(am.x, lin->mean_1, lin->cov_1), pred(am.x, lin->mean_a, lin->cov_a)};
        spec.lengthscales = Vector::Constant(d, config.linear.lengthscale);
        spec.signal_variance = 1.0 / lambda;
      }

      row.n_train = static_cast<int>(xs.size());
      row.alpha = alpha;
      row.incumbent = ch.incumbent;
      row.acq_value = ch.acq_value;
      row.mean_untempered = ch.untempered.mean;
      row.var_untempered = ch.untempered.variance;
      row.mean_tempered = ch.tempered.mean;
      row.var_tempered = ch.tempered.variance;
      row.var_at_incumbent = ch.var_at_incumbent;
      row.lengthscales = spec.lengthscales;
      row.signal_variance = spec.signal_variance;
      row.noise_variance = noise;
      row.mean_offset = offset;
    } catch (const NumericalError& e) {
      rec.failed = true;
      rec.failure = "iteration " + std::to_string(iter + 1) + ": " + e.what();
      break;
    } catch (const DomainError& e) {
      rec.failed = true;
      rec.failure = "iteration " + std::to_string(iter + 1) + ": " + e.what();
      break;
    }
    observe(ch.x, row);
    sched = schedule_update(sched, ch.untempered.mean, ch.untempered.variance, row.y);
    rec.rows.push_back(std::move(row));
    ++rec.iterations_completed;
  }

  rec.recommended_observed_x = best_x;
  rec.recommended_observed_y = best_y;
  rec.recommended_mean_x = best_x;
  rec.recommended_mean_value = kNaN;
  try {
    const Vector y = y_vector();
    const double offset = config.center ? y.mean() : 0.0;
    if (sched.mode == ScheduleMode::Adaptive) sched.sigma2_hat = noise;
    const double alpha = current_alpha(sched);
    std::function<double(const Vector&)> mean_fn;
    std::optional<GPState> final_state;
    if (config.surrogate == SurrogateKind::GP) {
      final_state.emplace(tempered_posterior(stack_rows(xs, d), y, spec, noise, alpha, {}, offset));
      mean_fn = [&](const Vector& x) { return final_state->mean(x); };
    } else {
      std::vector<Vector> feats;
      for (const auto& x : xs) feats.push_back(lin->features(x));
      linear_posterior(feats, y.array() - offset, config.linear.prior_precision, noise, alpha,
                       lin->mean_a, lin->cov_a);
      mean_fn = [&](const Vector& x) { return offset + lin->features(x).dot(lin->mean_a); };
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& x : xs) {
      const double m = mean_fn(x);
      if (m > best) {
        best = m;
        rec.recommended_mean_x = x;
      }
    }
    rec.recommended_mean_value = best;
  } catch (const NumericalError&) {
    // Keep the best-observed point as the recommendation.
  }

  if (config.record_timing) {
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

std::uint64_t sweep_seed(std::uint64_t base, const std::string& objective, int dim,
                         int seed_index) {
  return derive_seed(base, objective + "/" + std::to_string(dim) + "/" + std::to_string(seed_index));
}

std::vector<SweepResult> sweep(const SweepGrid& grid) {
  if (grid.objectives.empty() || grid.gs.empty() || grid.modes.empty() || grid.seeds < 1) {
    throw UsageError("sweep: empty grid");
  }
  std::vector<BORunConfig> configs;
  std::vector<SweepResult> results;
  for (const auto& so : grid.objectives) {
    const Objective obj = builtin(so.name, so.dim, grid.noise_sd);
    for (const double g : grid.gs) {
      for (const auto& mode : grid.modes) {
        for (int s = 0; s < grid.seeds; ++s) {
          BORunConfig c = grid.base;
          c.objective = obj;
          c.acquisition.g = g;
          c.schedule_mode = mode.mode;
          c.fixed_alpha = mode.fixed_alpha;
          c.seed = sweep_seed(grid.base_seed, obj.name, obj.dim(), s);
          if (c.init_size <= 0) c.init_size = default_init_size(obj.dim());
          if (c.iterations <= 0) c.iterations = default_iterations(obj.dim());
          if (!grid.keep_hyperfit) c.hyperfit = default_hyperfit(obj.dim());
          if (c.kernel.lengthscales.size() != 0 && c.kernel.lengthscales.size() != obj.dim()) {
            c.kernel.lengthscales.resize(0);
          }
          c.validate();
          configs.push_back(std::move(c));
          SweepResult r;
          r.objective = obj.name;
          r.dim = obj.dim();
          r.g = g;
          r.mode = mode.label;
          r.seed_index = s;
          results.push_back(std::move(r));
        }
      }
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        results[i].record = run_bo(configs[i]);
      } catch (const std::exception& e) {
        RunRecord& r = results[i].record;
        r.objective = results[i].objective;
        r.dim = results[i].dim;
        r.seed = configs[i].seed;
        r.config_hash = config_hash(configs[i]);
        r.failed = true;
        r.failure = e.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(grid.threads, static_cast<int>(configs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

}  // namespace tbo
