#include "tbo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "tbo/acquisition.hpp"
#include "tbo/gp.hpp"
#include "tbo/io.hpp"

namespace tbo {

namespace {

std::string surrogate_name(SurrogateKind k) { return k == SurrogateKind::GP ? "gp" : "linear"; }

SurrogateKind parse_surrogate(const std::string& s) {
  if (s == "gp") return SurrogateKind::GP;
  if (s == "linear") return SurrogateKind::Linear;
  throw UsageError("surrogate.kind: expected \"gp\" or \"linear\", got \"" + s + "\"");
}

KernelFamily parse_family_field(const std::string& s) {
  try {
    return parse_kernel_family(s);
  } catch (const UsageError&) {
    std::string names;
    for (const auto& n : kernel_family_names()) names += (names.empty() ? "" : ", ") + n;
    throw UsageError("surrogate.kernel: unknown kernel \"" + s + "\" (known: " + names + ")");
  }
}

void check_hyperfit_mode(const std::string& s) {
  if (s != "auto" && s != "off" && s != "every_step" && s != "every") {
    throw UsageError("hyperfit.mode: expected auto, off, every_step or every, got \"" + s + "\"");
  }
}

void apply_hyperfit_mode(const std::string& mode, int dim, HyperfitConfig& h) {
  if (mode == "auto") {
    const HyperfitConfig d = default_hyperfit(dim);
    h.mode = d.mode;
    h.every = d.every;
  } else if (mode == "off") {
    h.mode = HyperfitMode::Off;
  } else if (mode == "every_step") {
    h.mode = HyperfitMode::EveryStep;
  } else {
    h.mode = HyperfitMode::Every;
  }
}

int to_int(std::int64_t v, const std::string& field) {
  if (v < -(1LL << 30) || v > (1LL << 30)) throw UsageError(field + ": out of range");
  return static_cast<int>(v);
}

// Sections shared by run and bench files: surrogate, acquisition, schedule
// (floor only for bench), run, hyperfit.
void read_common(ConfigReader& r, BORunConfig& c, std::string& hyperfit_mode, bool bench) {
  c.surrogate = parse_surrogate(r.get_string("surrogate", "kind", surrogate_name(c.surrogate)));
  c.kernel.family = parse_family_field(
      r.get_string("surrogate", "kernel", std::string(kernel_family_name(c.kernel.family))));
  const auto ls = r.get_doubles("surrogate", "lengthscales", {});
  c.kernel.lengthscales = Eigen::Map<const Vector>(ls.data(), static_cast<Eigen::Index>(ls.size()));
  c.kernel.signal_variance = r.get_double("surrogate", "signal_variance", c.kernel.signal_variance);
  c.noise_variance = r.get_double("surrogate", "noise_variance", c.noise_variance);
  c.center = r.get_bool("surrogate", "center", c.center);
  c.linear.features = to_int(r.get_int("surrogate", "linear_features", c.linear.features),
                             "surrogate.linear_features");
  c.linear.lengthscale = r.get_double("surrogate", "linear_lengthscale", c.linear.lengthscale);
  c.linear.prior_precision =
      r.get_double("surrogate", "linear_prior_precision", c.linear.prior_precision);

  if (!bench) c.acquisition.g = r.get_double("acquisition", "g", c.acquisition.g);
  c.acquisition.nu = r.get_double("acquisition", "nu", c.acquisition.nu);
  c.acquisition.xi = r.get_double("acquisition", "xi", c.acquisition.xi);
  c.acquisition.quadrature_nodes =
      to_int(r.get_int("acquisition", "quadrature_nodes", c.acquisition.quadrature_nodes),
             "acquisition.quadrature_nodes");
  c.acq_budget = to_int(r.get_int("acquisition", "budget", c.acq_budget), "acquisition.budget");

  if (!bench) {
    const std::string mode = r.get_string(
        "schedule", "mode", c.schedule_mode == ScheduleMode::Adaptive ? "adaptive" : "fixed");
    if (mode == "adaptive") {
      c.schedule_mode = ScheduleMode::Adaptive;
    } else if (mode == "fixed") {
      c.schedule_mode = ScheduleMode::Fixed;
    } else {
      throw UsageError("schedule.mode: expected \"adaptive\" or \"fixed\", got \"" + mode + "\"");
    }
    c.fixed_alpha = r.get_double("schedule", "alpha", c.fixed_alpha);
  }
  c.alpha_floor = r.get_double("schedule", "floor", c.alpha_floor);

  c.iterations = to_int(r.get_int("run", "iterations", c.iterations), "run.iterations");
  c.init_size = to_int(r.get_int("run", "init_size", c.init_size), "run.init_size");
  const std::string design = r.get_string("run", "design", c.design == DesignKind::Uniform ? "uniform" : "lhs");
  if (design != "lhs" && design != "uniform") {
    throw UsageError("run.design: expected \"lhs\" or \"uniform\", got \"" + design + "\"");
  }
  c.design = design == "uniform" ? DesignKind::Uniform : DesignKind::LatinHypercube;
  if (!bench) c.seed = static_cast<std::uint64_t>(r.get_int("run", "seed", static_cast<std::int64_t>(c.seed)));
  c.record_timing = r.get_bool("run", "record_timing", c.record_timing);

  hyperfit_mode = r.get_string("hyperfit", "mode", hyperfit_mode);
  check_hyperfit_mode(hyperfit_mode);
  c.hyperfit.every = to_int(r.get_int("hyperfit", "every", c.hyperfit.every), "hyperfit.every");
  c.hyperfit.restarts =
      to_int(r.get_int("hyperfit", "restarts", c.hyperfit.restarts), "hyperfit.restarts");
  c.hyperfit.fit_signal_variance =
      r.get_bool("hyperfit", "fit_signal_variance", c.hyperfit.fit_signal_variance);
  c.hyperfit.fit_noise = r.get_bool("hyperfit", "fit_noise", c.hyperfit.fit_noise);
}

ConfigValue doubles(const Vector& v) {
  std::vector<ConfigValue> items;
  for (const double x : v) items.push_back(ConfigValue::real(x));
  return ConfigValue::array(std::move(items));
}

void write_common(ConfigDoc& doc, const BORunConfig& c, const std::string& hyperfit_mode,
                  bool bench) {
  doc.set("surrogate", "kind", ConfigValue::string(surrogate_name(c.surrogate)));
  doc.set("surrogate", "kernel", ConfigValue::string(std::string(kernel_family_name(c.kernel.family))));
  doc.set("surrogate", "lengthscales", doubles(c.kernel.lengthscales));
  doc.set("surrogate", "signal_variance", ConfigValue::real(c.kernel.signal_variance));
  doc.set("surrogate", "noise_variance", ConfigValue::real(c.noise_variance));
  doc.set("surrogate", "center", ConfigValue::boolean(c.center));
  doc.set("surrogate", "linear_features", ConfigValue::integer(c.linear.features));
  doc.set("surrogate", "linear_lengthscale", ConfigValue::real(c.linear.lengthscale));
  doc.set("surrogate", "linear_prior_precision", ConfigValue::real(c.linear.prior_precision));
  if (!bench) doc.set("acquisition", "g", ConfigValue::real(c.acquisition.g));
  doc.set("acquisition", "nu", ConfigValue::real(c.acquisition.nu));
  doc.set("acquisition", "xi", ConfigValue::real(c.acquisition.xi));
  doc.set("acquisition", "quadrature_nodes", ConfigValue::integer(c.acquisition.quadrature_nodes));
  doc.set("acquisition", "budget", ConfigValue::integer(c.acq_budget));
  if (!bench) {
    doc.set("schedule", "mode", ConfigValue::string(c.schedule_mode == ScheduleMode::Adaptive ? "adaptive" : "fixed"));
    doc.set("schedule", "alpha", ConfigValue::real(c.fixed_alpha));
  }
  doc.set("schedule", "floor", ConfigValue::real(c.alpha_floor));
  doc.set("run", "iterations", ConfigValue::integer(c.iterations));
  doc.set("run", "init_size", ConfigValue::integer(c.init_size));
  doc.set("run", "design", ConfigValue::string(c.design == DesignKind::Uniform ? "uniform" : "lhs"));
  if (!bench) doc.set("run", "seed", ConfigValue::integer(static_cast<std::int64_t>(c.seed)));
  doc.set("run", "record_timing", ConfigValue::boolean(c.record_timing));
  doc.set("hyperfit", "mode", ConfigValue::string(hyperfit_mode));
  doc.set("hyperfit", "every", ConfigValue::integer(c.hyperfit.every));
  doc.set("hyperfit", "restarts", ConfigValue::integer(c.hyperfit.restarts));
  doc.set("hyperfit", "fit_signal_variance", ConfigValue::boolean(c.hyperfit.fit_signal_variance));
  doc.set("hyperfit", "fit_noise", ConfigValue::boolean(c.hyperfit.fit_noise));
}

std::string format_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// File defaults: iterations and init_size 0 select the dimension-based values;
// timing is off so reruns are byte-identical.
BORunConfig file_defaults() {
  BORunConfig c;
  c.iterations = 0;
  c.init_size = 0;
  c.record_timing = false;
  return c;
}

}  // namespace

Objective make_objective(const ObjectiveSpec& spec, KernelFamily family) {
  if (spec.name.empty()) throw UsageError("objective.name: required");
  if (!(spec.noise_sd >= 0.0)) throw UsageError("objective.noise_sd: must be >= 0");
  if (spec.name != "tabular") {
    if (!spec.table.empty()) throw UsageError("objective.table: only valid with name = \"tabular\"");
    return builtin(spec.name, spec.dim, spec.noise_sd);
  }
  if (spec.table.empty()) throw UsageError("objective.table: required for tabular objectives");
  Table table = read_table_file(spec.table);
  if (spec.drop_last) table = drop_last_coordinate(table);
  if (spec.dim != 0 && spec.dim != table.points.cols()) {
    throw UsageError("objective.dim: table has " + std::to_string(table.points.cols()) + " coordinates");
  }
  const Box box(table.points.colwise().minCoeff().transpose(),
                table.points.colwise().maxCoeff().transpose());
  const int d = box.dim();
  const Vector w = box.width().cwiseMax(1e-12);
  const double vy = std::max((table.values.array() - table.values.mean()).square().mean(), 1e-12);

  HyperFitOptions opts;
  for (int k = 0; k < d; ++k) opts.bounds.lengthscales.push_back({0.01 * w[k], 10.0 * w[k]});
  opts.bounds.signal_variance = {1e-2 * vy, 1e2 * vy};
  opts.bounds.noise_variance = {std::max(1e-10, 1e-8 * vy), std::max(vy, 1e-6)};
  KernelSpec init{family, (0.2 * w).eval(), vy};
  opts.initial = std::make_pair(init, std::clamp(spec.table_noise_variance * vy,
                                                 opts.bounds.noise_variance.lo,
                                                 opts.bounds.noise_variance.hi));
  Rng rng(derive_seed(fnv1a(spec.table), "tabular-fit"));
  const Vector yc = table.values.array() - table.values.mean();
  const HyperFitResult fit = fit_hyperparams(table.points, yc, family, 1.0, opts, rng);

  // Zero prior mean on the raw values, as the ground truth is the posterior mean.
  TabularOptions topts;
  topts.domain = box;
  topts.seed = derive_seed(fnv1a(spec.table), "tabular-max");
  Objective obj = tabular_objective(table, fit.spec, fit.noise_variance, topts);
  obj.noise_sd = spec.noise_sd;
  return obj;
}

RunFile default_run_file() {
  RunFile f;
  f.run = file_defaults();
  return f;
}

RunFile run_file_from_doc(const ConfigDoc& doc) {
  RunFile f = default_run_file();
  ConfigReader r(doc);
  if (!r.has("objective", "name")) throw UsageError("objective.name: required");
  f.objective.name = r.get_string("objective", "name", "");
  f.objective.dim = to_int(r.get_int("objective", "dim", 0), "objective.dim");
  f.objective.noise_sd = r.get_double("objective", "noise_sd", f.objective.noise_sd);
  f.objective.table = r.get_string("objective", "table", "");
  f.objective.drop_last = r.get_bool("objective", "drop_last", false);
  f.objective.table_noise_variance =
      r.get_double("objective", "table_noise_variance", f.objective.table_noise_variance);
  read_common(r, f.run, f.hyperfit_mode, false);
  f.out_dir = r.get_string("output", "dir", "");
  r.reject_unknown();
  return f;
}

ConfigDoc run_file_to_doc(const RunFile& f) {
  ConfigDoc doc;
  doc.set("objective", "name", ConfigValue::string(f.objective.name));
  doc.set("objective", "dim", ConfigValue::integer(f.objective.dim));
  doc.set("objective", "noise_sd", ConfigValue::real(f.objective.noise_sd));
  doc.set("objective", "table", ConfigValue::string(f.objective.table));
  doc.set("objective", "drop_last", ConfigValue::boolean(f.objective.drop_last));
  doc.set("objective", "table_noise_variance", ConfigValue::real(f.objective.table_noise_variance));
  write_common(doc, f.run, f.hyperfit_mode, false);
  doc.set("output", "dir", ConfigValue::string(f.out_dir));
  return doc;
}

BORunConfig resolve_run(const RunFile& file) {
  BORunConfig c = file.run;
  c.objective = make_objective(file.objective, c.kernel.family);
  const int d = c.objective.dim();
  if (c.init_size <= 0) c.init_size = default_init_size(d);
  if (c.iterations <= 0) c.iterations = default_iterations(d);
  apply_hyperfit_mode(file.hyperfit_mode, d, c.hyperfit);
  c.validate();
  return c;
}

SweepMode parse_sweep_mode(const std::string& label) {
  if (label == "adaptive") return {"adaptive", ScheduleMode::Adaptive, 1.0};
  if (label.rfind("fixed-", 0) == 0) {
    const std::string rest = label.substr(6);
    char* end = nullptr;
    const double a = std::strtod(rest.c_str(), &end);
    if (!rest.empty() && end && *end == '\0' && a > 0.0 && a <= 1.0) {
      return {"fixed-" + format_short(a), ScheduleMode::Fixed, a};
    }
  }
  throw UsageError("bench.modes: expected \"adaptive\" or \"fixed-<alpha>\" with alpha in (0, 1], got \"" +
                   label + "\"");
}

SweepObjective parse_sweep_objective(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return {text, 0};
  const std::string dim = text.substr(colon + 1);
  char* end = nullptr;
  const long v = std::strtol(dim.c_str(), &end, 10);
  if (dim.empty() || *end != '\0' || v < 1 || v > 1000) {
    throw UsageError("bench.objectives: bad dimension in \"" + text + "\"");
  }
  return {text.substr(0, colon), static_cast<int>(v)};
}

BenchFile bench_file_from_doc(const ConfigDoc& doc) {
  BenchFile f;
  f.grid.base = file_defaults();
  ConfigReader r(doc);
  if (!r.has("bench", "objectives")) throw UsageError("bench.objectives: required");
  for (const auto& s : r.get_strings("bench", "objectives", {})) {
    f.grid.objectives.push_back(parse_sweep_objective(s));
  }
  f.grid.gs = r.get_doubles("bench", "g", {0.0, 2.0});
  for (const auto& s : r.get_strings("bench", "modes", {"adaptive", "fixed-1"})) {
    f.grid.modes.push_back(parse_sweep_mode(s));
  }
  f.grid.seeds = to_int(r.get_int("bench", "seeds", f.grid.seeds), "bench.seeds");
  f.grid.base_seed = static_cast<std::uint64_t>(r.get_int("bench", "base_seed", 0));
  f.grid.noise_sd = r.get_double("bench", "noise_sd", f.grid.noise_sd);
  f.grid.threads = to_int(r.get_int("bench", "threads", f.grid.threads), "bench.threads");
  read_common(r, f.grid.base, f.hyperfit_mode, true);
  f.out_dir = r.get_string("output", "dir", "");
  r.reject_unknown();
  if (f.grid.objectives.empty()) throw UsageError("bench.objectives: empty");
  if (f.grid.gs.empty()) throw UsageError("bench.g: empty");
  if (f.grid.modes.empty()) throw UsageError("bench.modes: empty");
  if (f.grid.seeds < 1) throw UsageError("bench.seeds: must be >= 1");
  if (f.grid.threads < 1) throw UsageError("bench.threads: must be >= 1");
  for (const auto& o : f.grid.objectives) builtin(o.name, o.dim, f.grid.noise_sd);
  f.grid.keep_hyperfit = f.hyperfit_mode != "auto";
  // The dimension-dependent cadence is chosen per cell by sweep when auto.
  if (f.grid.keep_hyperfit) apply_hyperfit_mode(f.hyperfit_mode, 1, f.grid.base.hyperfit);
  return f;
}

ConfigDoc bench_file_to_doc(const BenchFile& f) {
  ConfigDoc doc;
  std::vector<ConfigValue> objs;
  for (const auto& o : f.grid.objectives) {
    objs.push_back(ConfigValue::string(o.dim ? o.name + ":" + std::to_string(o.dim) : o.name));
  }
  doc.set("bench", "objectives", ConfigValue::array(std::move(objs)));
  std::vector<ConfigValue> gs;
  for (const double g : f.grid.gs) gs.push_back(ConfigValue::real(g));
  doc.set("bench", "g", ConfigValue::array(std::move(gs)));
  std::vector<ConfigValue> modes;
  for (const auto& m : f.grid.modes) modes.push_back(ConfigValue::string(m.label));
  doc.set("bench", "modes", ConfigValue::array(std::move(modes)));
  doc.set("bench", "seeds", ConfigValue::integer(f.grid.seeds));
  doc.set("bench", "base_seed", ConfigValue::integer(static_cast<std::int64_t>(f.grid.base_seed)));
  doc.set("bench", "noise_sd", ConfigValue::real(f.grid.noise_sd));
  doc.set("bench", "threads", ConfigValue::integer(f.grid.threads));
  write_common(doc, f.grid.base, f.hyperfit_mode, true);
  doc.set("output", "dir", ConfigValue::string(f.out_dir));
  return doc;
}

BORunConfig toy_config(const ToyOptions& o, double alpha, int seed) {
  BORunConfig c;
  c.objective = builtin("toy", 1, o.noise_sd);
  c.kernel.family = KernelFamily::Matern52;
  c.acquisition.g = o.g;
  c.acquisition.xi = o.xi;
  c.schedule_mode = ScheduleMode::Fixed;
  c.fixed_alpha = alpha;
  c.iterations = o.iterations;
  c.init_size = o.init_size;
  c.design = DesignKind::Uniform;
  c.acq_budget = o.acq_budget;
  c.hyperfit.mode = HyperfitMode::EveryStep;
  c.hyperfit.fit_noise = true;
  c.noise_variance = o.noise_sd * o.noise_sd;
  c.record_timing = false;
  // alpha is not part of the seed: every alpha sees the same design and noise.
  c.seed = derive_seed(o.base_seed, "toy/" + std::to_string(seed));
  return c;
}

ToyResult run_toy(const ToyOptions& o) {
  if (o.alphas.empty()) throw UsageError("toy: alphas must not be empty");
  if (o.seeds < 1) throw UsageError("toy: seeds must be >= 1");
  if (o.grid_points < 2) throw UsageError("toy: grid_points must be >= 2");
  ToyResult res;
  res.options = o;
  for (const double a : o.alphas) {
    for (int s = 0; s < o.seeds; ++s) res.runs.push_back(run_bo(toy_config(o, a, s)));
  }
  return res;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void write_toy_traces(std::ostream& os, const ToyResult& r) {
  os << "alpha,seed,iteration,best_observed,best_observed_f\n";
  const auto& o = r.options;
  for (int a = 0; a < static_cast<int>(o.alphas.size()); ++a) {
    for (int s = 0; s < o.seeds; ++s) {
      const RunRecord& rec = r.run(a, s);
      for (int k = 0; k <= rec.iterations_completed; ++k) {
        const IterationRow& row = rec.rows[static_cast<std::size_t>(rec.init_size + k - 1)];
        os << format_float(o.alphas[a]) << ',' << s << ',' << k << ',' << format_float(row.best_observed)
           << ',' << format_float(row.best_observed_f) << '\n';
      }
    }
  }
}

void write_toy_medians(std::ostream& os, const ToyResult& r) {
  os << "alpha,iteration,median_best_observed\n";
  const auto& o = r.options;
  for (int a = 0; a < static_cast<int>(o.alphas.size()); ++a) {
    for (int k = 0; k <= o.iterations; ++k) {
      std::vector<double> v;
      for (int s = 0; s < o.seeds; ++s) {
        const double b = best_observed_after(r.run(a, s), k);
        if (!std::isnan(b)) v.push_back(b);
      }
      os << format_float(o.alphas[a]) << ',' << k << ',' << format_float(median(v)) << '\n';
    }
  }
}

void write_toy_curves(std::ostream& os, const ToyResult& r) {
  os << "alpha,x,f_true,mean,sd,acquisition\n";
  const auto& o = r.options;
  for (int a = 0; a < static_cast<int>(o.alphas.size()); ++a) {
    const RunRecord& rec = r.run(a, 0);
    const BORunConfig c = toy_config(o, o.alphas[a], 0);
    // Last fitted hyperparameters, conditioned on every observation.
    KernelSpec spec{KernelFamily::Matern52, Vector::Constant(1, 0.2), 1.0};
    double noise = c.noise_variance;
    const IterationRow& last = rec.rows.back();
    if (!last.initial) {
      spec.lengthscales = last.lengthscales;
      spec.signal_variance = last.signal_variance;
      noise = last.noise_variance;
    }
    Matrix X(static_cast<Eigen::Index>(rec.rows.size()), 1);
    Vector y(X.rows());
    for (std::size_t i = 0; i < rec.rows.size(); ++i) {
      X(static_cast<Eigen::Index>(i), 0) = rec.rows[i].x[0];
      y[static_cast<Eigen::Index>(i)] = rec.rows[i].y;
    }
    const GPState st = tempered_posterior(X, y, spec, noise, o.alphas[a], {}, y.mean());
    std::vector<Prediction> preds;
    double incumbent = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < o.grid_points; ++i) {
      const Vector x = Vector::Constant(1, static_cast<double>(i) / (o.grid_points - 1));
      preds.push_back(st.predict(x));
      incumbent = std::max(incumbent, preds.back().mean);
    }
    for (int i = 0; i < o.grid_points; ++i) {
      const double x = static_cast<double>(i) / (o.grid_points - 1);
      const Prediction& p = preds[static_cast<std::size_t>(i)];
      const double sd = std::sqrt(p.variance);
      os << format_float(o.alphas[a]) << ',' << format_float(x) << ','
         << format_float(toy_function(x)) << ',' << format_float(p.mean) << ',' << format_float(sd)
         << ',' << format_float(gei_value(p.mean, sd, incumbent, c.acquisition)) << '\n';
    }
  }
}

double schedule_limit(const ScheduleSimOptions& o) {
  if (!o.constant_bias) return 1.0;
  return std::min(std::sqrt((o.pv + o.sigma2) / (o.pv + o.sigma2 + o.bias * o.bias)), 1.0);
}

ScheduleSimResult simulate_schedule(const ScheduleSimOptions& o) {
  if (o.t_max < 1 || o.seeds < 1) throw UsageError("schedule-sim: t_max and seeds must be >= 1");
  if (!(o.sigma2 > 0.0) || !(o.pv >= 0.0)) throw UsageError("schedule-sim: need sigma2 > 0 and pv >= 0");
  ScheduleSimResult res;
  res.alpha.resize(o.seeds, o.t_max);
  res.limit = schedule_limit(o);
  for (int s = 0; s < o.seeds; ++s) {
    Rng rng(derive_seed(o.base_seed, "schedule-sim/" + std::to_string(s)));
    std::normal_distribution<double> eps(0.0, std::sqrt(o.sigma2));
    ScheduleState st = ScheduleState::adaptive(o.sigma2, o.alpha_floor);
    for (int t = 1; t <= o.t_max; ++t) {
      const double e = o.constant_bias ? o.bias : o.bias / std::sqrt(static_cast<double>(t));
      st = schedule_update(st, 0.0, o.pv, -e + eps(rng));
      res.alpha(s, t - 1) = current_alpha(st);
    }
  }
  return res;
}

}  // namespace tbo
