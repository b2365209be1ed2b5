#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "tbo/experiments.hpp"
#include "tbo/io.hpp"

namespace tbo::cli {

namespace fs = std::filesystem;

namespace {

std::string output_root() {
  const char* env = std::getenv(kOutputRootEnv);
  return env && *env ? env : "tbo-out";
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw UsageError("output.dir: cannot create \"" + dir + "\"");
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("output.dir: cannot write \"" + path.string() + "\"");
  return os;
}

ConfigDoc load_doc(const std::string& path, const std::vector<std::string>& overrides) {
  ConfigDoc doc = parse_config_file(path);
  for (const auto& o : overrides) apply_override(doc, o);
  return doc;
}

std::string hyperfit_mode_name(const HyperfitConfig& h) {
  switch (h.mode) {
    case HyperfitMode::Off: return "off";
    case HyperfitMode::EveryStep: return "every_step";
    case HyperfitMode::Every: return "every";
  }
  return "auto";
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct RunArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  std::int64_t seed = -1;
  bool timing = false;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  RunFile file = run_file_from_doc(load_doc(a.config, a.overrides));
  if (a.seed >= 0) file.run.seed = static_cast<std::uint64_t>(a.seed);
  if (a.timing) file.run.record_timing = true;
  const BORunConfig cfg = resolve_run(file);

  RunFile effective = file;
  effective.run.iterations = cfg.iterations;
  effective.run.init_size = cfg.init_size;
  effective.run.hyperfit = cfg.hyperfit;
  effective.hyperfit_mode = hyperfit_mode_name(cfg.hyperfit);
  std::string dir = !a.out.empty() ? a.out : file.out_dir;
  if (dir.empty()) {
    dir = (fs::path(output_root()) /
           (cfg.objective.name + "-" + config_hash(cfg) + "-" + std::to_string(cfg.seed)))
              .string();
  }
  effective.out_dir = dir;
  const ConfigDoc eff_doc = run_file_to_doc(effective);

  const RunRecord rec = run_bo(cfg);
  const fs::path d = prepare_dir(dir);
  {
    auto os = open_out(d / "trace.csv");
    write_trace_csv(os, rec);
  }
  {
    auto os = open_out(d / "summary.json");
    os << summary_json(rec, cfg.objective, eff_doc);
  }
  {
    auto os = open_out(d / "config.toml");
    os << serialize_config(eff_doc);
  }
  out << "objective " << rec.objective << " (d=" << rec.dim << "), " << rec.evaluations
      << " evaluations, best observed " << format_float(rec.recommended_observed_y) << '\n';
  out << "wrote " << (d / "trace.csv").string() << '\n';
  if (rec.failed) {
    err << "error: run failed at " << rec.failure << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

struct BenchArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  std::int64_t seed = -1;
  int threads = 0;
  bool timing = false;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  BenchFile file = bench_file_from_doc(load_doc(a.config, a.overrides));
  if (a.seed >= 0) file.grid.base_seed = static_cast<std::uint64_t>(a.seed);
  if (a.threads > 0) file.grid.threads = a.threads;
  if (a.timing) file.grid.base.record_timing = true;
  std::string dir = !a.out.empty() ? a.out : file.out_dir;
  if (dir.empty()) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(serialize_config(bench_file_to_doc(file)))));
    dir = (fs::path(output_root()) / (std::string("bench-") + buf)).string();
  }
  file.out_dir = dir;

  const auto results = sweep(file.grid);
  const fs::path d = prepare_dir(dir);
  const fs::path runs = prepare_dir((d / "runs").string());
  std::vector<Objective> objectives;
  for (const auto& o : file.grid.objectives) objectives.push_back(builtin(o.name, o.dim, file.grid.noise_sd));

  int failed = 0;
  for (const auto& r : results) {
    const std::string name = r.objective + "-d" + std::to_string(r.dim) + "-g" + fmt_short(r.g) +
                             "-" + r.mode + "-s" + std::to_string(r.seed_index) + ".csv";
    auto os = open_out(runs / name);
    write_trace_csv(os, r.record);
    if (r.record.failed) {
      ++failed;
      err << "run failed: " << name << ": " << r.record.failure << '\n';
    }
  }
  const auto rows = aggregate(results, objectives);
  {
    auto os = open_out(d / "aggregate.csv");
    write_aggregate_csv(os, rows);
  }
  {
    auto os = open_out(d / "config.toml");
    os << serialize_config(bench_file_to_doc(file));
  }
  std::vector<std::string> labels;
  for (const auto& m : file.grid.modes) labels.push_back(m.label);
  std::string mode_a, mode_b;
  if (std::count(labels.begin(), labels.end(), "adaptive") &&
      std::count(labels.begin(), labels.end(), "fixed-1")) {
    mode_a = "adaptive";
    mode_b = "fixed-1";
  } else if (labels.size() >= 2) {
    mode_a = labels[0];
    mode_b = labels[1];
  }
  if (!mode_a.empty()) {
    const auto wins = paired_wins(rows, mode_a, mode_b);
    auto os = open_out(d / "wins.csv");
    write_wins_csv(os, wins, mode_a, mode_b);
    for (const auto& w : wins) {
      if (w.function != "ALL") continue;
      out << "g=" << fmt_short(w.g) << " seed pairs: " << mode_a << " " << w.a_wins << ", " << mode_b
          << " " << w.b_wins << ", ties " << w.ties << ", sign-test p=" << fmt_short(w.p_value) << '\n';
    }
    const auto fwins = function_wins(rows, mode_a, mode_b);
    auto fos = open_out(d / "function_wins.csv");
    write_function_wins_csv(fos, fwins, mode_a, mode_b);
    for (const auto& w : fwins) {
      out << "g=" << fmt_short(w.g) << " functions (seed-averaged): " << mode_a << " " << w.a_wins
          << ", " << mode_b << " " << w.b_wins << ", ties " << w.ties << '\n';
    }
  }
  const int total = static_cast<int>(results.size());
  out << total - failed << "/" << total << " runs succeeded; wrote " << (d / "aggregate.csv").string()
      << '\n';
  return 10 * (total - failed) >= 9 * total ? kExitOk : kExitNumerical;
}

struct ToyArgs {
  std::string out;
  ToyOptions options;
};

int cmd_toy(const ToyArgs& a, std::ostream& out) {
  const ToyResult res = run_toy(a.options);
  const fs::path d = prepare_dir(!a.out.empty() ? a.out : (fs::path(output_root()) / "toy").string());
  {
    auto os = open_out(d / "toy_traces.csv");
    write_toy_traces(os, res);
  }
  {
    auto os = open_out(d / "toy_medians.csv");
    write_toy_medians(os, res);
  }
  {
    auto os = open_out(d / "toy_curves.csv");
    write_toy_curves(os, res);
  }
  const int k = std::min(10, a.options.iterations);
  int failed = 0;
  for (const auto& r : res.runs) failed += r.failed;
  for (int i = 0; i < static_cast<int>(a.options.alphas.size()); ++i) {
    std::vector<double> v;
    for (int s = 0; s < a.options.seeds; ++s) v.push_back(best_observed_after(res.run(i, s), k));
    out << "alpha=" << fmt_short(a.options.alphas[i]) << ": median best observed at iteration " << k
        << " = " << format_float(median(v)) << '\n';
  }
  out << "wrote " << d.string() << '\n';
  return failed ? kExitNumerical : kExitOk;
}

struct ScheduleArgs {
  std::string out;
  std::string bias_mode = "vanishing";
  ScheduleSimOptions options;
};

int cmd_schedule_sim(ScheduleArgs a, std::ostream& out) {
  if (a.bias_mode != "vanishing" && a.bias_mode != "constant") {
    throw UsageError("--bias-mode: expected vanishing or constant");
  }
  a.options.constant_bias = a.bias_mode == "constant";
  const ScheduleSimResult res = simulate_schedule(a.options);
  const fs::path d =
      prepare_dir(!a.out.empty() ? a.out : (fs::path(output_root()) / "schedule-sim").string());
  {
    auto os = open_out(d / "schedule_alpha.csv");
    os << "seed,t,alpha\n";
    for (int s = 0; s < res.alpha.rows(); ++s) {
      for (int t = 0; t < res.alpha.cols(); ++t) {
        os << s << ',' << t + 1 << ',' << format_float(res.alpha(s, t)) << '\n';
      }
    }
  }
  const Vector last = res.alpha.col(res.alpha.cols() - 1);
  out << "limit: " << fmt_short(res.limit) << '\n';
  out << "median alpha at t=" << a.options.t_max << ": "
      << format_float(median(std::vector<double>(last.begin(), last.end()))) << '\n';
  out << "wrote " << (d / "schedule_alpha.csv").string() << '\n';
  return kExitOk;
}

int cmd_info(const std::string& what, std::ostream& out) {
  if (what == "objectives") {
    for (const auto& e : builtin_registry()) {
      out << e.name << '\t' << (e.native_dim ? std::to_string(e.native_dim) : "any") << '\t' << e.note
          << '\n';
    }
  } else if (what == "kernels") {
    for (const auto& k : kernel_family_names()) out << k << '\n';
  } else {
    out << kVersion << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tempered Bayesian optimization experiments", "tbo"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run_cmd = app.add_subcommand("run", "Single BO run from a config file");
  run_cmd->add_option("config", ra.config, "Run config (TOML subset)")->required();
  run_cmd->add_option("--set", ra.overrides, "Override section.key=value")->take_all();
  run_cmd->add_option("--out", ra.out, "Output directory");
  run_cmd->add_option("--seed", ra.seed, "Override run.seed")->check(CLI::NonNegativeNumber);
  run_cmd->add_flag("--timing", ra.timing, "Record wall time");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "Benchmark sweep from a grid config");
  bench_cmd->add_option("config", ba.config, "Bench config (TOML subset)")->required();
  bench_cmd->add_option("--set", ba.overrides, "Override section.key=value")->take_all();
  bench_cmd->add_option("--out", ba.out, "Output directory");
  bench_cmd->add_option("--seed", ba.seed, "Override bench.base_seed")->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--threads", ba.threads, "Worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--timing", ba.timing, "Record wall time");

  ToyArgs ta;
  auto* toy_cmd = app.add_subcommand("toy", "1-D toy reproduction: PI under fixed tempering levels");
  toy_cmd->add_option("--out", ta.out, "Output directory");
  toy_cmd->add_option("--seeds", ta.options.seeds, "Replications")->check(CLI::PositiveNumber);
  toy_cmd->add_option("--alphas", ta.options.alphas, "Comma-separated tempering levels")
      ->delimiter(',')
      ->check(CLI::Range(1e-12, 1.0));
  toy_cmd->add_option("--g", ta.options.g, "g-EI order (0 = PI)")->check(CLI::NonNegativeNumber);
  toy_cmd->add_option("--xi", ta.options.xi, "Improvement jitter");
  toy_cmd->add_option("--iterations", ta.options.iterations, "BO iterations")->check(CLI::NonNegativeNumber);
  toy_cmd->add_option("--base-seed", ta.options.base_seed, "Base seed");

  ScheduleArgs sa;
  auto* sched_cmd = app.add_subcommand("schedule-sim", "Adaptive schedule under controlled bias");
  sched_cmd->add_option("--out", sa.out, "Output directory");
  sched_cmd->add_option("--bias-mode", sa.bias_mode, "vanishing or constant");
  sched_cmd->add_option("--bias", sa.options.bias, "Bias magnitude b");
  sched_cmd->add_option("--sigma2", sa.options.sigma2, "Noise variance");
  sched_cmd->add_option("--pv", sa.options.pv, "Predictive variance fed to the schedule");
  sched_cmd->add_option("--t-max", sa.options.t_max, "Steps")->check(CLI::PositiveNumber);
  sched_cmd->add_option("--seeds", sa.options.seeds, "Replications")->check(CLI::PositiveNumber);
  sched_cmd->add_option("--base-seed", sa.options.base_seed, "Base seed");

  std::string what;
  auto* info_cmd = app.add_subcommand("info", "Print registries or version");
  info_cmd->add_option("what", what, "objectives, kernels or version")
      ->required()
      ->check(CLI::IsMember({"objectives", "kernels", "version"}));

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(ra, out, err);
    if (*bench_cmd) return cmd_bench(ba, out, err);
    if (*toy_cmd) return cmd_toy(ta, out);
    if (*sched_cmd) return cmd_schedule_sim(sa, out);
    return cmd_info(what, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DomainError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace tbo::cli
