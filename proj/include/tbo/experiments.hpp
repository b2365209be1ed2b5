#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tbo/bo_loop.hpp"
#include "tbo/config.hpp"
#include "tbo/objectives.hpp"

namespace tbo {

inline constexpr const char* kVersion = "0.1.0";

struct ObjectiveSpec {
  std::string name;  // registry name, or "tabular"
  int dim = 0;       // 0 selects the registry default
  double noise_sd = 0.01;
  std::string table;  // tabular only
  bool drop_last = false;
  double table_noise_variance = 1e-4;
};

// Builds a registry objective, or for "tabular" fits the kernel family to the
// table by marginal likelihood (fixed seed) and wraps the posterior mean.
Objective make_objective(const ObjectiveSpec& spec, KernelFamily family);

// A run configuration file. Integer fields set to 0 in [run] and
// hyperfit.mode = "auto" select the dimension-based defaults.
struct RunFile {
  ObjectiveSpec objective;
  BORunConfig run;  // objective unset until resolve_run
  std::string hyperfit_mode = "auto";
  std::string out_dir;
};

RunFile default_run_file();
RunFile run_file_from_doc(const ConfigDoc& doc);
ConfigDoc run_file_to_doc(const RunFile& file);
BORunConfig resolve_run(const RunFile& file);

struct BenchFile {
  SweepGrid grid;
  std::string hyperfit_mode = "auto";
  std::string out_dir;
};

BenchFile bench_file_from_doc(const ConfigDoc& doc);
ConfigDoc bench_file_to_doc(const BenchFile& file);

// "adaptive" or "fixed-<alpha>" (for example "fixed-1", "fixed-0.5").
SweepMode parse_sweep_mode(const std::string& label);
// "name" or "name:dim".
SweepObjective parse_sweep_objective(const std::string& text);

struct ToyOptions {
  std::vector<double> alphas{0.1, 0.5, 1.0};
  double g = 0.0;
  double xi = 0.01;
  double noise_sd = 0.05;
  int iterations = 15;
  int init_size = 5;
  int seeds = 20;
  std::uint64_t base_seed = 0;
  int acq_budget = 256;
  int grid_points = 201;
};

struct ToyResult {
  ToyOptions options;
  // runs[a * seeds + s] for alpha index a and seed s.
  std::vector<RunRecord> runs;
  [[nodiscard]] const RunRecord& run(int alpha_index, int seed) const {
    return runs[static_cast<std::size_t>(alpha_index * options.seeds + seed)];
  }
};

// Fixed-alpha g-EI (PI by default) on the 1-D toy with noise-fitted Matern-5/2
// hyperparameters. All alphas of one seed share the initial design and the
// noise stream.
BORunConfig toy_config(const ToyOptions& options, double alpha, int seed);
ToyResult run_toy(const ToyOptions& options);

// alpha, seed, iteration, best_observed, best_observed_f
void write_toy_traces(std::ostream& os, const ToyResult& result);
// alpha, iteration, median_best_observed over seeds.
void write_toy_medians(std::ostream& os, const ToyResult& result);
// alpha, x, f_true, mean, sd, acquisition on a grid for seed 0 after the last step.
void write_toy_curves(std::ostream& os, const ToyResult& result);

double median(std::vector<double> v);

struct ScheduleSimOptions {
  bool constant_bias = false;
  // Constant mode: e_s = bias. Vanishing mode: e_s = bias / sqrt(s).
  double bias = 1.7320508075688772;
  double sigma2 = 1.0;
  double pv = 0.0;  // untempered predictive variance fed at every step
  int t_max = 1000;
  int seeds = 20;
  std::uint64_t base_seed = 0;
  double alpha_floor = 0.05;
};

struct ScheduleSimResult {
  Matrix alpha;  // seeds x t_max, alpha_hat after each observation
  double limit = 1.0;
};

// Feeds the schedule directly with residuals y_s - mu_s = -e_s + eps_s,
// eps_s ~ N(0, sigma2), bypassing BO.
ScheduleSimResult simulate_schedule(const ScheduleSimOptions& options);

// 1 for vanishing bias; min{sqrt((pv + s2) / (pv + s2 + b^2)), 1} otherwise.
double schedule_limit(const ScheduleSimOptions& options);

}  // namespace tbo
