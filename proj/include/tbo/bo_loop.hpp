#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tbo/acquisition.hpp"
#include "tbo/common.hpp"
#include "tbo/gp.hpp"
#include "tbo/kernel.hpp"
#include "tbo/objectives.hpp"
#include "tbo/schedule.hpp"

namespace tbo {

enum class SurrogateKind { GP, Linear };
enum class HyperfitMode { Off, EveryStep, Every };
enum class DesignKind { LatinHypercube, Uniform };

struct HyperfitConfig {
  HyperfitMode mode = HyperfitMode::EveryStep;
  int every = 5;  // cadence for HyperfitMode::Every
  int restarts = 5;
  bool fit_signal_variance = true;
  bool fit_noise = false;
  // Whether a refit is scheduled at BO iteration `iter` (0-based).
  [[nodiscard]] bool due(int iter) const;
};

// Default cadence: every step up to three dimensions, every fifth step beyond.
HyperfitConfig default_hyperfit(int dim);

struct LinearSurrogateConfig {
  int features = 128;         // random Fourier features
  double lengthscale = 0.2;   // in unit-box coordinates
  double prior_precision = 1.0;
};

struct BORunConfig {
  Objective objective;
  SurrogateKind surrogate = SurrogateKind::GP;
  // Family plus starting hyperparameters. Empty lengthscales mean 0.2 of
  // each box width.
  KernelSpec kernel;
  AcqConfig acquisition;
  ScheduleMode schedule_mode = ScheduleMode::Adaptive;
  double fixed_alpha = 1.0;
  double alpha_floor = 0.05;
  int iterations = 30;  // T
  int init_size = 5;
  DesignKind design = DesignKind::LatinHypercube;
  int acq_budget = 512;
  HyperfitConfig hyperfit;
  // Surrogate noise variance. Non-positive means noise_sd^2 of the objective,
  // or 1e-4 when the objective is noiseless.
  double noise_variance = 0.0;
  bool center = true;  // subtract the mean of y before conditioning
  LinearSurrogateConfig linear;
  std::uint64_t seed = 0;
  bool record_timing = true;  // false writes wall_ms = 0 for reproducible output

  void validate() const;
};

// Printed defaults: init_size = min{5, 2p}, T = min{30, 10p}.
int default_init_size(int dim);
int default_iterations(int dim);

struct IterationRow {
  int t = 0;             // 1-based evaluation index
  bool initial = false;  // part of the initial design
  Vector x;
  double y = 0.0;
  double f_true = 0.0;  // noiseless objective at x
  int n_train = 0;      // observations conditioned on when x was chosen
  double alpha = 1.0;
  double incumbent = 0.0;  // mu+ = max of the tempered posterior mean
  double acq_value = 0.0;
  // Predictive at x before y was revealed, alpha = 1 and alpha = alpha_t.
  double mean_untempered = 0.0;
  double var_untempered = 0.0;
  double mean_tempered = 0.0;
  double var_tempered = 0.0;
  double var_at_incumbent = 0.0;  // tempered posterior variance at argmax of the mean
  Vector lengthscales;
  double signal_variance = 0.0;
  double noise_variance = 0.0;
  double mean_offset = 0.0;
  double best_observed = 0.0;  // running max of y
  double best_observed_f = 0.0;  // noiseless value at the running best-observed point
};

struct RunRecord {
  std::string objective;
  int dim = 0;
  std::uint64_t seed = 0;
  std::string config_hash;  // independent of the seed
  int init_size = 0;
  int iterations_requested = 0;
  int iterations_completed = 0;
  int evaluations = 0;
  std::vector<IterationRow> rows;
  Vector recommended_mean_x;  // argmax of the final posterior mean over visited points
  double recommended_mean_value = 0.0;
  Vector recommended_observed_x;  // best observed point
  double recommended_observed_y = 0.0;
  bool failed = false;
  std::string failure;
  double wall_ms = 0.0;
};

// Initial design of n points, one per row.
Matrix initialize_design(const Box& domain, int n, Rng& rng,
                         DesignKind kind = DesignKind::LatinHypercube);

// Deterministic description of every setting except the seed.
std::string describe_config(const BORunConfig& config);
std::string config_hash(const BORunConfig& config);

// Runs the tempered BO loop. Numerical failures end the run early with
// `failed` set; UsageError is thrown for invalid configurations.
RunRecord run_bo(const BORunConfig& config);

struct SweepObjective {
  std::string name;
  int dim = 0;  // 0 for the registry default
};

struct SweepMode {
  std::string label;  // "adaptive" or "fixed-<alpha>"
  ScheduleMode mode = ScheduleMode::Adaptive;
  double fixed_alpha = 1.0;
};

struct SweepGrid {
  std::vector<SweepObjective> objectives;
  std::vector<double> gs;
  std::vector<SweepMode> modes;
  int seeds = 5;
  std::uint64_t base_seed = 0;
  double noise_sd = 0.01;
  // Template for everything else. objective, acquisition.g, schedule mode and
  // seed are overwritten per cell; init_size / iterations <= 0 select the
  // dimension-based defaults, and hyperfit follows default_hyperfit unless
  // keep_hyperfit is set.
  BORunConfig base;
  bool keep_hyperfit = false;
  int threads = 1;
};

struct SweepResult {
  std::string objective;
  int dim = 0;
  double g = 0.0;
  std::string mode;
  int seed_index = 0;
  RunRecord record;
};

// Seed shared by all cells with the same objective, dimension and seed index,
// so alpha modes and g values see the same initial design and noise stream.
std::uint64_t sweep_seed(std::uint64_t base, const std::string& objective, int dim,
                         int seed_index);

// Runs every cell, in the order objective > g > mode > seed. Failed runs are
// kept with `failed` set.
std::vector<SweepResult> sweep(const SweepGrid& grid);

}  // namespace tbo
