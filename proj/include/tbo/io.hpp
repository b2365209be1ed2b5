#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "tbo/bo_loop.hpp"
#include "tbo/config.hpp"
#include "tbo/diagnostics.hpp"

namespace tbo {

// %.17g; nan and +-inf spelled out.
std::string format_float(double v);

// t, phase, x0..x{d-1}, y, f_true, n_train, alpha, incumbent, acq_value,
// mean_untempered, var_untempered, mean_tempered, var_tempered,
// var_at_incumbent, lengthscale0..lengthscale{d-1}, signal_variance,
// noise_variance, mean_offset, best_observed, best_observed_f.
std::vector<std::string> trace_columns(int dim);
void write_trace_csv(std::ostream& os, const RunRecord& record);

// Structured run summary with the effective configuration embedded. The
// regret block is present when the objective has a stored optimum.
std::string summary_json(const RunRecord& record, const Objective& objective,
                         const ConfigDoc& effective_config);

struct AggregateRow {
  std::string function;
  int dim = 0;
  double g = 0.0;
  std::string alpha_mode;
  int seed = 0;  // seed index within the sweep
  double best_observed_final = 0.0;
  std::vector<double> best_observed_at;  // after 5, 10, ..., 30 BO iterations; nan past the end
  double regret_total = 0.0;              // R_T over all evaluations; nan without f*
  double normalized_regret = 0.0;         // D_T; nan when undefined
  double wall_ms = 0.0;
  bool failed = false;
};

inline const std::vector<int> kCheckpoints{5, 10, 15, 20, 25, 30};

// Best observed y after `iterations` BO steps (0 = initial design only); nan
// when the run stopped earlier.
double best_observed_after(const RunRecord& record, int iterations);

std::vector<AggregateRow> aggregate(const std::vector<SweepResult>& results,
                                    const std::vector<Objective>& objectives);

// function, dim, g, alpha_mode, seed, best_observed_final,
// best_observed@5..@30, R_T, D_T, wall_ms.
std::vector<std::string> aggregate_columns();
void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows);

struct WinCount {
  double g = 0.0;
  std::string function;  // "ALL" for the per-g total
  int a_wins = 0;
  int b_wins = 0;
  int ties = 0;
  double p_value = 1.0;  // one-sided sign test P(X >= a_wins), X ~ Bin(a_wins + b_wins, 1/2)
};

// Pairs runs of mode_a and mode_b by (function, dim, g, seed) and compares
// best_observed_final; failed runs are skipped. One row per (g, function)
// followed by an "ALL" row per g.
std::vector<WinCount> paired_wins(const std::vector<AggregateRow>& rows, const std::string& mode_a,
                                  const std::string& mode_b);
void write_wins_csv(std::ostream& os, const std::vector<WinCount>& wins, const std::string& mode_a,
                    const std::string& mode_b);

// Function-level comparison: per (g, function, dim) the best_observed_final
// values of mode_a and mode_b are averaged over the seeds where both ran
// without failure, and the averages are compared. One row per g.
struct FunctionWins {
  double g = 0.0;
  int a_wins = 0;
  int b_wins = 0;
  int ties = 0;
  double p_value = 1.0;  // one-sided sign test as in WinCount
};

std::vector<FunctionWins> function_wins(const std::vector<AggregateRow>& rows,
                                        const std::string& mode_a, const std::string& mode_b);
// g, <a>_wins, <b>_wins, ties, <a>_strict_win_rate, p_value. The win rate is
// over decided functions (nan when none).
void write_function_wins_csv(std::ostream& os, const std::vector<FunctionWins>& wins,
                             const std::string& mode_a, const std::string& mode_b);

double sign_test_pvalue(int wins, int decided);

}  // namespace tbo
