#pragma once

#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "tbo/common.hpp"
#include "tbo/kernel.hpp"

namespace tbo {

struct KnownOptimum {
  double value = 0.0;
  Vector location;         // empty when only the value is known
  bool estimated = false;  // true when found numerically rather than analytically
};

// A black-box objective to be maximized. `eval` is the noiseless response and
// must be pure; noise is added by evaluate_noisy from the caller's stream.
struct Objective {
  std::string name;
  Box domain;
  double noise_sd = 0.0;
  std::optional<KnownOptimum> true_best;
  std::function<double(const Vector&)> eval;

  [[nodiscard]] int dim() const { return domain.dim(); }
  // Noiseless evaluation with a dimension check.
  [[nodiscard]] double operator()(const Vector& x) const;
};

// f(x) = -2 cos(8 |4x - 2|) / (|4x - 2|^2 + 2) on [0, 1].
double toy_function(double x);

// Toy maximizer found by a 10^6-point grid followed by golden-section polish.
// The function is symmetric about 0.5, so 1 - kToyArgmax is also a maximizer.
inline constexpr double kToyArgmax = 0.40323092;
inline constexpr double kToyMax = 0.92936592154264;

struct RegistryEntry {
  std::string name;
  int native_dim;  // 0 for families defined in any dimension
  std::string note;
};

// All registered families, sorted by name.
const std::vector<RegistryEntry>& builtin_registry();

// Registered benchmark in maximization form. Minimization benchmarks are
// negated, so their optima become nonpositive maxima. `dimension` must match
// native_dim for fixed-dimension families; 0 selects the native dimension,
// or 5 for scalable families.
Objective builtin(const std::string& name, int dimension = 0, double noise_sd = 0.0);

// f(x) + N(0, noise_sd^2) drawn from rng. Throws UsageError outside the domain.
double evaluate_noisy(const Objective& obj, const Vector& x, Rng& rng);

struct Table {
  Matrix points;  // one sample per row
  Vector values;
  std::vector<std::string> header;  // empty when the file had none
};

// Delimited text: d coordinate columns then one value column per row. The
// delimiter is comma, semicolon, tab or whitespace (detected from the first
// data line). A non-numeric first row is treated as a header. Blank lines and
// lines starting with '#' are skipped. Errors name the offending line.
Table read_table(std::istream& in, const std::string& source_name = "<stream>");
Table read_table_file(const std::string& path);

// Drops the last coordinate of every point (simplex to free coordinates).
Table drop_last_coordinate(const Table& table);

struct TabularOptions {
  std::optional<Box> domain;  // bounding box of the data when absent
  int mean_max_budget = 2048;
  std::uint64_t seed = 0;  // stream for the estimated optimum search
};

// Objective whose noiseless value is the posterior mean of a GP (zero prior
// mean, alpha = 1) conditioned on the whole table.
Objective tabular_objective(const Table& table, const KernelSpec& spec, double noise_variance,
                            const TabularOptions& options = {});

}  // namespace tbo
