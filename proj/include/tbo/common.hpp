#pragma once

#include <Eigen/Dense>

#include <random>
#include <stdexcept>
#include <cstdint>
#include <string>
#include <string_view>

namespace tbo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

// Caller passed something malformed: wrong dimension, empty set, bad range.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A factorization or evaluation failed in a way the caller cannot fix by
// changing arguments alone.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument lies outside the range where a function is invertible/defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Unreadable or malformed external input (tables, config files).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Axis-aligned box [lower, upper] in R^d.
struct Box {
  Vector lower;
  Vector upper;

  Box() = default;
  Box(Vector lo, Vector hi);
  static Box unit(int d);
  static Box cube(int d, double lo, double hi);

  [[nodiscard]] int dim() const { return static_cast<int>(lower.size()); }
  [[nodiscard]] bool empty() const;
  [[nodiscard]] bool contains(const Vector& x, double tol = 0.0) const;
  [[nodiscard]] Vector width() const { return upper - lower; }
  [[nodiscard]] Vector clamp(const Vector& x) const;
  // Maps u in [0,1]^d onto the box.
  [[nodiscard]] Vector from_unit(const Vector& u) const;
};

// 64-bit FNV-1a hash of a byte string.
std::uint64_t fnv1a(std::string_view bytes);

// Child seed for an independent stream: SplitMix64 finalizer applied to the
// parent seed combined with the hash of `tag`.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag);

}  // namespace tbo
