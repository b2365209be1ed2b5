#pragma once

#include "tbo/common.hpp"
#include "tbo/gp.hpp"

namespace tbo {

// Standard normal density and upper tail Phi(-v) = P(Z > v).
double normal_pdf(double v);
double normal_cdf(double v);
double normal_upper_tail(double v);

// Generalized expected improvement E[max(0, f - incumbent - xi)^g] with the
// posterior standard deviation rescaled by nu inside the acquisition.
struct AcqConfig {
  double g = 1.0;
  double nu = 1.0;
  double xi = 0.0;
  int quadrature_nodes = 200;

  void validate() const;
};

// Standardized gaps are clamped to this magnitude before evaluating tau.
inline constexpr double kTauClamp = 40.0;

// Upper partial moment T_m(v) = int_v^inf u^m phi(u) du via the two-step
// recursion T_m = v^{m-1} phi(v) + (m-1) T_{m-2}.
double t_moment(int m, double v);

// tau_g(v) = int_v^inf (u - v)^g phi(u) du through the alternating binomial
// series over T_m. Integer g only. Loses relative accuracy for large positive
// v because the terms cancel.
double tau_series(double v, int g);

// tau_g(v) = int_0^inf u^g phi(v + u) du by tanh-sinh on [0, 1] (handles the
// u^g endpoint behaviour for non-integer g) and 20-point Gauss-Legendre unit
// panels beyond. `nodes` is the tanh-sinh node count.
double tau_quadrature(double v, double g, int nodes = 200);

// Dispatching evaluator: Phi(-v) for g = 0, the series for other integer g
// when v <= 5, quadrature otherwise. Result is clamped to be nonnegative.
double tau_g(double v, double g, int quadrature_nodes = 200);

// Inverse of the strictly decreasing map v -> tau_g(v) on [-40, 40]. Throws
// DomainError when y is not attained there.
double tau_g_inverse(double y, double g, int quadrature_nodes = 200);

double gei_value(double mean, double sd, double incumbent, const AcqConfig& config);

struct AcqMax {
  Vector x;
  double value;
};

// Quasi-random screen of `budget` points, then compass refinement from the
// five best. Ties resolve to the earliest screened point.
AcqMax maximize_acquisition(const GPState& state, double incumbent, const AcqConfig& config,
                            const Box& domain, int budget, Rng& rng);

}  // namespace tbo
