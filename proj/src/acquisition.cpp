#include "tbo/acquisition.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>

#include "tbo/sampling.hpp"

namespace tbo {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kSeriesCutoff = 5.0;

bool is_integer(double g) { return g == std::floor(g) && g < 1e6; }

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Tanh-sinh rule for the integral of f over [0, 1].
template <class F>
double tanh_sinh_unit(F&& f, int nodes) {
  const double tmax = 3.5;
  const int n = std::max(nodes, 3);
  const double h = 2.0 * tmax / (n - 1);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = -tmax + i * h;
    const double s = 0.5 * std::numbers::pi * std::sinh(t);
    const double x = 1.0 / (1.0 + std::exp(-2.0 * s));
    const double ch = std::cosh(s);
    const double w = h * 0.25 * std::numbers::pi * std::cosh(t) / (ch * ch);
    if (w == 0.0 || x <= 0.0 || x >= 1.0) continue;
    sum += w * f(x);
  }
  return sum;
}

template <class F>
double gauss_panels(F&& f, double a, double b) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();
  double total = 0.0;
  for (double lo = a; lo < b; lo += 1.0) {
    const double hi = std::min(lo + 1.0, b);
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double panel = 0.0;
    // Boost stores the positive half of the symmetric 20-point rule.
    for (std::size_t i = 0; i < xs.size(); ++i) {
      panel += ws[i] * (f(mid + half * xs[i]) + f(mid - half * xs[i]));
    }
    total += half * panel;
  }
  return total;
}

}  // namespace

double normal_pdf(double v) { return kInvSqrt2Pi * std::exp(-0.5 * v * v); }

double normal_upper_tail(double v) { return 0.5 * std::erfc(v / std::numbers::sqrt2); }

double normal_cdf(double v) { return 0.5 * std::erfc(-v / std::numbers::sqrt2); }

void AcqConfig::validate() const {
  if (!(g >= 0.0) || !std::isfinite(g)) throw UsageError("AcqConfig: g must be >= 0");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw UsageError("AcqConfig: nu must be > 0");
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw UsageError("AcqConfig: xi must be >= 0");
  if (quadrature_nodes < 1) throw UsageError("AcqConfig: quadrature_nodes must be >= 1");
}

double t_moment(int m, double v) {
  if (m < 0) throw UsageError("t_moment: order must be nonnegative");
  const double phi = normal_pdf(v);
  double even = normal_upper_tail(v);  // T_0
  double odd = phi;                    // T_1
  if (m == 0) return even;
  if (m == 1) return odd;
  double vpow = 1.0;  // v^{k-1} for the current k
  for (int k = 2; k <= m; ++k) {
    vpow *= v;
    if (k % 2 == 0) {
      even = vpow * phi + (k - 1) * even;
    } else {
      odd = vpow * phi + (k - 1) * odd;
    }
  }
  return (m % 2 == 0) ? even : odd;
}

double tau_series(double v, int g) {
  if (g < 0) throw UsageError("tau_series: g must be nonnegative");
  std::vector<double> T(g + 1);
  const double phi = normal_pdf(v);
  T[0] = normal_upper_tail(v);
  if (g >= 1) T[1] = phi;
  double vpow = 1.0;
  for (int m = 2; m <= g; ++m) {
    vpow *= v;
    T[m] = vpow * phi + (m - 1) * T[m - 2];
  }
  double tau = 0.0;
  double vk = 1.0;
  for (int k = 0; k <= g; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    tau += sign * binomial(g, k) * vk * T[g - k];
    vk *= v;
  }
  return tau;
}

double tau_quadrature(double v, double g, int nodes) {
  if (!(g >= 0.0)) throw UsageError("tau_quadrature: g must be nonnegative");
  const double upper = std::max(0.0, -v) + 12.0 + 2.0 * std::sqrt(g);
  if (v >= 0.0) {
    // phi(v) factored out so the integrand cannot underflow before the
    // final product.
    auto h = [v, g](double u) {
      const double e = std::exp(-v * u - 0.5 * u * u);
      return (g == 0.0) ? e : std::pow(u, g) * e;
    };
    const double integral = tanh_sinh_unit(h, nodes) + gauss_panels(h, 1.0, upper);
    return normal_pdf(v) * integral;
  }
  auto h = [v, g](double u) {
    const double p = normal_pdf(v + u);
    return (g == 0.0) ? p : std::pow(u, g) * p;
  };
  return tanh_sinh_unit(h, nodes) + gauss_panels(h, 1.0, upper);
}

double tau_g(double v, double g, int quadrature_nodes) {
  if (!(g >= 0.0)) throw UsageError("tau_g: g must be nonnegative");
  v = std::clamp(v, -kTauClamp, kTauClamp);
  if (g == 0.0) return normal_upper_tail(v);
  double out;
  if (is_integer(g) && v <= kSeriesCutoff) {
    out = tau_series(v, static_cast<int>(g));
  } else {
    out = tau_quadrature(v, g, quadrature_nodes);
  }
  return std::max(out, 0.0);
}

double tau_g_inverse(double y, double g, int quadrature_nodes) {
  if (!(g >= 0.0)) throw UsageError("tau_g_inverse: g must be nonnegative");
  const double top = tau_g(-kTauClamp, g, quadrature_nodes);
  const double bottom = tau_g(kTauClamp, g, quadrature_nodes);
  if (!(y > 0.0) || !(y > bottom) || !(y <= top)) {
    throw DomainError("tau_g_inverse: y = " + std::to_string(y) +
                      " is outside the attainable range of tau_g on [-40, 40]");
  }
  double lo = -kTauClamp;  // tau(lo) >= y
  double hi = kTauClamp;   // tau(hi) < y
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (tau_g(mid, g, quadrature_nodes) >= y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Pick whichever bracket end lands closer.
  const double flo = std::abs(tau_g(lo, g, quadrature_nodes) - y);
  const double fhi = std::abs(tau_g(hi, g, quadrature_nodes) - y);
  return (fhi < flo) ? hi : lo;
}

double gei_value(double mean, double sd, double incumbent, const AcqConfig& config) {
  if (!(sd > 0.0)) return 0.0;
  const double v = (incumbent + config.xi - mean) / sd;
  const double z = std::clamp(v / config.nu, -kTauClamp, kTauClamp);
  if (config.g == 0.0) return normal_upper_tail(z);
  return std::pow(config.nu * sd, config.g) * tau_g(z, config.g, config.quadrature_nodes);
}

AcqMax maximize_acquisition(const GPState& state, double incumbent, const AcqConfig& config,
                            const Box& domain, int budget, Rng& rng) {
  if (domain.empty()) throw UsageError("maximize_acquisition: empty domain");
  if (budget < 1) throw UsageError("maximize_acquisition: budget must be >= 1");
  if (domain.dim() != state.dim()) throw UsageError("maximize_acquisition: dimension mismatch");
  config.validate();

  const auto acq = [&](const Vector& x) {
    const Prediction p = state.predict(x);
    return gei_value(p.mean, std::sqrt(p.variance), incumbent, config);
  };

  const BoxMax best = screen_and_refine(acq, domain, budget, {}, rng, 0.02);
  return {best.x, best.value};
}

}  // namespace tbo
