#include "tbo/objectives.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

#include "tbo/gp.hpp"

namespace tbo {

namespace {

constexpr double kPi = std::numbers::pi;

double sq(double v) { return v * v; }

// ---------------------------------------------------------------------------
// Benchmarks in their literature (minimization) form.

double ackley(const Vector& x) {
  const double n = static_cast<double>(x.size());
  const double s2 = x.squaredNorm() / n;
  const double sc = (2.0 * kPi * x.array()).cos().sum() / n;
  return -20.0 * std::exp(-0.2 * std::sqrt(s2)) - std::exp(sc) + 20.0 + std::numbers::e;
}

double alpine1(const Vector& x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v * std::sin(v) + 0.1 * v);
  return s;
}

double beale(const Vector& x) {
  const double a = x[0], b = x[1];
  return sq(1.5 - a + a * b) + sq(2.25 - a + a * b * b) + sq(2.625 - a + a * b * b * b);
}

double booth(const Vector& x) { return sq(x[0] + 2 * x[1] - 7) + sq(2 * x[0] + x[1] - 5); }

double branin(const Vector& x) {
  const double b = 5.1 / (4 * kPi * kPi), c = 5 / kPi, t = 1 / (8 * kPi);
  return sq(x[1] - b * x[0] * x[0] + c * x[0] - 6) + 10 * (1 - t) * std::cos(x[0]) + 10;
}

double bukin6(const Vector& x) {
  return 100 * std::sqrt(std::abs(x[1] - 0.01 * x[0] * x[0])) + 0.01 * std::abs(x[0] + 10);
}

double camel3(const Vector& x) {
  const double a = x[0], b = x[1];
  return 2 * a * a - 1.05 * std::pow(a, 4) + std::pow(a, 6) / 6 + a * b + b * b;
}

double camel6(const Vector& x) {
  const double a = x[0], b = x[1];
  return (4 - 2.1 * a * a + std::pow(a, 4) / 3) * a * a + a * b + (-4 + 4 * b * b) * b * b;
}

double colville(const Vector& x) {
  return 100 * sq(x[0] * x[0] - x[1]) + sq(x[0] - 1) + sq(x[2] - 1) + 90 * sq(x[2] * x[2] - x[3]) +
         10.1 * (sq(x[1] - 1) + sq(x[3] - 1)) + 19.8 * (x[1] - 1) * (x[3] - 1);
}

double cross_in_tray(const Vector& x) {
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
  const double inner = std::abs(std::sin(x[0]) * std::sin(x[1]) * std::exp(std::abs(100 - r / kPi)));
  return -1e-4 * std::pow(inner + 1, 0.1);
}

double dixon_price(const Vector& x) {
  double s = sq(x[0] - 1);
  for (Eigen::Index i = 1; i < x.size(); ++i) s += (i + 1) * sq(2 * x[i] * x[i] - x[i - 1]);
  return s;
}

double drop_wave(const Vector& x) {
  const double r2 = x[0] * x[0] + x[1] * x[1];
  return -(1 + std::cos(12 * std::sqrt(r2))) / (0.5 * r2 + 2);
}

double easom(const Vector& x) {
  return -std::cos(x[0]) * std::cos(x[1]) * std::exp(-sq(x[0] - kPi) - sq(x[1] - kPi));
}

double eggholder(const Vector& x) {
  const double a = x[0], b = x[1];
  return -(b + 47) * std::sin(std::sqrt(std::abs(b + a / 2 + 47))) -
         a * std::sin(std::sqrt(std::abs(a - (b + 47))));
}

double goldstein_price(const Vector& x) {
  const double a = x[0], b = x[1];
  const double p = 1 + sq(a + b + 1) * (19 - 14 * a + 3 * a * a - 14 * b + 6 * a * b + 3 * b * b);
  const double q =
      30 + sq(2 * a - 3 * b) * (18 - 32 * a + 12 * a * a + 48 * b - 36 * a * b + 27 * b * b);
  return p * q;
}

double griewank(const Vector& x) {
  double s = 0.0, p = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    s += x[i] * x[i] / 4000.0;
    p *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return s - p + 1;
}

constexpr std::array<double, 4> kHartAlpha{1.0, 1.2, 3.0, 3.2};

double hartmann3(const Vector& x) {
  static constexpr double A[4][3] = {{3, 10, 30}, {0.1, 10, 35}, {3, 10, 30}, {0.1, 10, 35}};
  static constexpr double P[4][3] = {{0.3689, 0.1170, 0.2673},
                                     {0.4699, 0.4387, 0.7470},
                                     {0.1091, 0.8732, 0.5547},
                                     {0.0381, 0.5743, 0.8828}};
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    double e = 0.0;
    for (int j = 0; j < 3; ++j) e += A[i][j] * sq(x[j] - P[i][j]);
    s += kHartAlpha[i] * std::exp(-e);
  }
  return -s;
}

constexpr double kHart6A[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                  {0.05, 10, 17, 0.1, 8, 14},
                                  {3, 3.5, 1.7, 10, 17, 8},
                                  {17, 8, 0.05, 10, 0.1, 14}};
constexpr double kHart6P[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                  {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                  {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                  {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};

double hartmann_sum(const Vector& x, int d) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    double e = 0.0;
    for (int j = 0; j < d; ++j) e += kHart6A[i][j] * sq(x[j] - kHart6P[i][j]);
    s += kHartAlpha[i] * std::exp(-e);
  }
  return s;
}

// Rescaled four-dimensional variant built from the first four columns of the
// six-dimensional constants.
double hartmann4(const Vector& x) { return (1.1 - hartmann_sum(x, 4)) / 0.839; }

double hartmann6(const Vector& x) { return -hartmann_sum(x, 6); }

double holder_table(const Vector& x) {
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
  return -std::abs(std::sin(x[0]) * std::cos(x[1]) * std::exp(std::abs(1 - r / kPi)));
}

double levy(const Vector& x) {
  const Eigen::Index d = x.size();
  auto w = [&](Eigen::Index i) { return 1 + (x[i] - 1) / 4; };
  double s = sq(std::sin(kPi * w(0)));
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    s += sq(w(i) - 1) * (1 + 10 * sq(std::sin(kPi * w(i) + 1)));
  }
  s += sq(w(d - 1) - 1) * (1 + sq(std::sin(2 * kPi * w(d - 1))));
  return s;
}

double levy13(const Vector& x) {
  return sq(std::sin(3 * kPi * x[0])) + sq(x[0] - 1) * (1 + sq(std::sin(3 * kPi * x[1]))) +
         sq(x[1] - 1) * (1 + sq(std::sin(2 * kPi * x[1])));
}

double matyas(const Vector& x) { return 0.26 * (x[0] * x[0] + x[1] * x[1]) - 0.48 * x[0] * x[1]; }

double mccormick(const Vector& x) {
  return std::sin(x[0] + x[1]) + sq(x[0] - x[1]) - 1.5 * x[0] + 2.5 * x[1] + 1;
}

double michalewicz(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    s += std::sin(x[i]) * std::pow(std::sin((i + 1) * x[i] * x[i] / kPi), 20);
  }
  return -s;
}

double powell(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 3 < x.size(); i += 4) {
    s += sq(x[i] + 10 * x[i + 1]) + 5 * sq(x[i + 2] - x[i + 3]) +
         std::pow(x[i + 1] - 2 * x[i + 2], 4) + 10 * std::pow(x[i] - x[i + 3], 4);
  }
  return s;
}

double rastrigin(const Vector& x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (double v : x) s += v * v - 10 * std::cos(2 * kPi * v);
  return s;
}

double rosenbrock(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) s += 100 * sq(x[i + 1] - x[i] * x[i]) + sq(x[i] - 1);
  return s;
}

double rotated_hyper_ellipsoid(const Vector& x) {
  double s = 0.0, partial = 0.0;
  for (double v : x) {
    partial += v * v;
    s += partial;
  }
  return s;
}

double schwefel(const Vector& x) {
  double s = 418.9829 * static_cast<double>(x.size());
  for (double v : x) s -= v * std::sin(std::sqrt(std::abs(v)));
  return s;
}

double shekel(const Vector& x) {
  static constexpr double beta[10] = {0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5};
  static constexpr double C[4][10] = {{4, 1, 8, 6, 3, 2, 5, 8, 6, 7},
                                      {4, 1, 8, 6, 7, 9, 3, 1, 2, 3.6},
                                      {4, 1, 8, 6, 3, 2, 5, 8, 6, 7},
                                      {4, 1, 8, 6, 7, 9, 3, 1, 2, 3.6}};
  double s = 0.0;
  for (int i = 0; i < 10; ++i) {
    double e = beta[i];
    for (int j = 0; j < 4; ++j) e += sq(x[j] - C[j][i]);
    s -= 1.0 / e;
  }
  return s;
}

double shubert(const Vector& x) {
  double p = 1.0;
  for (int k = 0; k < 2; ++k) {
    double s = 0.0;
    for (int i = 1; i <= 5; ++i) s += i * std::cos((i + 1) * x[k] + i);
    p *= s;
  }
  return p;
}

double sphere(const Vector& x) { return x.squaredNorm(); }

double styblinski_tang(const Vector& x) {
  double s = 0.0;
  for (double v : x) s += std::pow(v, 4) - 16 * v * v + 5 * v;
  return 0.5 * s;
}

double sum_squares(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += (i + 1) * x[i] * x[i];
  return s;
}

double zakharov(const Vector& x) {
  double a = 0.0, b = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    a += x[i] * x[i];
    b += 0.5 * (i + 1) * x[i];
  }
  return a + b * b + std::pow(b, 4);
}

// ---------------------------------------------------------------------------

struct Family {
  int native_dim;   // 0: scalable
  int default_dim;  // used when dimension 0 is requested
  std::string note;
  std::function<Box(int)> domain;
  std::function<double(const Vector&)> f;  // minimization form
  // Minimum of f in dimension d, when known.
  std::function<std::optional<KnownOptimum>(int)> minimum;
  std::function<bool(int)> dim_ok = [](int d) { return d >= 1; };
};

Box rect(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  Vector l(static_cast<Eigen::Index>(lo.size())), h(static_cast<Eigen::Index>(hi.size()));
  std::copy(lo.begin(), lo.end(), l.data());
  std::copy(hi.begin(), hi.end(), h.data());
  return Box(l, h);
}

std::function<Box(int)> cube(double lo, double hi) {
  return [lo, hi](int d) { return Box::cube(d, lo, hi); };
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), out.data());
  return out;
}

// Exact optimum at the constant point c in every dimension.
std::function<std::optional<KnownOptimum>(int)> at_constant(double value, double c) {
  return [value, c](int d) -> std::optional<KnownOptimum> {
    return KnownOptimum{value, Vector::Constant(d, c), false};
  };
}

std::function<std::optional<KnownOptimum>(int)> fixed(double value, Vector loc, bool estimated) {
  return [value, loc, estimated](int) -> std::optional<KnownOptimum> {
    return KnownOptimum{value, loc, estimated};
  };
}

const std::map<std::string, Family>& families() {
  static const std::map<std::string, Family> table = [] {
    std::map<std::string, Family> m;
    m["ackley"] = {0, 5, "[-32.768, 32.768]^d, optimum 0 at the origin", cube(-32.768, 32.768),
                   ackley, at_constant(0.0, 0.0)};
    m["alpine1"] = {0, 5, "[-10, 10]^d, optimum 0 at the origin", cube(-10, 10), alpine1,
                    at_constant(0.0, 0.0)};
    m["beale"] = {2, 2, "[-4.5, 4.5]^2, optimum 0 at (3, 0.5)", cube(-4.5, 4.5), beale,
                  fixed(0.0, vec({3.0, 0.5}), false)};
    m["booth"] = {2, 2, "[-10, 10]^2, optimum 0 at (1, 3)", cube(-10, 10), booth,
                  fixed(0.0, vec({1.0, 3.0}), false)};
    m["branin"] = {2, 2, "[-5, 10] x [0, 15], optimum 5/(4 pi) at (pi, 2.275) and two others",
                   [](int) { return rect({-5, 0}, {10, 15}); }, branin,
                   fixed(5.0 / (4.0 * kPi), vec({kPi, 2.275}), false)};
    m["bukin6"] = {2, 2, "[-15, -5] x [-3, 3], optimum 0 at (-10, 1)",
                   [](int) { return rect({-15, -3}, {-5, 3}); }, bukin6,
                   fixed(0.0, vec({-10.0, 1.0}), false)};
    m["camel3"] = {2, 2, "[-5, 5]^2, optimum 0 at the origin", cube(-5, 5), camel3,
                   at_constant(0.0, 0.0)};
    m["camel6"] = {2, 2, "[-3, 3] x [-2, 2], optimum -1.0316 at (+-0.0898, -+0.7127)",
                   [](int) { return rect({-3, -2}, {3, 2}); }, camel6,
                   fixed(-1.0316284534898774, vec({0.0898420147, -0.7126564045}), true)};
    m["colville"] = {4, 4, "[-10, 10]^4, optimum 0 at (1, 1, 1, 1)", cube(-10, 10), colville,
                     at_constant(0.0, 1.0)};
    m["cross_in_tray"] = {2, 2, "[-10, 10]^2, optimum -2.0626 at (+-1.3491, +-1.3491)",
                          cube(-10, 10), cross_in_tray,
                          fixed(-2.0626118708227397, vec({1.3494066176, 1.3494066128}), true)};
    m["dixon_price"] = {0, 5, "[-10, 10]^d, optimum 0 at x_i = 2^(-(2^i - 2) / 2^i)",
                        cube(-10, 10), dixon_price, [](int d) -> std::optional<KnownOptimum> {
                          Vector loc(d);
                          for (int i = 1; i <= d; ++i) {
                            const double p = std::ldexp(1.0, i);
                            loc[i - 1] = std::pow(2.0, -(p - 2.0) / p);
                          }
                          return KnownOptimum{0.0, loc, false};
                        }};
    m["drop_wave"] = {2, 2, "[-5.12, 5.12]^2, optimum -1 at the origin", cube(-5.12, 5.12),
                      drop_wave, at_constant(-1.0, 0.0)};
    m["easom"] = {2, 2, "[-100, 100]^2, optimum -1 at (pi, pi)", cube(-100, 100), easom,
                  at_constant(-1.0, kPi)};
    m["eggholder"] = {2, 2, "[-512, 512]^2, optimum -959.64 at (512, 404.23)", cube(-512, 512),
                      eggholder, fixed(-959.6406627208505, vec({512.0, 404.2318057002}), true)};
    m["goldstein_price"] = {2, 2, "[-2, 2]^2, optimum 3 at (0, -1)", cube(-2, 2), goldstein_price,
                            fixed(3.0, vec({0.0, -1.0}), false)};
    m["griewank"] = {0, 5, "[-600, 600]^d, optimum 0 at the origin", cube(-600, 600), griewank,
                     at_constant(0.0, 0.0)};
    m["hartmann3"] = {3, 3, "[0, 1]^3, optimum -3.8628", cube(0, 1), hartmann3,
                      fixed(-3.862779787332663, vec({0.1145888763, 0.555648895, 0.8525469847}),
                            true)};
    m["hartmann4"] = {4, 4, "[0, 1]^4, rescaled variant, optimum -3.1345", cube(0, 1), hartmann4,
                      fixed(-3.1344941412224,
                            vec({0.1873952729, 0.1941515307, 0.5579177817, 0.2647796242}), true)};
    m["hartmann6"] = {6, 6, "[0, 1]^6, optimum -3.3224", cube(0, 1), hartmann6,
                      fixed(-3.322368011415515,
                            vec({0.2016895133, 0.1500106922, 0.4768739729, 0.2753324308,
                                 0.3116516173, 0.6573005343}),
                            true)};
    m["holder_table"] = {2, 2, "[-10, 10]^2, optimum -19.2085 at (+-8.0550, +-9.6646)",
                         cube(-10, 10), holder_table,
                         fixed(-19.20850256788675, vec({8.0550234859, 9.6645900148}), true)};
    m["levy"] = {0, 5, "[-10, 10]^d, optimum 0 at (1, ..., 1)", cube(-10, 10), levy,
                 at_constant(0.0, 1.0)};
    m["levy13"] = {2, 2, "[-10, 10]^2, optimum 0 at (1, 1)", cube(-10, 10), levy13,
                   at_constant(0.0, 1.0)};
    m["matyas"] = {2, 2, "[-10, 10]^2, optimum 0 at the origin", cube(-10, 10), matyas,
                   at_constant(0.0, 0.0)};
    m["mccormick"] = {2, 2, "[-1.5, 4] x [-3, 4], optimum -sqrt(3)/2 - pi/3",
                      [](int) { return rect({-1.5, -3}, {4, 4}); }, mccormick,
                      fixed(-std::sqrt(3.0) / 2.0 - kPi / 3.0,
                            vec({0.5 - kPi / 3.0, -0.5 - kPi / 3.0}), false)};
    m["michalewicz"] = {0, 5, "[0, pi]^d, m = 10; optimum stored for d in {2, 5, 10}",
                        cube(0, kPi), michalewicz, [](int d) -> std::optional<KnownOptimum> {
                          if (d == 2) {
                            return KnownOptimum{-1.8013034100985537,
                                                vec({2.2029055201, 1.5707963279}), true};
                          }
                          if (d == 5) return KnownOptimum{-4.687658179087894, Vector(), true};
                          if (d == 10) return KnownOptimum{-9.66015, Vector(), true};
                          return std::nullopt;
                        }};
    m["powell"] = {0, 4, "[-4, 5]^d with d a multiple of 4, optimum 0 at the origin", cube(-4, 5),
                   powell, at_constant(0.0, 0.0), [](int d) { return d >= 4 && d % 4 == 0; }};
    m["rastrigin"] = {0, 5, "[-5.12, 5.12]^d, optimum 0 at the origin", cube(-5.12, 5.12),
                      rastrigin, at_constant(0.0, 0.0)};
    m["rosenbrock"] = {0, 5, "[-5, 10]^d, optimum 0 at (1, ..., 1)", cube(-5, 10), rosenbrock,
                       at_constant(0.0, 1.0), [](int d) { return d >= 2; }};
    m["rotated_hyper_ellipsoid"] = {0, 5, "[-65.536, 65.536]^d, optimum 0 at the origin",
                                    cube(-65.536, 65.536), rotated_hyper_ellipsoid,
                                    at_constant(0.0, 0.0)};
    m["schwefel"] = {0, 5, "[-500, 500]^d, optimum ~1.27e-5 d at 420.9687 per axis",
                     cube(-500, 500), schwefel, [](int d) -> std::optional<KnownOptimum> {
                       return KnownOptimum{1.2727567195724987e-05 * d,
                                           Vector::Constant(d, 420.9687436961694), true};
                     }};
    m["shekel"] = {4, 4, "[0, 10]^4, m = 10, optimum -10.5364 near (4, 4, 4, 4)", cube(0, 10),
                   shekel,
                   fixed(-10.536443153483532,
                         vec({4.0007468659, 3.999509481, 4.0007468679, 3.9995094797}), true)};
    m["shubert"] = {2, 2, "[-10, 10]^2, optimum -186.7309 (18 global minimizers)", cube(-10, 10),
                    shubert, fixed(-186.73090883102395, vec({4.85805688, 5.4828642086}), true)};
    m["sphere"] = {0, 5, "[-5.12, 5.12]^d, optimum 0 at the origin", cube(-5.12, 5.12), sphere,
                   at_constant(0.0, 0.0)};
    m["styblinski_tang"] = {0, 5, "[-5, 5]^d, halved sum, optimum -39.1662 d at -2.9035 per axis",
                            cube(-5, 5), styblinski_tang,
                            [](int d) -> std::optional<KnownOptimum> {
                              return KnownOptimum{-39.16616570377141 * d,
                                                  Vector::Constant(d, -2.9035340286202334), true};
                            }};
    m["sum_squares"] = {0, 5, "[-10, 10]^d, optimum 0 at the origin", cube(-10, 10), sum_squares,
                        at_constant(0.0, 0.0)};
    m["zakharov"] = {0, 5, "[-5, 10]^d, optimum 0 at the origin", cube(-5, 10), zakharov,
                     at_constant(0.0, 0.0)};
    // Native maximization problem; stored negated so the generic negation
    // below restores it.
    m["toy"] = {1, 1, "[0, 1], maximize -2 cos(8|4x-2|) / (|4x-2|^2 + 2), max 0.92937",
                cube(0, 1), [](const Vector& x) { return -toy_function(x[0]); },
                fixed(-kToyMax, vec({kToyArgmax}), true)};
    for (auto& [name, fam] : m) {
      if (fam.native_dim > 0) {
        const int nd = fam.native_dim;
        fam.dim_ok = [nd](int d) { return d == nd; };
      }
    }
    return m;
  }();
  return table;
}

// Sampled check that nothing in the domain beats the stored optimum, and that
// the stored location attains it.
void check_registration(const Objective& obj) {
  if (!obj.true_best) return;
  const KnownOptimum& opt = *obj.true_best;
  const double tol = 1e-6;
  Rng rng(0x7e61a5ULL);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector p(obj.dim());
  for (int i = 0; i < 1000; ++i) {
    for (int j = 0; j < obj.dim(); ++j) p[j] = u(rng);
    const double v = obj.eval(obj.domain.from_unit(p));
    if (v > opt.value + tol) {
      throw NumericalError(obj.name + ": sampled value " + std::to_string(v) +
                           " exceeds the stored optimum " + std::to_string(opt.value));
    }
  }
  if (opt.location.size() > 0) {
    if (!obj.domain.contains(opt.location, 1e-12)) {
      throw NumericalError(obj.name + ": stored optimum lies outside the domain");
    }
    const double at = obj.eval(opt.location);
    if (at > opt.value + tol || at < opt.value - 1e-4 * (1.0 + std::abs(opt.value))) {
      throw NumericalError(obj.name + ": stored optimum location evaluates to " +
                           std::to_string(at));
    }
  }
}

}  // namespace

double Objective::operator()(const Vector& x) const {
  if (x.size() != dim()) {
    throw UsageError(name + ": expected a point of dimension " + std::to_string(dim()) +
                     ", got " + std::to_string(x.size()));
  }
  return eval(x);
}

double toy_function(double x) {
  const double a = std::abs(4.0 * x - 2.0);
  return -2.0 * std::cos(8.0 * a) / (a * a + 2.0);
}

const std::vector<RegistryEntry>& builtin_registry() {
  static const std::vector<RegistryEntry> entries = [] {
    std::vector<RegistryEntry> out;
    for (const auto& [name, fam] : families()) out.push_back({name, fam.native_dim, fam.note});
    return out;
  }();
  return entries;
}

Objective builtin(const std::string& name, int dimension, double noise_sd) {
  const auto& fams = families();
  const auto it = fams.find(name);
  if (it == fams.end()) throw UsageError("unknown objective '" + name + "'");
  const Family& fam = it->second;
  const int d = dimension == 0 ? fam.default_dim : dimension;
  if (!fam.dim_ok(d)) {
    throw UsageError("objective '" + name + "' does not support dimension " + std::to_string(d));
  }
  if (!(noise_sd >= 0.0)) throw UsageError("noise_sd must be nonnegative");
  Objective obj;
  obj.name = name;
  obj.domain = fam.domain(d);
  obj.noise_sd = noise_sd;
  const auto f = fam.f;
  obj.eval = [f](const Vector& x) { return -f(x); };
  if (auto m = fam.minimum(d)) {
    m->value = -m->value;
    obj.true_best = std::move(m);
  }
  check_registration(obj);
  return obj;
}

double evaluate_noisy(const Objective& obj, const Vector& x, Rng& rng) {
  if (!obj.domain.contains(x)) throw UsageError(obj.name + ": query point outside the domain");
  const double f = obj(x);
  if (obj.noise_sd == 0.0) return f;
  std::normal_distribution<double> noise(0.0, obj.noise_sd);
  return f + noise(rng);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  if (delim == ' ') {
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
  }
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_number(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size() && std::isfinite(out);
}

}  // namespace

Table read_table(std::istream& in, const std::string& source_name) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  char delim = 0;
  std::size_t ncols = 0;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (delim == 0) {
      if (line.find(',') != std::string::npos) {
        delim = ',';
      } else if (line.find(';') != std::string::npos) {
        delim = ';';
      } else if (line.find('\t') != std::string::npos) {
        delim = '\t';
      } else {
        delim = ' ';
      }
    }
    const auto toks = split(line, delim);
    std::vector<double> vals(toks.size());
    bool numeric = true;
    for (std::size_t i = 0; i < toks.size(); ++i) numeric = numeric && parse_number(toks[i], vals[i]);
    if (ncols == 0) {
      ncols = toks.size();
      if (ncols < 2) {
        throw InputError(source_name + ":" + std::to_string(lineno) +
                         ": need at least one coordinate column and one value column");
      }
      if (!numeric) {
        header = toks;
        continue;
      }
    }
    if (toks.size() != ncols) {
      throw InputError(source_name + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(ncols) + " columns, found " + std::to_string(toks.size()));
    }
    if (!numeric) {
      for (std::size_t i = 0; i < toks.size(); ++i) {
        double dummy;
        if (!parse_number(toks[i], dummy)) {
          throw InputError(source_name + ":" + std::to_string(lineno) + ": column " +
                           std::to_string(i + 1) + " is not a finite number: '" + toks[i] + "'");
        }
      }
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw InputError(source_name + ": no data rows");
  Table t;
  t.header = std::move(header);
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(ncols - 1);
  t.points.resize(n, d);
  t.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) t.points(i, j) = rows[i][j];
    t.values[i] = rows[i][d];
  }
  return t;
}

Table read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open");
  return read_table(in, path);
}

Table drop_last_coordinate(const Table& table) {
  if (table.points.cols() < 2) throw UsageError("drop_last_coordinate: need at least two coordinates");
  Table out = table;
  out.points = table.points.leftCols(table.points.cols() - 1);
  if (!out.header.empty()) out.header.erase(out.header.end() - 2);
  return out;
}

Objective tabular_objective(const Table& table, const KernelSpec& spec, double noise_variance,
                            const TabularOptions& options) {
  if (table.points.rows() == 0) throw UsageError("tabular_objective: empty table");
  if (table.points.rows() != table.values.size()) {
    throw UsageError("tabular_objective: point and value counts differ");
  }
  if (table.points.cols() != spec.dim()) {
    throw UsageError("tabular_objective: kernel dimension does not match the table");
  }
  Box domain;
  if (options.domain) {
    domain = *options.domain;
    if (domain.dim() != spec.dim() || domain.empty()) {
      throw UsageError("tabular_objective: domain does not match the table dimension");
    }
  } else {
    domain = Box(table.points.colwise().minCoeff().transpose(),
                 table.points.colwise().maxCoeff().transpose());
  }
  auto state = std::make_shared<const GPState>(
      tempered_posterior(table.points, table.values, spec, noise_variance, 1.0));
  Objective obj;
  obj.name = "tabular";
  obj.domain = domain;
  obj.eval = [state](const Vector& x) { return state->mean(x); };
  Rng rng(options.seed);
  const MeanMax best = posterior_mean_max(*state, domain, options.mean_max_budget, rng);
  obj.true_best = KnownOptimum{best.value, best.x, true};
  return obj;
}

}  // namespace tbo
