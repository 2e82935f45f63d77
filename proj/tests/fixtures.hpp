#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "fuzznum/fuzznum.hpp"

// Shared test functions and problems with their closed-form oracles.
namespace fuzznum::fixtures {

// Random trapezoid with support inside [-span, span].
inline FuzzyNumber random_trapezoid(std::mt19937_64& rng, double span = 10.0) {
  std::uniform_real_distribution<double> u(-span, span);
  double v[4] = {u(rng), u(rng), u(rng), u(rng)};
  std::sort(v, v + 4);
  return FuzzyNumber::trapezoidal(v[0], v[1], v[2], v[3]);
}

inline FuzzyNumber random_positive(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 6.0);
  double v[3] = {u(rng), u(rng), u(rng)};
  std::sort(v, v + 3);
  return FuzzyNumber::triangular(v[0], v[1], v[2]);
}


// Level-wise hull of a op b over an n x n grid of the two cuts.
inline LevelInterval brute_force(const LevelInterval& a, const LevelInterval& b, ArithOp op, int n = 64) {
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = a.lo + (a.hi - a.lo) * i / (n - 1);
      const double y = b.lo + (b.hi - b.lo) * j / (n - 1);
      double v = 0;
      switch (op) {
        case ArithOp::add: v = x + y; break;
        case ArithOp::sub: v = x - y; break;
        case ArithOp::mul: v = x * y; break;
        case ArithOp::div: v = x / y; break;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo, hi};
}

inline double wave_kernel(double x) { return std::cos(x) - x * x / 32; }
inline double wave_kernel_slope(double x) { return -std::sin(x) - x / 16; }

inline FuzzyFunction trapezoid_wave() {
  return FuzzyFunction::coefficient({FuzzyNumber::trapezoidal(2, 4, 5, 8)}, {{wave_kernel, wave_kernel_slope}}, -10, 10);
}

inline FuzzyFunction quadratic_spread(bool analytic) {
  LevelFn lo = [](double x, double a) { return a * x * x; };
  LevelFn hi = [](double x, double a) { return a * x * x + x * x + 1 - a; };
  if (!analytic) return FuzzyFunction::endpoint(lo, hi, 0, 1);
  return FuzzyFunction::endpoint(lo, hi, 0, 1, [](double x, double a) { return 2 * a * x; },
                                 [](double x, double a) { return 2 * a * x + 2 * x; });
}

inline FuzzyFunction gap_function() {
  auto lo = [](double x, double a) {
    return x * std::exp(-x) + a * a * (std::exp(-x * x) + x - x * std::exp(-x));
  };
  auto width = [](double x, double a) {
    return (1 - a * a) * (2 * std::exp(-x * x) + std::exp(x) - x * std::exp(-x));
  };
  auto dlo = [](double x, double a) {
    return (1 - x) * std::exp(-x) +
           a * a * (1 - 2 * x * std::exp(-x * x) - std::exp(-x) + x * std::exp(-x));
  };
  auto dwidth = [](double x, double a) {
    return (1 - a * a) *
           (-4 * x * std::exp(-x * x) + std::exp(x) - std::exp(-x) + x * std::exp(-x));
  };
  return FuzzyFunction::endpoint(
      lo, [=](double x, double a) { return lo(x, a) + width(x, a); }, 0, 1, dlo,
      [=](double x, double a) { return dlo(x, a) + dwidth(x, a); });
}

// Switch locations of (2,4,5,8)(cos x - x^2/32): roots of g (orientation
// flips) and of g' (width slope flips), from a high-precision root solve.
constexpr double root_g = 1.50038918079;
constexpr double root_dg1 = 3.35270104792;
constexpr double root_dg2 = 5.90517352965;

// Sign changes of the gap function terms, from a high-precision root solve.
constexpr double root_q = 0.610333626054;
constexpr double root_w = 0.636683489260;
constexpr double root_p = 0.710506216920;


struct SmoothFamily {
  double amp, freq, phase, w0, w1, k;
  int power;

  double mid(double x) const { return amp * std::sin(freq * x + phase); }
  double dmid(double x) const { return amp * freq * std::cos(freq * x + phase); }
  double spread(double x) const { return w0 + w1 * std::cos(k * x) * std::cos(k * x); }
  double dspread(double x) const { return -2 * w1 * k * std::cos(k * x) * std::sin(k * x); }
  double shrink(double a) const { return std::pow(1 - a, power); }

  FuzzyFunction make(bool analytic) const {
    auto s = *this;
    LevelFn lo = [s](double x, double a) { return s.mid(x) - s.shrink(a) * s.spread(x); };
    LevelFn hi = [s](double x, double a) { return s.mid(x) + 0.5 * s.shrink(a) * s.spread(x); };
    if (!analytic) return FuzzyFunction::endpoint(lo, hi, -2, 2);
    return FuzzyFunction::endpoint(
        lo, hi, -2, 2, [s](double x, double a) { return s.dmid(x) - s.shrink(a) * s.dspread(x); },
        [s](double x, double a) { return s.dmid(x) + 0.5 * s.shrink(a) * s.dspread(x); });
  }
};

inline SmoothFamily random_family(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  return {0.5 + 2 * u(rng), 0.5 + 2 * u(rng), 6 * u(rng), 0.2 + u(rng), u(rng),
          0.3 + u(rng),     1 + static_cast<int>(2 * u(rng))};
}


constexpr double pi = std::numbers::pi;

inline FdeProblem make_problem(const std::string& rhs, const std::map<std::string, FuzzyNumber>& consts,
                        FuzzyNumber initial, double x0, double x1, FdeOptions opt = {}) {
  return {expr::bind_constants(expr::parse(rhs), consts), initial, x0, x1, opt};
}

// Y' = -Y + C cos x, C = (-2,1,4), Y(0) = (1,2,3) on [0,4].
inline FdeProblem decaying_cosine(FdeOptions opt = {}) {
  return make_problem("-Y + C*cos(x)", {{"C", FuzzyNumber::triangular(-2, 1, 4)}},
                      FuzzyNumber::triangular(1, 2, 3), 0, 4, opt);
}

// Y' = 0.05 Y + K, K = (-160,0,160), Y(0) = (3000,3500,4000) on [0,50].
inline FdeProblem savings(FdeOptions opt = {}) {
  return make_problem("0.05*Y + K", {{"K", FuzzyNumber::triangular(-160, 0, 160)}},
                      FuzzyNumber::triangular(3000, 3500, 4000), 0, 50, opt);
}

inline double bisect(double a, double b, const std::function<double(double)>& f) {
  double fa = f(a);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Level-wise envelope of c*S(x) + a*e^{-x} over the cuts of C and Y(0).
inline LevelInterval cosine_envelope(double x, double alpha) {
  const double s = (std::cos(x) + std::sin(x) - std::exp(-x)) / 2;
  const double cl = -2 + 3 * alpha, ch = 4 - 3 * alpha;
  return {std::min(cl * s, ch * s) + (1 + alpha) * std::exp(-x),
          std::max(cl * s, ch * s) + (3 - alpha) * std::exp(-x)};
}

inline double sup_error(const FuzzySolution& sol, const std::function<LevelInterval(double, double)>& ref,
                 bool relative = false) {
  double worst = 0;
  for (std::size_t i = 0; i < sol.x.size(); ++i) {
    for (std::size_t a = 0; a < sol.grid.size(); ++a) {
      const auto r = ref(sol.x[i], sol.grid[a]);
      const auto& c = sol.cuts[i][a];
      double e = std::max(std::abs(c.lo - r.lo), std::abs(c.hi - r.hi));
      if (relative) e /= std::max({1.0, std::abs(r.lo), std::abs(r.hi)});
      worst = std::max(worst, e);
    }
  }
  return worst;
}

// Coupled runs of decaying_cosine: the centre s = y+ + y- is cos+sin+3e^{-x}
// on every branch; the width is (1-alpha) u with u' = u + 6|cos x| on i_p and
// u' = -u - 6|cos x| on d_p, u(0) = 2.
struct CosineCoupledOracle {
  double x1, k1, k2, x2, k3;

  CosineCoupledOracle() {
    x1 = bisect(0, 1, [](double x) { return -3 * (std::cos(x) + std::sin(x)) + 5 * std::exp(-x); });
    k1 = 3 * (std::cos(x1) - std::sin(x1)) * std::exp(-x1);
    // Both forms equal 3 + (...) at pi/2, so continuity gives k2 = k1 e^pi.
    k2 = k1 * std::exp(pi);
    const double kk = k2;
    x2 = bisect(2, 3.5, [kk](double x) { return 3 * (std::cos(x) + std::sin(x)) + kk * std::exp(-x); });
    k3 = 3 * (std::sin(x2) - std::cos(x2)) * std::exp(-x2);
  }

  static double u_ip(double x) {
    if (x <= pi / 2) return 3 * (std::sin(x) - std::cos(x)) + 5 * std::exp(x);
    const double k = 5 + 6 * std::exp(-pi / 2);
    return -3 * (std::sin(x) - std::cos(x)) + k * std::exp(x);
  }

  double u_dp(double x) const {
    if (x <= x1) return -3 * (std::cos(x) + std::sin(x)) + 5 * std::exp(-x);
    if (x <= pi / 2) return 3 * (std::sin(x) - std::cos(x)) + k1 * std::exp(x);
    if (x <= x2) return 3 * (std::cos(x) + std::sin(x)) + k2 * std::exp(-x);
    return -3 * (std::sin(x) - std::cos(x)) + k3 * std::exp(x);
  }

  static LevelInterval cut(double x, double alpha, double u) {
    const double s = std::cos(x) + std::sin(x) + 3 * std::exp(-x);
    const double w = (1 - alpha) * std::max(u, 0.0);
    return {(s - w) / 2, (s + w) / 2};
  }
};

}  // namespace fuzznum::fixtures
