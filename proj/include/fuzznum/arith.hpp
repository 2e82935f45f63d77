#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string_view>

#include "fuzznum/fuzzy_number.hpp"

namespace fuzznum {

enum class ArithOp { add, sub, mul, div };

// standard  - level-wise interval arithmetic (Minkowski image)
// parametric - one parameter per operand occurrence: identical to standard
// cia       - one parameter per distinct operand: a self-operation shares it
// slcia     - a single parameter shared by every operand
enum class ArithSemantics { standard, parametric, cia, slcia };

enum class DifferenceCondition { cond9, cond10, both, neither };

struct DifferenceReport {
  std::optional<FuzzyNumber> result;
  bool exists = false;
  DifferenceCondition condition_used = DifferenceCondition::neither;
};

constexpr std::string_view to_string(ArithSemantics s) {
  switch (s) {
    case ArithSemantics::standard: return "standard";
    case ArithSemantics::parametric: return "parametric";
    case ArithSemantics::cia: return "cia";
    case ArithSemantics::slcia: return "slcia";
  }
  return "?";
}

constexpr std::string_view to_string(DifferenceCondition c) {
  switch (c) {
    case DifferenceCondition::cond9: return "cond9";
    case DifferenceCondition::cond10: return "cond10";
    case DifferenceCondition::both: return "both";
    case DifferenceCondition::neither: return "neither";
  }
  return "?";
}

namespace detail {

constexpr double apply(ArithOp op, double a, double b) noexcept {
  switch (op) {
    case ArithOp::add: return a + b;
    case ArithOp::sub: return a - b;
    case ArithOp::mul: return a * b;
    case ArithOp::div: return a / b;
  }
  return 0.0;
}

// Extremes over (t1, t2) in [0,1]^2 with independent parameters. The
// expression is affine in t1 and monotone in t2, so corners suffice.
inline LevelInterval corner_hull(ArithOp op, const LevelInterval& a, const LevelInterval& b) {
  const std::array<double, 4> v{apply(op, a.lo, b.lo), apply(op, a.lo, b.hi),
                                apply(op, a.hi, b.lo), apply(op, a.hi, b.hi)};
  return {*std::min_element(v.begin(), v.end()), *std::max_element(v.begin(), v.end())};
}

// Extremes over a single shared t of a(t) op b(t), both non-decreasing.
inline LevelInterval shared_hull(ArithOp op, const LevelInterval& a, const LevelInterval& b) {
  double lo = std::min(apply(op, a.lo, b.lo), apply(op, a.hi, b.hi));
  double hi = std::max(apply(op, a.lo, b.lo), apply(op, a.hi, b.hi));
  if (op == ArithOp::mul) {
    // (a0 + t da)(b0 + t db) is quadratic in t.
    const double da = a.width(), db = b.width();
    const double curv = da * db;
    if (curv != 0.0) {
      const double t = -(a.lo * db + b.lo * da) / (2.0 * curv);
      if (t > 0.0 && t < 1.0) {
        const double v = (a.lo + t * da) * (b.lo + t * db);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  // Division: (a0 + t da)/(b0 + t db) is monotone in t when b does not vanish.
  return {lo, hi};
}

inline double magnitude(const LevelInterval& c) { return std::max({1.0, std::abs(c.lo), std::abs(c.hi)}); }

}  // namespace detail

// Level-wise arithmetic under the chosen semantics, sampled on `grid`.
inline FuzzyNumber arith(const FuzzyNumber& a, const FuzzyNumber& b, ArithOp op,
                         ArithSemantics sem = ArithSemantics::standard,
                         const AlphaGrid& grid = {}) {
  if (op == ArithOp::div) {
    const auto s = b.support();
    if (s.lo <= 0.0 && 0.0 <= s.hi) {
      throw Error(ErrorCode::division_by_spanning_zero, "0 lies in the support of the divisor");
    }
  }
  const bool shared = sem == ArithSemantics::slcia ||
                      (sem == ArithSemantics::cia && equal_on(a, b, grid));
  std::vector<LevelInterval> cuts;
  cuts.reserve(grid.size());
  for (double alpha : grid) {
    const auto ca = a.cut(alpha), cb = b.cut(alpha);
    cuts.push_back(shared ? detail::shared_hull(op, ca, cb) : detail::corner_hull(op, ca, cb));
  }
  return FuzzyNumber::from_cuts(grid, cuts);
}

inline FuzzyNumber operator+(const FuzzyNumber& a, const FuzzyNumber& b) { return arith(a, b, ArithOp::add); }
inline FuzzyNumber operator-(const FuzzyNumber& a, const FuzzyNumber& b) { return arith(a, b, ArithOp::sub); }
inline FuzzyNumber operator*(const FuzzyNumber& a, const FuzzyNumber& b) { return arith(a, b, ArithOp::mul); }
inline FuzzyNumber operator/(const FuzzyNumber& a, const FuzzyNumber& b) { return arith(a, b, ArithOp::div); }

// λ·A. Closed-form shapes stay closed-form; a negative factor swaps endpoints.
inline FuzzyNumber scalar_mul(double lambda, const FuzzyNumber& a) {
  return std::visit(
      [lambda](const auto& s) -> FuzzyNumber {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Triangular>) {
          return lambda >= 0 ? FuzzyNumber::triangular(lambda * s.a, lambda * s.b, lambda * s.c)
                             : FuzzyNumber::triangular(lambda * s.c, lambda * s.b, lambda * s.a);
        } else if constexpr (std::is_same_v<S, Trapezoidal>) {
          return lambda >= 0
                     ? FuzzyNumber::trapezoidal(lambda * s.a, lambda * s.b, lambda * s.c, lambda * s.d)
                     : FuzzyNumber::trapezoidal(lambda * s.d, lambda * s.c, lambda * s.b, lambda * s.a);
        } else {
          std::vector<double> lo(s.lower.size()), hi(s.upper.size());
          for (std::size_t i = 0; i < lo.size(); ++i) {
            lo[i] = lambda >= 0 ? lambda * s.lower[i] : lambda * s.upper[i];
            hi[i] = lambda >= 0 ? lambda * s.upper[i] : lambda * s.lower[i];
          }
          return FuzzyNumber::sampled(s.grid, std::move(lo), std::move(hi));
        }
      },
      a.shape());
}

inline FuzzyNumber operator*(double lambda, const FuzzyNumber& a) { return scalar_mul(lambda, a); }

namespace detail {

// c(t, alpha) = a(t, alpha) - b(t, alpha) at t = 0 and t = 1, both operands
// in non-decreasing form.
struct ParamDifference {
  std::vector<double> at0, at1;
};

inline ParamDifference param_difference(const FuzzyNumber& a, const FuzzyNumber& b,
                                        const AlphaGrid& grid) {
  ParamDifference d{std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto ca = a.cut(grid[i]), cb = b.cut(grid[i]);
    d.at0[i] = ca.lo - cb.lo;
    d.at1[i] = ca.hi - cb.hi;
  }
  return d;
}

}  // namespace detail

inline constexpr double difference_tolerance = 1e-9;

// p-difference: exists when c(0,.) and c(1,.) move in opposite directions in
// alpha with the matching sign of the core width (forward differences).
inline DifferenceReport p_difference(const FuzzyNumber& a, const FuzzyNumber& b,
                                     const AlphaGrid& grid = {},
                                     double tol = difference_tolerance) {
  const auto c = detail::param_difference(a, b, grid);
  const std::size_t n = grid.size();
  bool c0_up = true, c0_down = true, c1_up = true, c1_down = true;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d0 = c.at0[i + 1] - c.at0[i];
    const double d1 = c.at1[i + 1] - c.at1[i];
    c0_up = c0_up && d0 >= -tol;
    c0_down = c0_down && d0 <= tol;
    c1_up = c1_up && d1 >= -tol;
    c1_down = c1_down && d1 <= tol;
  }
  const double core_slope = c.at1[n - 1] - c.at0[n - 1];
  const bool cond9 = c0_up && c1_down && core_slope >= -tol;
  const bool cond10 = c0_down && c1_up && core_slope <= tol;

  DifferenceReport report;
  if (!cond9 && !cond10) return report;
  report.exists = true;
  report.condition_used = cond9 && cond10 ? DifferenceCondition::both
                          : cond9         ? DifferenceCondition::cond9
                                          : DifferenceCondition::cond10;
  std::vector<double> lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = std::min(c.at0[i], c.at1[i]);
    hi[i] = std::max(c.at0[i], c.at1[i]);
  }
  report.result = FuzzyNumber::sampled(grid, std::move(lo), std::move(hi), tol);
  return report;
}

// gp-difference: running inf/sup over beta >= alpha of the t-extremes of c.
inline FuzzyNumber gp_difference(const FuzzyNumber& a, const FuzzyNumber& b,
                                 const AlphaGrid& grid = {}) {
  const auto c = detail::param_difference(a, b, grid);
  const std::size_t n = grid.size();
  std::vector<double> lo(n), hi(n);
  double run_lo = std::min(c.at0[n - 1], c.at1[n - 1]);
  double run_hi = std::max(c.at0[n - 1], c.at1[n - 1]);
  for (std::size_t i = n; i-- > 0;) {
    run_lo = std::min(run_lo, std::min(c.at0[i], c.at1[i]));
    run_hi = std::max(run_hi, std::max(c.at0[i], c.at1[i]));
    lo[i] = run_lo;
    hi[i] = run_hi;
  }
  return FuzzyNumber::sampled(grid, std::move(lo), std::move(hi));
}

// Sup over the grid of the Hausdorff distance between cuts.
inline double metric(const FuzzyNumber& a, const FuzzyNumber& b, const AlphaGrid& grid = {}) {
  double d = 0.0;
  for (double alpha : grid) {
    const auto ca = a.cut(alpha), cb = b.cut(alpha);
    d = std::max({d, std::abs(ca.lo - cb.lo), std::abs(ca.hi - cb.hi)});
  }
  return d;
}

}  // namespace fuzznum
