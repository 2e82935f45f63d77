#pragma once

#include <optional>
#include <vector>

#include "fuzznum/arith.hpp"
#include "fuzznum/derivative.hpp"
#include "fuzznum/quadrature.hpp"

namespace fuzznum {

inline constexpr double integral_validation_tolerance = 1e-8;

// Level-wise integral. The two representations give different results in
// general and are never converted into each other here.
inline FuzzyNumber integrate(const FuzzyFunction& f, double a, double b, const AlphaGrid& grid = {},
                             const QuadratureOptions& q = {}) {
  f.check_domain(a);
  f.check_domain(b);
  const std::size_t n = grid.size();
  std::vector<double> lo(n, 0.0), hi(n, 0.0);
  if (a == b) return FuzzyNumber::sampled(grid, std::move(lo), std::move(hi));

  if (f.mode() == Representation::coefficient) {
    std::vector<double> kernel_integrals;
    for (const auto& k : f.kernels()) kernel_integrals.push_back(integrate_scalar(k.value, a, b, q));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < kernel_integrals.size(); ++j) {
        const auto c = f.coefficients()[j].cut(grid[i]);
        lo[i] += std::min(c.lo * kernel_integrals[j], c.hi * kernel_integrals[j]);
        hi[i] += std::max(c.lo * kernel_integrals[j], c.hi * kernel_integrals[j]);
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double alpha = grid[i];
      const double l = integrate_scalar([&](double x) { return f.cut(x, alpha).lo; }, a, b, q);
      const double u = integrate_scalar([&](double x) { return f.cut(x, alpha).hi; }, a, b, q);
      lo[i] = std::min(l, u);
      hi[i] = std::max(l, u);
    }
  }
  return FuzzyNumber::sampled(grid, std::move(lo), std::move(hi), integral_validation_tolerance);
}

// Integral of the p-derivative built from the endpoint slopes: per alpha,
// [int min(f-', f+'), int max(f-', f+')].
inline FuzzyNumber integrate_p_derivative(const FuzzyFunction& f, double a, double b,
                                          const AlphaGrid& grid = {},
                                          const QuadratureOptions& q = {}) {
  const std::size_t n = grid.size();
  std::vector<double> lo(n, 0.0), hi(n, 0.0);
  for (std::size_t i = 0; i < n && a != b; ++i) {
    const double alpha = grid[i];
    lo[i] = integrate_scalar(
        [&](double x) {
          const auto s = f.endpoint_slopes(x, alpha);
          return std::min(s.lower, s.upper);
        },
        a, b, q);
    hi[i] = integrate_scalar(
        [&](double x) {
          const auto s = f.endpoint_slopes(x, alpha);
          return std::max(s.lower, s.upper);
        },
        a, b, q);
  }
  return FuzzyNumber::sampled(grid, std::move(lo), std::move(hi), integral_validation_tolerance);
}

struct NewtonLeibnizReport {
  std::vector<SwitchingPoint> switches;
  FuzzyNumber lhs;
  std::optional<FuzzyNumber> rhs;
  double distance = 0.0;
  bool holds = false;
  // Set when every F(d_i) is crisp: D(lhs, F(b) - F(a)).
  std::optional<double> crisp_distance;
};

struct NewtonLeibnizOptions {
  // Switch placement error enters the identity linearly, so refine further
  // than the default scan.
  ScanOptions scan{2001, 1e-10, {}};
  QuadratureOptions quadrature{};
  double tol = 1e-8;
};

// Compares the integral of F'_p with the sum of p-differences of F between
// consecutive switching points.
inline NewtonLeibnizReport newton_leibniz_check(const FuzzyFunction& f, double a, double b,
                                                const NewtonLeibnizOptions& opt = {}) {
  const auto& grid = opt.scan.classify.grid;
  NewtonLeibnizReport r;
  r.switches = find_switching_points(f, a, b, opt.scan);

  std::vector<double> knots{a};
  for (const auto& s : r.switches) {
    if (s.x > a && s.x < b) knots.push_back(s.x);
  }
  knots.push_back(b);

  std::optional<FuzzyNumber> lhs, rhs;
  bool all_crisp = true;
  bool rhs_ok = true;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    // Every segment must carry a p-derivative away from its ends.
    require_value(p_derivative(f, 0.5 * (knots[i - 1] + knots[i]), opt.scan.classify));
    auto piece = integrate_p_derivative(f, knots[i - 1], knots[i], grid, opt.quadrature);
    lhs = lhs ? arith(*lhs, piece, ArithOp::add, ArithSemantics::standard, grid) : piece;

    const auto hi = eval(f, knots[i], grid), lo = eval(f, knots[i - 1], grid);
    if (i + 1 < knots.size() && !hi.is_crisp(1e-9)) all_crisp = false;
    auto diff = p_difference(hi, lo, grid);
    if (!diff.exists) {
      rhs_ok = false;
      continue;
    }
    rhs = rhs ? arith(*rhs, *diff.result, ArithOp::add, ArithSemantics::standard, grid) : *diff.result;
  }
  r.lhs = *lhs;
  if (rhs_ok) {
    r.rhs = rhs;
    r.distance = metric(r.lhs, *r.rhs, grid);
    r.holds = r.distance < opt.tol;
  }
  if (all_crisp && knots.size() > 2) {
    const auto whole = arith(eval(f, b, grid), eval(f, a, grid), ArithOp::sub,
                             ArithSemantics::standard, grid);
    r.crisp_distance = metric(r.lhs, whole, grid);
  }
  return r;
}

}  // namespace fuzznum
