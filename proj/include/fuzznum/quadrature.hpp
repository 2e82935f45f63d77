#pragma once

#include <cmath>
#include <string>

#include "fuzznum/error.hpp"

namespace fuzznum {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_depth = 50;
};

namespace detail {

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth, bool& ok) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (!std::isfinite(delta)) {
    ok = false;
    return left + right;
  }
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) {
    ok = false;
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, ok) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, ok);
}

}  // namespace detail

// Adaptive Simpson on [a, b]; b < a integrates backwards. The interval is
// presplit into a few panels so that symmetric integrands cannot fool the
// first error estimate.
template <class F>
double integrate_scalar(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  if (a == b) return 0.0;
  if (b < a) return -integrate_scalar(f, b, a, opt);
  constexpr int panels = 8;
  const double h = (b - a) / panels;
  double total = 0.0;
  bool ok = true;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h;
    const double hi = k + 1 == panels ? b : lo + h;
    const double flo = f(lo), fhi = f(hi), fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    total += detail::simpson_step(f, lo, hi, flo, fm, fhi, whole, opt.abs_tol / panels,
                                  opt.max_depth, ok);
  }
  if (!ok || !std::isfinite(total)) {
    throw Error(ErrorCode::quadrature_failure,
                "adaptive Simpson did not reach tolerance on [" + std::to_string(a) + ", " +
                    std::to_string(b) + "]");
  }
  return total;
}

}  // namespace fuzznum
