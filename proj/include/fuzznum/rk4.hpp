#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fuzznum/error.hpp"

namespace fuzznum {

struct Trajectory {
  std::vector<double> x;
  std::vector<double> y;
};

template <class F>
double rk4_step(F& f, double x, double y, double h) {
  const double k1 = f(x, y);
  const double k2 = f(x + 0.5 * h, y + 0.5 * h * k1);
  const double k3 = f(x + 0.5 * h, y + 0.5 * h * k2);
  const double k4 = f(x + h, y + h * k3);
  return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline std::size_t step_count(double x0, double x1, double h) {
  const double n = std::ceil((x1 - x0) / h - 1e-9);
  return n < 1 ? 1 : static_cast<std::size_t>(n);
}

// Fixed-step RK4 for a scalar crisp ODE. With h <= 0 the step defaults to
// (x1 - x0) / 4000; otherwise h is shrunk to divide the span evenly.
template <class F>
Trajectory crisp_reference_solve(F&& f, double y0, double x0, double x1, double h = 0.0) {
  if (!(x1 > x0)) throw Error(ErrorCode::invalid_spec, "span must satisfy x0 < x_end");
  const std::size_t n = h > 0 ? step_count(x0, x1, h) : 4000;
  const double dx = (x1 - x0) / static_cast<double>(n);
  Trajectory t;
  t.x.resize(n + 1);
  t.y.resize(n + 1);
  t.x[0] = x0;
  t.y[0] = y0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = x0 + static_cast<double>(i) * dx;
    t.y[i + 1] = rk4_step(f, x, t.y[i], dx);
    t.x[i + 1] = i + 1 == n ? x1 : x0 + static_cast<double>(i + 1) * dx;
    if (!std::isfinite(t.y[i + 1])) {
      throw Error(ErrorCode::integration_blowup, "non-finite state at x=" + std::to_string(t.x[i + 1]));
    }
  }
  return t;
}

}  // namespace fuzznum
