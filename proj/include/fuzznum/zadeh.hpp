#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fuzznum/fuzzy_number.hpp"

namespace fuzznum {

struct ZadehOptions {
  std::size_t samples = 1025;
  std::size_t golden_iterations = 80;
};

namespace detail {

// Golden-section search for the minimum of `f` on [lo, hi]; returns the
// smallest value seen, including the bracket ends.
template <class F>
double golden_min(F&& f, double lo, double hi, double f_lo, double f_hi, std::size_t iters) {
  constexpr double inv_phi = 0.6180339887498949;
  double best = std::min(f_lo, f_hi);
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (std::size_t k = 0; k < iters && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++k) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
    best = std::min({best, f1, f2});
  }
  return std::min({best, f1, f2});
}

}  // namespace detail

// Level-wise image of u under a continuous f: each cut is [min f, max f] over
// the source cut. Dense sampling finds candidate extrema, golden-section search
// polishes each interior one.
template <class F>
FuzzyNumber zadeh_extend_univariate(F&& f, const FuzzyNumber& u, const AlphaGrid& grid = {},
                                    const ZadehOptions& opt = {}) {
  const std::size_t n = std::max<std::size_t>(opt.samples, 3);
  std::vector<double> lo(grid.size()), hi(grid.size());
  std::vector<double> xs(n), fs(n);

  auto checked = [&f](double x) {
    const double y = f(x);
    if (!std::isfinite(y)) {
      throw Error(ErrorCode::non_finite_value, "function is not finite at x=" + std::to_string(x));
    }
    return y;
  };
  auto neg = [&checked](double x) { return -checked(x); };

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto c = u.cut(grid[k]);
    if (c.width() <= 0.0) {
      lo[k] = hi[k] = checked(c.lo);
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = (i + 1 == n) ? c.hi : c.lo + (c.hi - c.lo) * static_cast<double>(i) / (n - 1);
      fs[i] = checked(xs[i]);
    }
    double mn = std::min(fs.front(), fs.back());
    double mx = std::max(fs.front(), fs.back());
    for (std::size_t i = 1; i + 1 < n; ++i) {
      mn = std::min(mn, fs[i]);
      mx = std::max(mx, fs[i]);
      if (fs[i] <= fs[i - 1] && fs[i] <= fs[i + 1]) {
        mn = std::min(mn, detail::golden_min(checked, xs[i - 1], xs[i + 1], fs[i - 1], fs[i + 1],
                                             opt.golden_iterations));
      }
      if (fs[i] >= fs[i - 1] && fs[i] >= fs[i + 1]) {
        mx = std::max(mx, -detail::golden_min(neg, xs[i - 1], xs[i + 1], -fs[i - 1], -fs[i + 1],
                                              opt.golden_iterations));
      }
    }
    lo[k] = mn;
    hi[k] = mx;
  }

  // Points sampled inside an inner cut also lie in every outer cut, so the
  // outer extremes can only be at least as wide.
  for (std::size_t k = grid.size() - 1; k-- > 0;) {
    lo[k] = std::min(lo[k], lo[k + 1]);
    hi[k] = std::max(hi[k], hi[k + 1]);
  }
  return FuzzyNumber::sampled(grid, std::move(lo), std::move(hi));
}

}  // namespace fuzznum
