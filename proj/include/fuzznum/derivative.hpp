#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "fuzznum/fuzzy_function.hpp"

namespace fuzznum {

enum class Differentiability { i_p, d_p, both, neither };
enum class SwitchKind { typeI, typeII };

constexpr std::string_view to_string(Differentiability d) {
  switch (d) {
    case Differentiability::i_p: return "i_p";
    case Differentiability::d_p: return "d_p";
    case Differentiability::both: return "both";
    case Differentiability::neither: return "neither";
  }
  return "?";
}

constexpr std::string_view to_string(SwitchKind k) {
  return k == SwitchKind::typeI ? "typeI" : "typeII";
}

struct SwitchingPoint {
  double x;
  SwitchKind kind;
};

inline constexpr double classification_tolerance = 1e-8;
// Derivative results carry central-difference noise well above 1e-12.
inline constexpr double derivative_validation_tolerance = 1e-8;

struct ClassifyOptions {
  AlphaGrid grid{};
  double tol = classification_tolerance;
};

struct ConditionCheck {
  bool i_p = false;
  bool d_p = false;
  // First failing condition of each block, empty when the block holds.
  std::string i_fail, d_fail;
};

namespace detail {

inline std::vector<EndpointSlopes> slopes_on(const FuzzyFunction& f, double x, const AlphaGrid& grid) {
  std::vector<EndpointSlopes> s;
  s.reserve(grid.size());
  for (double alpha : grid) s.push_back(f.endpoint_slopes(x, alpha));
  return s;
}

// Sign tests on the alpha-differences of the endpoint slopes and on the
// slope of the core width.
inline ConditionCheck check_conditions(const std::vector<EndpointSlopes>& s, double tol) {
  bool l_up = true, l_down = true, u_up = true, u_down = true;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double dl = s[i + 1].lower - s[i].lower;
    const double du = s[i + 1].upper - s[i].upper;
    l_up = l_up && dl >= -tol;
    l_down = l_down && dl <= tol;
    u_up = u_up && du >= -tol;
    u_down = u_down && du <= tol;
  }
  const double core = s.back().upper - s.back().lower;
  ConditionCheck c;
  if (!l_up) c.i_fail = "lower slope decreases in alpha";
  else if (!u_down) c.i_fail = "upper slope increases in alpha";
  else if (core < -tol) c.i_fail = "core width decreases";
  if (!l_down) c.d_fail = "lower slope increases in alpha";
  else if (!u_up) c.d_fail = "upper slope decreases in alpha";
  else if (core > tol) c.d_fail = "core width increases";
  c.i_p = c.i_fail.empty();
  c.d_p = c.d_fail.empty();
  return c;
}

inline Differentiability to_class(const ConditionCheck& c) {
  if (c.i_p && c.d_p) return Differentiability::both;
  if (c.i_p) return Differentiability::i_p;
  if (c.d_p) return Differentiability::d_p;
  return Differentiability::neither;
}

}  // namespace detail

inline Differentiability classify(const FuzzyFunction& f, double x, const ClassifyOptions& opt = {}) {
  return detail::to_class(detail::check_conditions(detail::slopes_on(f, x, opt.grid), opt.tol));
}

struct PDerivativeReport {
  std::optional<FuzzyNumber> value;
  Differentiability classification = Differentiability::neither;
  std::string failing_condition;
};

// Endpoint mode: [f-', f+'] (i_p) or [f+', f-'] (d_p). Coefficient mode takes
// the corner hull of sum_j c_j g_j'; the classification is always read from
// the endpoint functions of the level sets.
inline PDerivativeReport p_derivative(const FuzzyFunction& f, double x, const ClassifyOptions& opt = {}) {
  f.check_domain(x);
  const auto s = detail::slopes_on(f, x, opt.grid);
  const auto check = detail::check_conditions(s, opt.tol);
  PDerivativeReport r;
  r.classification = detail::to_class(check);
  if (r.classification == Differentiability::neither) {
    r.failing_condition = "i_p: " + check.i_fail + "; d_p: " + check.d_fail;
    return r;
  }
  std::vector<double> lo(s.size()), hi(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (f.mode() == Representation::coefficient) {
      const auto h = f.slope_hull(x, opt.grid[i]);
      lo[i] = h.lo;
      hi[i] = h.hi;
    } else if (r.classification == Differentiability::i_p) {
      lo[i] = s[i].lower;
      hi[i] = s[i].upper;
    } else if (r.classification == Differentiability::d_p) {
      lo[i] = s[i].upper;
      hi[i] = s[i].lower;
    } else {
      lo[i] = std::min(s[i].lower, s[i].upper);
      hi[i] = std::max(s[i].lower, s[i].upper);
    }
  }
  r.value = FuzzyNumber::sampled(opt.grid, std::move(lo), std::move(hi),
                                 derivative_validation_tolerance);
  return r;
}

inline FuzzyNumber require_value(const PDerivativeReport& r) {
  if (!r.value) throw Error(ErrorCode::not_p_differentiable, r.failing_condition);
  return *r.value;
}

struct ScanOptions {
  std::size_t points = 2001;
  double x_tol = 1e-6;
  ClassifyOptions classify{};
};

struct ClassSegment {
  double from;
  double to;
  Differentiability kind;
};

namespace detail {

inline bool definite(Differentiability d) {
  return d == Differentiability::i_p || d == Differentiability::d_p;
}

inline double scan_x(double a, double b, std::size_t i, std::size_t n) {
  return i + 1 == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
}

// Moves lo/hi together while the left class keeps holding on the lo side.
template <class Pred>
double bisect_boundary(double lo, double hi, double x_tol, Pred&& holds_left) {
  while (hi - lo > x_tol) {
    const double mid = 0.5 * (lo + hi);
    if (holds_left(mid)) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Runs of constant classification over [a, b]. "both" points are absorbed by
// the surrounding run; boundaries are refined by bisection.
inline std::vector<ClassSegment> classification_segments(const FuzzyFunction& f, double a, double b,
                                                         const ScanOptions& opt = {}) {
  const std::size_t n = std::max<std::size_t>(opt.points, 2);
  std::vector<ClassSegment> out;
  double last_x = a;
  std::optional<Differentiability> current;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = detail::scan_x(a, b, i, n);
    const auto k = classify(f, x, opt.classify);
    if (k == Differentiability::both) {
      last_x = x;
      continue;
    }
    if (!current) {
      out.push_back({a, x, k});
      current = k;
    } else if (k != *current) {
      const auto left = *current;
      const double edge = detail::bisect_boundary(last_x, x, opt.x_tol, [&](double s) {
        return classify(f, s, opt.classify) == left;
      });
      out.back().to = edge;
      out.push_back({edge, x, k});
      current = k;
    }
    out.back().to = x;
    last_x = x;
  }
  if (out.empty()) out.push_back({a, b, Differentiability::both});
  out.back().to = b;
  return out;
}

// Direct i_p <-> d_p transitions. A run of "neither" in between is a gap of
// p-differentiability, not a switching point.
inline std::vector<SwitchingPoint> find_switching_points(const FuzzyFunction& f, double a, double b,
                                                         const ScanOptions& opt = {}) {
  const std::size_t n = std::max<std::size_t>(opt.points, 2);
  std::vector<SwitchingPoint> out;
  std::optional<Differentiability> last;
  double last_x = a;
  bool gap = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = detail::scan_x(a, b, i, n);
    const auto k = classify(f, x, opt.classify);
    if (k == Differentiability::neither) {
      gap = true;
      continue;
    }
    if (!detail::definite(k)) continue;
    if (last && k != *last && !gap) {
      const auto left = *last;
      const double edge = detail::bisect_boundary(last_x, x, opt.x_tol, [&](double s) {
        return classify(f, s, opt.classify) == left;
      });
      out.push_back({edge, left == Differentiability::i_p ? SwitchKind::typeI : SwitchKind::typeII});
    }
    last = k;
    last_x = x;
    gap = false;
  }
  return out;
}

inline std::vector<SwitchingPoint> find_switching_points(const FuzzyFunction& f,
                                                         const ScanOptions& opt = {}) {
  return find_switching_points(f, f.domain_lo(), f.domain_hi(), opt);
}

// Per alpha, the running inf/sup over beta >= alpha of the slope hull.
inline FuzzyNumber gp_derivative(const FuzzyFunction& f, double x, const AlphaGrid& grid = {}) {
  f.check_domain(x);
  const std::size_t n = grid.size();
  std::vector<double> lo(n), hi(n);
  double run_lo = 0.0, run_hi = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const auto h = f.slope_hull(x, grid[i]);
    run_lo = i + 1 == n ? h.lo : std::min(run_lo, h.lo);
    run_hi = i + 1 == n ? h.hi : std::max(run_hi, h.hi);
    lo[i] = run_lo;
    hi[i] = run_hi;
  }
  return FuzzyNumber::sampled(grid, std::move(lo), std::move(hi), derivative_validation_tolerance);
}

namespace detail {

// Which parametric branch gives each endpoint of the gp-derivative, and
// whether the beta-envelope is binding on either side.
struct GpSignature {
  int orientation;
  bool lower_active;
  bool upper_active;
};

inline GpSignature gp_signature(const FuzzyFunction& f, double x, const AlphaGrid& grid, double tol) {
  const std::size_t n = grid.size();
  GpSignature sig{0, false, false};
  double run_lo = 0.0, run_hi = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const auto s = f.endpoint_slopes(x, grid[i]);
    const double lo = std::min(s.lower, s.upper), hi = std::max(s.lower, s.upper);
    if (i + 1 == n) {
      run_lo = lo;
      run_hi = hi;
    }
    sig.lower_active = sig.lower_active || run_lo < lo - tol;
    sig.upper_active = sig.upper_active || run_hi > hi + tol;
    run_lo = std::min(run_lo, lo);
    run_hi = std::max(run_hi, hi);
    if (i == 0) {
      const double d = s.upper - s.lower;
      sig.orientation = std::abs(d) <= tol ? 0 : (d > 0.0 ? 1 : -1);
    }
  }
  return sig;
}

// A zero orientation (endpoint slopes touching at alpha=0) fits either side.
inline bool compatible(const GpSignature& a, const GpSignature& b) {
  return a.lower_active == b.lower_active && a.upper_active == b.upper_active &&
         (a.orientation == b.orientation || a.orientation == 0 || b.orientation == 0);
}

}  // namespace detail

// Points where the piecewise formula of the gp-derivative changes.
inline std::vector<double> gp_derivative_breakpoints(const FuzzyFunction& f, double a, double b,
                                                     const ScanOptions& opt = {},
                                                     double active_tol = 1e-12) {
  const std::size_t n = std::max<std::size_t>(opt.points, 2);
  const auto& grid = opt.classify.grid;
  std::vector<double> out;
  double prev_x = a;
  auto prev = detail::gp_signature(f, a, grid, active_tol);
  for (std::size_t i = 1; i < n; ++i) {
    const double x = detail::scan_x(a, b, i, n);
    auto sig = detail::gp_signature(f, x, grid, active_tol);
    if (!detail::compatible(sig, prev)) {
      const auto left = prev;
      out.push_back(detail::bisect_boundary(prev_x, x, opt.x_tol, [&](double s) {
        return detail::compatible(detail::gp_signature(f, s, grid, active_tol), left);
      }));
    } else if (sig.orientation == 0) {
      sig.orientation = prev.orientation;
    }
    prev = sig;
    prev_x = x;
  }
  return out;
}

}  // namespace fuzznum
