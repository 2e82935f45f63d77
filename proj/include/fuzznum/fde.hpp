#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "fuzznum/alpha_grid.hpp"
#include "fuzznum/derivative.hpp"
#include "fuzznum/detail/parallel.hpp"
#include "fuzznum/error.hpp"
#include "fuzznum/expr.hpp"
#include "fuzznum/fuzzy_number.hpp"
#include "fuzznum/rk4.hpp"

namespace fuzznum {

enum class FdeMethod { parametric, coupled_i, coupled_d };

constexpr std::string_view to_string(FdeMethod m) {
  switch (m) {
    case FdeMethod::parametric: return "parametric";
    case FdeMethod::coupled_i: return "coupled-i";
    case FdeMethod::coupled_d: return "coupled-d";
  }
  return "?";
}

constexpr double level_set_tolerance = 1e-6;
constexpr double width_tolerance = 1e-9;
constexpr double width_slope_tolerance = 1e-8;

struct FdeOptions {
  AlphaGrid grid;
  double step = 0.0;             // <= 0: (x_end - x0) / 4000
  std::size_t param_grid = 5;    // samples per parameter axis beyond the corners
  bool force_grid = false;       // sample the grid even when corners suffice
  double switch_tol = 1e-9;      // bracket width for located events
};

// Y' = rhs(x, Y; C), Y(x0) = initial. The rhs slots carry the coefficients.
struct FdeProblem {
  expr::BoundExpr rhs;
  FuzzyNumber initial;
  double x0 = 0.0;
  double x_end = 1.0;
  FdeOptions options;
};

struct BranchSegment {
  double from = 0.0;
  double to = 0.0;
  Differentiability branch = Differentiability::i_p;
  bool reset = false;  // entered by returning to the start branch
};

struct FuzzySolution {
  AlphaGrid grid;
  std::vector<double> x;
  std::vector<std::vector<LevelInterval>> cuts;  // [x index][alpha index]
  std::vector<SwitchingPoint> switches;
  std::vector<double> resets;
  std::vector<BranchSegment> branches;
  std::vector<double> envelope_crossings;  // alpha = 0 envelope changes its extremal sample
  bool corner_fast_path = false;

  FuzzyNumber at(std::size_t i) const { return FuzzyNumber::from_cuts(grid, cuts[i]); }

  // Linear interpolation in x at grid level `a`.
  LevelInterval cut(double xv, std::size_t a) const {
    if (xv <= x.front()) return cuts.front()[a];
    if (xv >= x.back()) return cuts.back()[a];
    const auto it = std::upper_bound(x.begin(), x.end(), xv);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    const double w = (xv - x[i]) / (x[i + 1] - x[i]);
    const auto& p = cuts[i][a];
    const auto& q = cuts[i + 1][a];
    return {p.lo + w * (q.lo - p.lo), p.hi + w * (q.hi - p.hi)};
  }
};

namespace detail {

inline void validate_problem(const FdeProblem& p) {
  if (!(std::isfinite(p.x0) && std::isfinite(p.x_end) && p.x0 < p.x_end)) {
    throw Error(ErrorCode::invalid_spec, "span must satisfy x0 < x_end");
  }
  if (p.rhs.coefficients().size() != p.rhs.slots()) {
    throw Error(ErrorCode::invalid_spec, "rhs slots do not match the coefficient count");
  }
  if (p.options.param_grid == 1) {
    throw Error(ErrorCode::invalid_spec, "param_grid needs at least 2 points per axis (or 0)");
  }
}

inline std::size_t fde_steps(const FdeProblem& p) {
  return p.options.step > 0 ? step_count(p.x0, p.x_end, p.options.step) : 4000;
}

inline std::vector<double> x_grid(const FdeProblem& p) {
  const std::size_t n = fde_steps(p);
  std::vector<double> x(n + 1);
  const double h = (p.x_end - p.x0) / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) x[i] = p.x0 + static_cast<double>(i) * h;
  x.back() = p.x_end;
  return x;
}

[[noreturn]] inline void blowup(double x) {
  throw Error(ErrorCode::integration_blowup, "non-finite state at x=" + std::to_string(x));
}

inline void check_level_sets(const FuzzySolution& s) {
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    const auto& c = s.cuts[i];
    for (std::size_t a = 0; a < c.size(); ++a) {
      const double scale = std::max({1.0, std::abs(c[a].lo), std::abs(c[a].hi)});
      const double tol = level_set_tolerance * scale;
      bool ok = c[a].lo <= c[a].hi + tol;
      if (ok && a > 0) ok = c[a].lo >= c[a - 1].lo - tol && c[a].hi <= c[a - 1].hi + tol;
      if (!ok) {
        const double lo_a = s.grid[a == 0 ? 0 : a - 1];
        throw Error(ErrorCode::invalid_level_set,
                    "cuts at alpha=" + std::to_string(lo_a) + " and alpha=" +
                        std::to_string(s.grid[a]) + " are not nested at x=" +
                        std::to_string(s.x[i]));
      }
    }
  }
}

// Points of [0,1]^dims: corners, or a uniform grid with m points per axis.
inline std::vector<std::vector<double>> parameter_samples(std::size_t dims, std::size_t m) {
  const std::size_t per = m < 2 ? 2 : m;
  std::size_t total = 1;
  for (std::size_t d = 0; d < dims; ++d) total *= per;
  std::vector<std::vector<double>> out(total, std::vector<double>(dims));
  for (std::size_t s = 0; s < total; ++s) {
    std::size_t r = s;
    for (std::size_t d = 0; d < dims; ++d) {
      out[s][d] = static_cast<double>(r % per) / static_cast<double>(per - 1);
      r /= per;
    }
  }
  return out;
}

inline double interpolate_root(double x0, double x1, double d0, double d1) {
  if (d0 == d1) return 0.5 * (x0 + x1);
  return std::clamp(x0 + (x1 - x0) * d0 / (d0 - d1), x0, x1);
}

}  // namespace detail

// Approach 1: crisp family over (t'', t') with pointwise min/max envelope.
inline FuzzySolution solve_parametric(const FdeProblem& p) {
  detail::validate_problem(p);
  const auto& rhs = p.rhs;
  const std::size_t k = rhs.slots();

  FuzzySolution sol;
  sol.grid = p.options.grid;
  sol.x = detail::x_grid(p);
  const std::size_t n = sol.x.size() - 1;
  const double h = (p.x_end - p.x0) / static_cast<double>(n);

  const auto support = p.initial.support();
  const double margin = std::max(1.0, support.width());
  const auto affinity =
      expr::probe_affinity(rhs, {p.x0, p.x_end}, {support.lo - margin, support.hi + margin});
  sol.corner_fast_path = affinity.all() && !p.options.force_grid;
  const auto samples =
      detail::parameter_samples(k + 1, sol.corner_fast_path ? 2 : p.options.param_grid);

  // One sample trajectory at level alpha; sample[0] is t'', the rest t'.
  auto trajectory = [&](const std::vector<double>& sample, double alpha, auto&& visit) {
    std::vector<double> values(k);
    rhs.slot_values(std::span<const double>(sample).subspan(1), alpha, values);
    auto f = [&](double x, double y) { return rhs.eval_values(x, y, alpha, values); };
    double y = p.initial.value(sample[0], alpha);
    visit(std::size_t{0}, y);
    for (std::size_t i = 0; i < n; ++i) {
      y = rk4_step(f, sol.x[i], y, h);
      if (!std::isfinite(y)) detail::blowup(sol.x[i + 1]);
      visit(i + 1, y);
    }
  };

  const std::size_t levels = sol.grid.size();
  sol.cuts.assign(n + 1, std::vector<LevelInterval>(levels));
  std::vector<std::size_t> arg_lo(n + 1), arg_hi(n + 1);

  detail::parallel_for(levels, [&](std::size_t a) {
    const double alpha = sol.grid[a];
    std::vector<double> lo(n + 1, std::numeric_limits<double>::infinity());
    std::vector<double> hi(n + 1, -std::numeric_limits<double>::infinity());
    for (std::size_t s = 0; s < samples.size(); ++s) {
      trajectory(samples[s], alpha, [&](std::size_t i, double y) {
        if (y < lo[i]) {
          lo[i] = y;
          if (a == 0) arg_lo[i] = s;
        }
        if (y > hi[i]) {
          hi[i] = y;
          if (a == 0) arg_hi[i] = s;
        }
      });
    }
    for (std::size_t i = 0; i <= n; ++i) sol.cuts[i][a] = {lo[i], hi[i]};
  });

  // Envelope crossings at alpha = 0. The step from x0 is skipped because
  // samples sharing t'' tie there.
  std::vector<double> events;
  auto locate = [&](const std::vector<std::size_t>& arg) {
    for (std::size_t i = 2; i <= n; ++i) {
      if (arg[i] == arg[i - 1]) continue;
      double a0 = 0, a1 = 0, b0 = 0, b1 = 0;
      trajectory(samples[arg[i - 1]], sol.grid[0], [&](std::size_t j, double y) {
        if (j == i - 1) a0 = y;
        if (j == i) a1 = y;
      });
      trajectory(samples[arg[i]], sol.grid[0], [&](std::size_t j, double y) {
        if (j == i - 1) b0 = y;
        if (j == i) b1 = y;
      });
      events.push_back(detail::interpolate_root(sol.x[i - 1], sol.x[i], a0 - b0, a1 - b1));
    }
  };
  locate(arg_lo);
  locate(arg_hi);
  std::sort(events.begin(), events.end());
  for (double e : events) {
    if (sol.envelope_crossings.empty() || e - sol.envelope_crossings.back() > 2 * h) {
      sol.envelope_crossings.push_back(e);
    }
  }

  detail::check_level_sets(sol);
  return sol;
}

namespace detail {

// Joint state of the coupled endpoint systems over all alpha levels.
class CoupledSystem {
 public:
  explicit CoupledSystem(const FdeProblem& p) : p_(p), levels_(p.options.grid.size()) {
    const std::size_t k = p.rhs.slots();
    const auto corners = parameter_samples(k, 2);
    corners_ = corners.size();
    values_.resize(levels_ * corners_ * k);
    for (std::size_t a = 0; a < levels_; ++a) {
      for (std::size_t c = 0; c < corners_; ++c) {
        p.rhs.slot_values(corners[c], p.options.grid[a], slot(a, c));
      }
    }
    half_ = p.options.grid.bracket(0.5);
    if (std::abs(p.options.grid[half_ + 1] - 0.5) < std::abs(p.options.grid[half_] - 0.5)) ++half_;
  }

  struct Ends {
    double lo, hi;
    std::size_t arg_lo, arg_hi;  // corner indices
  };

  // f-minus and f-plus: extremes over t-corners and Y in {y-, y+}.
  Ends ends(double x, std::size_t a, double ylo, double yhi) const {
    Ends e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0, 0};
    const double alpha = p_.options.grid[a];
    for (std::size_t c = 0; c < corners_; ++c) {
      for (double y : {ylo, yhi}) {
        const double v = p_.rhs.eval_values(x, y, alpha, slot(a, c));
        if (!std::isfinite(v)) blowup(x);
        if (v < e.lo) {
          e.lo = v;
          e.arg_lo = c;
        }
        if (v > e.hi) {
          e.hi = v;
          e.arg_hi = c;
        }
      }
    }
    return e;
  }

  using State = std::vector<double>;  // lo_0, hi_0, lo_1, hi_1, ...

  void derivative(double x, const State& s, Differentiability b, State& out) const {
    out.resize(s.size());
    for (std::size_t a = 0; a < levels_; ++a) {
      const Ends e = ends(x, a, s[2 * a], s[2 * a + 1]);
      if (b == Differentiability::i_p) {
        out[2 * a] = e.lo;
        out[2 * a + 1] = e.hi;
      } else {
        out[2 * a] = e.hi;
        out[2 * a + 1] = e.lo;
      }
    }
  }

  State advance(double x, const State& s, double dt, Differentiability b) const {
    State k1, k2, k3, k4, tmp(s.size());
    derivative(x, s, b, k1);
    for (std::size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + 0.5 * dt * k1[i];
    derivative(x + 0.5 * dt, tmp, b, k2);
    for (std::size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + 0.5 * dt * k2[i];
    derivative(x + 0.5 * dt, tmp, b, k3);
    for (std::size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + dt * k3[i];
    derivative(x + dt, tmp, b, k4);
    State next(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      next[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(next[i])) blowup(x + dt);
    }
    return next;
  }

  // Width and width-slope test at alpha = 0 and the level nearest 0.5.
  bool valid(double x, const State& s, Differentiability b) const {
    for (std::size_t a : {std::size_t{0}, half_}) {
      const double w = s[2 * a + 1] - s[2 * a];
      if (w < -width_tolerance) return false;
      const Ends e = ends(x, a, s[2 * a], s[2 * a + 1]);
      const double slope = b == Differentiability::i_p ? e.hi - e.lo : e.lo - e.hi;
      if (b == Differentiability::i_p ? slope < -width_slope_tolerance
                                      : slope > width_slope_tolerance) {
        return false;
      }
    }
    return true;
  }

  // Parameter corners selected by f-minus and f-plus at alpha = 0.
  std::pair<std::size_t, std::size_t> signature(double x, const State& s) const {
    const Ends e = ends(x, 0, s[0], s[1]);
    return {e.arg_lo, e.arg_hi};
  }

  std::size_t levels() const noexcept { return levels_; }

 private:
  std::span<double> slot(std::size_t a, std::size_t c) {
    const std::size_t k = p_.rhs.slots();
    return {values_.data() + (a * corners_ + c) * k, k};
  }
  std::span<const double> slot(std::size_t a, std::size_t c) const {
    const std::size_t k = p_.rhs.slots();
    return {values_.data() + (a * corners_ + c) * k, k};
  }

  const FdeProblem& p_;
  std::size_t levels_;
  std::size_t corners_ = 1;
  std::size_t half_ = 0;
  std::vector<double> values_;
};

constexpr Differentiability other(Differentiability b) {
  return b == Differentiability::i_p ? Differentiability::d_p : Differentiability::i_p;
}

}  // namespace detail

// Approach 2: coupled lower/upper systems with branch switching. All alpha
// levels share one branch and advance together.
//
// A violated branch is located by bisection and flipped. When the parameter
// corners chosen by the endpoint functions change, the start branch is
// resumed if it is valid there (logged as a reset, not a switch).
inline FuzzySolution solve_coupled(const FdeProblem& p, Differentiability start) {
  detail::validate_problem(p);
  if (start != Differentiability::i_p && start != Differentiability::d_p) {
    throw Error(ErrorCode::invalid_spec, "start branch must be i_p or d_p");
  }
  const detail::CoupledSystem sys(p);
  const std::size_t levels = sys.levels();

  FuzzySolution sol;
  sol.grid = p.options.grid;
  sol.x = detail::x_grid(p);
  const std::size_t n = sol.x.size() - 1;
  sol.cuts.resize(n + 1);

  detail::CoupledSystem::State state(2 * levels);
  for (std::size_t a = 0; a < levels; ++a) {
    const auto c = p.initial.cut(sol.grid[a]);
    state[2 * a] = c.lo;
    state[2 * a + 1] = c.hi;
  }
  auto record = [&](std::size_t i) {
    auto& row = sol.cuts[i];
    row.resize(levels);
    for (std::size_t a = 0; a < levels; ++a) {
      const double l = state[2 * a], u = state[2 * a + 1];
      row[a] = {std::min(l, u), std::max(l, u)};
    }
  };

  Differentiability branch = start;
  double x = p.x0;
  auto begin_segment = [&](Differentiability b, bool reset) {
    if (!sol.branches.empty()) sol.branches.back().to = x;
    sol.branches.push_back({x, p.x_end, b, reset});
  };
  auto flip = [&] {
    const Differentiability next = detail::other(branch);
    if (!sys.valid(x, state, next)) {
      throw Error(ErrorCode::no_valid_branch,
                  "neither branch yields a fuzzy number at x=" + std::to_string(x));
    }
    sol.switches.push_back(
        {x, branch == Differentiability::i_p ? SwitchKind::typeI : SwitchKind::typeII});
    branch = next;
    begin_segment(branch, false);
  };

  if (!sys.valid(x, state, branch)) {
    begin_segment(detail::other(branch), false);
    branch = detail::other(branch);
    if (!sys.valid(x, state, branch)) {
      throw Error(ErrorCode::no_valid_branch, "no branch is valid at the initial point");
    }
  } else {
    begin_segment(branch, false);
  }
  record(0);

  const double tol = p.options.switch_tol;
  double last_switch = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double target = sol.x[i + 1];
    while (x < target) {
      const double dt = target - x;
      const auto trial = sys.advance(x, state, dt, branch);
      const bool ok = sys.valid(target, trial, branch);
      const auto sig0 = sys.signature(x, state);
      const bool same_sig = sys.signature(target, trial) == sig0;
      if (ok && same_sig) {
        state = trial;
        x = target;
        break;
      }
      // Fractions of dt: lo keeps the old behaviour, hi shows the new one.
      auto bracket = [&](auto&& keeps) {
        double lo = 0.0, hi = 1.0;
        while ((hi - lo) * dt > tol) {
          const double mid = 0.5 * (lo + hi);
          if (keeps(mid)) lo = mid;
          else hi = mid;
        }
        return std::pair{lo, hi};
      };
      std::pair<double, double> v_at{2.0, 2.0}, s_at{2.0, 2.0};
      if (!ok) {
        v_at = bracket([&](double s) {
          return sys.valid(x + s * dt, sys.advance(x, state, s * dt, branch), branch);
        });
      }
      if (!same_sig) {
        s_at = bracket([&](double s) {
          return sys.signature(x + s * dt, sys.advance(x, state, s * dt, branch)) == sig0;
        });
      }
      if (v_at.first <= s_at.first) {
        const double s = v_at.first;
        if (s > 0) state = sys.advance(x, state, s * dt, branch);
        x += s * dt;
        if (x - last_switch <= 2 * tol) {
          throw Error(ErrorCode::no_valid_branch,
                      "both branches lose validity near x=" + std::to_string(x));
        }
        flip();
        last_switch = x;
      } else {
        const double s = s_at.second;
        state = sys.advance(x, state, s * dt, branch);
        x = s >= 1.0 ? target : x + s * dt;
        if (branch != start && sys.valid(x, state, start)) {
          branch = start;
          sol.resets.push_back(x);
          begin_segment(branch, true);
        }
      }
    }
    record(i + 1);
  }
  sol.branches.back().to = p.x_end;
  detail::check_level_sets(sol);
  return sol;
}

inline FuzzySolution solve(const FdeProblem& p, FdeMethod method) {
  switch (method) {
    case FdeMethod::parametric: return solve_parametric(p);
    case FdeMethod::coupled_i: return solve_coupled(p, Differentiability::i_p);
    case FdeMethod::coupled_d: return solve_coupled(p, Differentiability::d_p);
  }
  throw Error(ErrorCode::invalid_spec, "unknown method");
}

// Largest sampled difference quotient |f(x,y1) - f(x,y2)| / |y1 - y2| inside
// the solution tube. Diagnostic only.
inline double estimate_lipschitz(const FdeProblem& p, const FuzzySolution& sol,
                                 std::size_t samples = 256, unsigned seed = 11) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_x(0, sol.x.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_a(0, sol.grid.size() - 1);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const std::size_t k = p.rhs.slots();
  std::vector<double> t(k), values(k);
  double best = 0.0;
  for (std::size_t n = 0; n < samples; ++n) {
    const std::size_t i = pick_x(rng), a = pick_a(rng);
    const auto c = sol.cuts[i][a];
    const double pad = std::max(1e-3, 0.1 * c.width());
    const double y1 = c.lo - pad + u01(rng) * (c.width() + 2 * pad);
    const double y2 = c.lo - pad + u01(rng) * (c.width() + 2 * pad);
    if (std::abs(y1 - y2) < 1e-9) continue;
    for (auto& tj : t) tj = u01(rng);
    p.rhs.slot_values(t, sol.grid[a], values);
    const double f1 = p.rhs.eval_values(sol.x[i], y1, sol.grid[a], values);
    const double f2 = p.rhs.eval_values(sol.x[i], y2, sol.grid[a], values);
    const double q = std::abs(f1 - f2) / std::abs(y1 - y2);
    if (std::isfinite(q)) best = std::max(best, q);
    else return std::numeric_limits<double>::infinity();
  }
  return best;
}

}  // namespace fuzznum
