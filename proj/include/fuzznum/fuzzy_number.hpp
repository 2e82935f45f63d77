#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fuzznum/alpha_grid.hpp"
#include "fuzznum/error.hpp"

namespace fuzznum {

// Absolute tolerance for monotonicity and lo <= hi checks, scaled up for
// values whose magnitude exceeds 1.
inline constexpr double validation_tolerance = 1e-12;

struct LevelInterval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  double mid() const noexcept { return 0.5 * (lo + hi); }
  bool contains(const LevelInterval& inner, double tol = 0.0) const noexcept {
    return lo <= inner.lo + tol && inner.hi <= hi + tol;
  }
  friend bool operator==(const LevelInterval&, const LevelInterval&) = default;
};

// Orientation of the affine parametrisation of a level set.
enum class ParamMode { nondecreasing, nonincreasing };

// Point of the level set selected by t in [0,1].
constexpr double param_value(const LevelInterval& cut, double t,
                              ParamMode mode = ParamMode::nondecreasing) noexcept {
  return mode == ParamMode::nondecreasing ? cut.lo + t * (cut.hi - cut.lo)
                                          : cut.hi + t * (cut.lo - cut.hi);
}

struct Triangular {
  double a, b, c;
  friend bool operator==(const Triangular&, const Triangular&) = default;
};

struct Trapezoidal {
  double a, b, c, d;
  friend bool operator==(const Trapezoidal&, const Trapezoidal&) = default;
};

struct Sampled {
  AlphaGrid grid;
  std::vector<double> lower;
  std::vector<double> upper;
  friend bool operator==(const Sampled&, const Sampled&) = default;
};

using Shape = std::variant<Triangular, Trapezoidal, Sampled>;

namespace detail {

inline double scaled_tolerance(double tol, std::span<const double> a, std::span<const double> b) {
  double scale = 1.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  for (double v : b) scale = std::max(scale, std::abs(v));
  return tol * scale;
}

// Endpoint conditions: lower non-decreasing, upper non-increasing,
// lower(1) <= upper(1). Throws on the first violation.
inline void validate_endpoints(const AlphaGrid& grid, std::span<const double> lower,
                               std::span<const double> upper, double tol) {
  if (lower.size() != grid.size() || upper.size() != grid.size()) {
    throw Error(ErrorCode::invalid_grid, "endpoint arrays must match the alpha grid length");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i])) {
      throw Error(ErrorCode::non_finite_value,
                  "non-finite endpoint at alpha=" + std::to_string(grid[i]));
    }
  }
  const double eps = scaled_tolerance(tol, lower, upper);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (lower[i] < lower[i - 1] - eps) {
      throw Error(ErrorCode::monotonicity_violation,
                  "lower endpoint decreases between alpha=" + std::to_string(grid[i - 1]) +
                      " and alpha=" + std::to_string(grid[i]));
    }
    if (upper[i] > upper[i - 1] + eps) {
      throw Error(ErrorCode::monotonicity_violation,
                  "upper endpoint increases between alpha=" + std::to_string(grid[i - 1]) +
                      " and alpha=" + std::to_string(grid[i]));
    }
  }
  if (lower.back() > upper.back() + eps) {
    throw Error(ErrorCode::crossing_violation, "lower(1) exceeds upper(1)");
  }
}

inline double lerp(double a, double b, double s) noexcept { return a + s * (b - a); }

}  // namespace detail

class FuzzyNumber {
 public:
  FuzzyNumber() : shape_(Triangular{0.0, 0.0, 0.0}) {}

  static FuzzyNumber crisp(double v) { return triangular(v, v, v); }

  static FuzzyNumber triangular(double a, double b, double c) {
    check_finite({a, b, c});
    if (a > b || b > c) {
      throw Error(ErrorCode::monotonicity_violation, "triangular parameters must satisfy a<=b<=c");
    }
    return FuzzyNumber(Triangular{a, b, c});
  }

  static FuzzyNumber trapezoidal(double a, double b, double c, double d) {
    check_finite({a, b, c, d});
    if (a > b || c > d) {
      throw Error(ErrorCode::monotonicity_violation,
                  "trapezoidal parameters must satisfy a<=b and c<=d");
    }
    if (b > c) {
      throw Error(ErrorCode::crossing_violation, "trapezoidal core is empty (b > c)");
    }
    return FuzzyNumber(Trapezoidal{a, b, c, d});
  }

  // Validates, never repairs. `tol` is the absolute tolerance for values of
  // magnitude <= 1; larger values scale it.
  static FuzzyNumber sampled(AlphaGrid grid, std::vector<double> lower, std::vector<double> upper,
                             double tol = validation_tolerance) {
    detail::validate_endpoints(grid, lower, upper, tol);
    return FuzzyNumber(Sampled{std::move(grid), std::move(lower), std::move(upper)});
  }

  // Samples `levels` onto `grid` and validates the result.
  static FuzzyNumber from_cuts(const AlphaGrid& grid, std::span<const LevelInterval> levels,
                               double tol = validation_tolerance) {
    std::vector<double> lo(levels.size()), hi(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
      lo[i] = levels[i].lo;
      hi[i] = levels[i].hi;
    }
    return sampled(grid, std::move(lo), std::move(hi), tol);
  }

  const Shape& shape() const noexcept { return shape_; }

  // Closed-form shapes evaluate exactly; sampled shapes interpolate linearly.
  LevelInterval cut(double alpha) const noexcept {
    alpha = std::clamp(alpha, 0.0, 1.0);
    return std::visit(
        [alpha](const auto& s) -> LevelInterval {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Triangular>) {
            return {s.a + alpha * (s.b - s.a), s.c - alpha * (s.c - s.b)};
          } else if constexpr (std::is_same_v<S, Trapezoidal>) {
            return {s.a + alpha * (s.b - s.a), s.d - alpha * (s.d - s.c)};
          } else {
            const std::size_t i = s.grid.bracket(alpha);
            const double a0 = s.grid[i], a1 = s.grid[i + 1];
            if (alpha == a0) return {s.lower[i], s.upper[i]};
            if (alpha == a1) return {s.lower[i + 1], s.upper[i + 1]};
            const double w = (alpha - a0) / (a1 - a0);
            return {detail::lerp(s.lower[i], s.lower[i + 1], w),
                    detail::lerp(s.upper[i], s.upper[i + 1], w)};
          }
        },
        shape_);
  }

  double value(double t, double alpha, ParamMode mode = ParamMode::nondecreasing) const noexcept {
    return param_value(cut(alpha), t, mode);
  }

  LevelInterval support() const noexcept { return cut(0.0); }
  LevelInterval core() const noexcept { return cut(1.0); }

  // Zero width at alpha = 0 (and hence at every level).
  bool is_crisp(double tol = 0.0) const noexcept { return support().width() <= tol; }

  std::vector<LevelInterval> cuts(const AlphaGrid& grid) const {
    std::vector<LevelInterval> out;
    out.reserve(grid.size());
    for (double a : grid) out.push_back(cut(a));
    return out;
  }

 private:
  explicit FuzzyNumber(Shape shape) : shape_(std::move(shape)) {}

  static void check_finite(std::initializer_list<double> values) {
    for (double v : values) {
      if (!std::isfinite(v)) throw Error(ErrorCode::non_finite_value, "non-finite shape parameter");
    }
  }

  Shape shape_;
};

inline LevelInterval alpha_cut(const FuzzyNumber& a, double alpha) { return a.cut(alpha); }

inline double param_value(const FuzzyNumber& a, double t, double alpha,
                          ParamMode mode = ParamMode::nondecreasing) {
  return a.value(t, alpha, mode);
}

// Equality of level sets on every grid level.
inline bool equal_on(const FuzzyNumber& a, const FuzzyNumber& b, const AlphaGrid& grid,
                     double tol = 0.0) {
  for (double alpha : grid) {
    const auto ca = a.cut(alpha), cb = b.cut(alpha);
    if (std::abs(ca.lo - cb.lo) > tol || std::abs(ca.hi - cb.hi) > tol) return false;
  }
  return true;
}

// Every cut at a higher level lies inside the cut at a lower level.
inline bool is_nested(const FuzzyNumber& a, const AlphaGrid& grid, double tol = validation_tolerance) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!a.cut(grid[i - 1]).contains(a.cut(grid[i]), tol)) return false;
  }
  return true;
}

using FuzzyVector = std::vector<FuzzyNumber>;

inline std::vector<LevelInterval> alpha_cut(const FuzzyVector& v, double alpha) {
  std::vector<LevelInterval> out;
  out.reserve(v.size());
  for (const auto& a : v) out.push_back(a.cut(alpha));
  return out;
}

}  // namespace fuzznum
