#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fuzznum/fuzzy_number.hpp"

namespace fuzznum {

// endpoint: [F(x)]_a = { f-(x,a) + t (f+(x,a) - f-(x,a)) }
// coefficient: [F(x)]_a = { sum_j c_j(t_j, a) g_j(x) }
enum class Representation { endpoint, coefficient };

using ScalarFn = std::function<double(double)>;
using LevelFn = std::function<double(double, double)>;

// A crisp kernel g_j. `derivative` may be left empty.
struct Kernel {
  ScalarFn value;
  ScalarFn derivative;
};

inline constexpr double central_difference_step = 1e-6;

inline double central_difference(const ScalarFn& f, double x, double h = central_difference_step) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

struct EndpointSlopes {
  double lower;
  double upper;
};

class FuzzyFunction {
 public:
  static FuzzyFunction endpoint(LevelFn lower, LevelFn upper, double a, double b,
                                LevelFn dlower = {}, LevelFn dupper = {}) {
    FuzzyFunction f(Representation::endpoint, a, b);
    f.lower_ = std::move(lower);
    f.upper_ = std::move(upper);
    f.dlower_ = std::move(dlower);
    f.dupper_ = std::move(dupper);
    return f;
  }

  static FuzzyFunction coefficient(FuzzyVector c, std::vector<Kernel> g, double a, double b) {
    if (c.size() != g.size()) {
      throw Error(ErrorCode::invalid_spec, "coefficient and kernel counts differ");
    }
    FuzzyFunction f(Representation::coefficient, a, b);
    f.coef_ = std::move(c);
    f.kernels_ = std::move(g);
    return f;
  }

  Representation mode() const noexcept { return mode_; }
  double domain_lo() const noexcept { return a_; }
  double domain_hi() const noexcept { return b_; }
  const FuzzyVector& coefficients() const noexcept { return coef_; }
  const std::vector<Kernel>& kernels() const noexcept { return kernels_; }

  void check_domain(double x) const {
    if (!(x >= a_ && x <= b_)) {
      throw Error(ErrorCode::domain_error, "x=" + std::to_string(x) + " outside [" +
                                               std::to_string(a_) + ", " + std::to_string(b_) + "]");
    }
  }

  // Unchecked level set at (x, alpha).
  LevelInterval cut(double x, double alpha) const {
    if (mode_ == Representation::endpoint) return {lower_(x, alpha), upper_(x, alpha)};
    double lo = 0.0, hi = 0.0;
    for (std::size_t j = 0; j < coef_.size(); ++j) {
      const auto c = coef_[j].cut(alpha);
      const double g = kernels_[j].value(x);
      lo += std::min(c.lo * g, c.hi * g);
      hi += std::max(c.lo * g, c.hi * g);
    }
    return {lo, hi};
  }

  double kernel_slope(std::size_t j, double x) const {
    const auto& k = kernels_[j];
    return k.derivative ? k.derivative(x) : central_difference(k.value, x);
  }

  // x-derivatives of the two endpoint functions. In coefficient mode each
  // term follows its minimizing (maximizing) corner; at a tie the right
  // derivative is taken.
  EndpointSlopes endpoint_slopes(double x, double alpha) const {
    if (mode_ == Representation::endpoint) {
      const double dl = dlower_ ? dlower_(x, alpha)
                                : central_difference([&](double s) { return lower_(s, alpha); }, x);
      const double du = dupper_ ? dupper_(x, alpha)
                                : central_difference([&](double s) { return upper_(s, alpha); }, x);
      return {dl, du};
    }
    EndpointSlopes s{0.0, 0.0};
    for (std::size_t j = 0; j < coef_.size(); ++j) {
      const auto c = coef_[j].cut(alpha);
      const double g = kernels_[j].value(x);
      const double dg = kernel_slope(j, x);
      const double a0 = c.lo * g, a1 = c.hi * g;
      const double d0 = c.lo * dg, d1 = c.hi * dg;
      if (a0 < a1) {
        s.lower += d0;
        s.upper += d1;
      } else if (a1 < a0) {
        s.lower += d1;
        s.upper += d0;
      } else {
        s.lower += std::min(d0, d1);
        s.upper += std::max(d0, d1);
      }
    }
    return s;
  }

  // [min, max] over the parameter corners of d/dx f_(t, alpha)(x).
  LevelInterval slope_hull(double x, double alpha) const {
    if (mode_ == Representation::endpoint) {
      const auto s = endpoint_slopes(x, alpha);
      return {std::min(s.lower, s.upper), std::max(s.lower, s.upper)};
    }
    double lo = 0.0, hi = 0.0;
    for (std::size_t j = 0; j < coef_.size(); ++j) {
      const auto c = coef_[j].cut(alpha);
      const double dg = kernel_slope(j, x);
      lo += std::min(c.lo * dg, c.hi * dg);
      hi += std::max(c.lo * dg, c.hi * dg);
    }
    return {lo, hi};
  }

  // Endpoint-form view of the same level sets. The coefficient form is lost:
  // derivatives and integrals of the result follow the endpoint rules.
  FuzzyFunction to_endpoint() const {
    if (mode_ == Representation::endpoint) return *this;
    auto self = std::make_shared<FuzzyFunction>(*this);
    return endpoint([self](double x, double a) { return self->cut(x, a).lo; },
                    [self](double x, double a) { return self->cut(x, a).hi; }, a_, b_,
                    [self](double x, double a) { return self->endpoint_slopes(x, a).lower; },
                    [self](double x, double a) { return self->endpoint_slopes(x, a).upper; });
  }

 private:
  FuzzyFunction(Representation m, double a, double b) : mode_(m), a_(a), b_(b) {
    if (!(a <= b)) throw Error(ErrorCode::invalid_spec, "function domain must satisfy a <= b");
  }

  Representation mode_;
  double a_, b_;
  LevelFn lower_, upper_, dlower_, dupper_;
  FuzzyVector coef_;
  std::vector<Kernel> kernels_;
};

inline FuzzyNumber eval(const FuzzyFunction& f, double x, const AlphaGrid& grid = {}) {
  f.check_domain(x);
  std::vector<LevelInterval> cuts;
  cuts.reserve(grid.size());
  for (double alpha : grid) cuts.push_back(f.cut(x, alpha));
  return FuzzyNumber::from_cuts(grid, cuts);
}

}  // namespace fuzznum
