#pragma once

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"

namespace fuzznum::testing {

using fixtures::random_positive;
using fixtures::random_trapezoid;

template <class Lo, class Hi>
void expect_cuts(const FuzzyNumber& a, Lo&& lo, Hi&& hi, double tol, const AlphaGrid& grid = {}) {
  for (double alpha : grid) {
    const auto c = a.cut(alpha);
    EXPECT_NEAR(c.lo, lo(alpha), tol) << "alpha=" << alpha;
    EXPECT_NEAR(c.hi, hi(alpha), tol) << "alpha=" << alpha;
  }
}

}  // namespace fuzznum::testing
