#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "fuzznum/error.hpp"

namespace fuzznum {

// Ordered membership grades shared by every sampled quantity.
// Strictly increasing, starts at 0 and ends at 1.
class AlphaGrid {
 public:
  static constexpr std::size_t default_levels = 101;

  AlphaGrid() : AlphaGrid(uniform(default_levels)) {}

  static AlphaGrid uniform(std::size_t n) {
    if (n < 2) {
      throw Error(ErrorCode::invalid_grid, "an alpha grid needs at least 2 levels");
    }
    std::vector<double> levels(n);
    for (std::size_t i = 0; i < n; ++i) {
      levels[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    }
    levels.back() = 1.0;
    return AlphaGrid(std::move(levels), 0);
  }

  static AlphaGrid from_levels(std::vector<double> levels) {
    if (levels.size() < 2 || levels.front() != 0.0 || levels.back() != 1.0) {
      throw Error(ErrorCode::invalid_grid, "alpha levels must start at 0 and end at 1");
    }
    for (std::size_t i = 1; i < levels.size(); ++i) {
      if (!(levels[i] > levels[i - 1])) {
        throw Error(ErrorCode::invalid_grid, "alpha levels must be strictly increasing");
      }
    }
    return AlphaGrid(std::move(levels), 0);
  }

  std::size_t size() const noexcept { return levels_.size(); }
  double operator[](std::size_t i) const noexcept { return levels_[i]; }
  std::span<const double> levels() const noexcept { return levels_; }
  auto begin() const noexcept { return levels_.begin(); }
  auto end() const noexcept { return levels_.end(); }

  // Index i with levels[i] <= alpha <= levels[i+1]; alpha is clamped to [0,1].
  std::size_t bracket(double alpha) const noexcept {
    if (alpha <= 0.0) return 0;
    if (alpha >= 1.0) return size() - 2;
    auto it = std::upper_bound(levels_.begin(), levels_.end(), alpha);
    auto i = static_cast<std::size_t>(it - levels_.begin());
    return std::min(i == 0 ? 0 : i - 1, size() - 2);
  }

  friend bool operator==(const AlphaGrid&, const AlphaGrid&) = default;

 private:
  AlphaGrid(std::vector<double> levels, int) : levels_(std::move(levels)) {}

  std::vector<double> levels_;
};

}  // namespace fuzznum
