#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fuzznum {

enum class ErrorCode {
  // Invalid input: shapes, grids, expressions, specs.
  monotonicity_violation,
  crossing_violation,
  invalid_grid,
  division_by_spanning_zero,
  domain_error,
  parse_error,
  unbound_constant,
  invalid_spec,
  // Numerical failures.
  non_finite_value,
  not_p_differentiable,
  quadrature_failure,
  integration_blowup,
  no_valid_branch,
  invalid_level_set,
};

constexpr std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::monotonicity_violation: return "MonotonicityViolation";
    case ErrorCode::crossing_violation: return "CrossingViolation";
    case ErrorCode::invalid_grid: return "InvalidGrid";
    case ErrorCode::division_by_spanning_zero: return "DivisionBySpanningZero";
    case ErrorCode::domain_error: return "DomainError";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::unbound_constant: return "UnboundConstant";
    case ErrorCode::invalid_spec: return "InvalidSpec";
    case ErrorCode::non_finite_value: return "NonFiniteValue";
    case ErrorCode::not_p_differentiable: return "NotPDifferentiable";
    case ErrorCode::quadrature_failure: return "QuadratureFailure";
    case ErrorCode::integration_blowup: return "IntegrationBlowup";
    case ErrorCode::no_valid_branch: return "NoValidBranch";
    case ErrorCode::invalid_level_set: return "InvalidLevelSet";
  }
  return "Unknown";
}

// True for failures of a numerical procedure on otherwise valid input.
constexpr bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::non_finite_value:
    case ErrorCode::not_p_differentiable:
    case ErrorCode::quadrature_failure:
    case ErrorCode::integration_blowup:
    case ErrorCode::no_valid_branch:
    case ErrorCode::invalid_level_set:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

// Carries the byte offset and the set of tokens that would have been accepted.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected)
      : Error(ErrorCode::parse_error,
              "at offset " + std::to_string(offset) + ", expected " + join(expected)),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += i + 1 == items.size() ? " or " : ", ";
      out += items[i];
    }
    return out;
  }

  std::size_t offset_;
  std::vector<std::string> expected_;
};

}  // namespace fuzznum
