#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzznum/fuzzy_number.hpp"

namespace fuzznum {

// Rounds to 12 significant digits so emitted JSON is stable across platforms.
inline double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline std::string format12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace detail {

inline std::vector<double> number_array(const nlohmann::json& j, const char* what,
                                        std::size_t expected = 0) {
  if (!j.is_array()) throw Error(ErrorCode::invalid_spec, std::string(what) + " must be an array");
  if (expected != 0 && j.size() != expected) {
    throw Error(ErrorCode::invalid_spec,
                std::string(what) + " must have " + std::to_string(expected) + " entries");
  }
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorCode::invalid_spec, std::string(what) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace detail

// Accepts {"triangular":[a,b,c]}, {"trapezoidal":[a,b,c,d]},
// {"sampled":{"alpha":[...],"lower":[...],"upper":[...]}} or a bare number.
inline FuzzyNumber fuzzy_from_json(const nlohmann::json& j) {
  if (j.is_number()) return FuzzyNumber::crisp(j.get<double>());
  if (!j.is_object() || j.size() != 1) {
    throw Error(ErrorCode::invalid_spec, "a fuzzy number must be an object with one shape key");
  }
  if (j.contains("triangular")) {
    const auto v = detail::number_array(j["triangular"], "triangular", 3);
    return FuzzyNumber::triangular(v[0], v[1], v[2]);
  }
  if (j.contains("trapezoidal")) {
    const auto v = detail::number_array(j["trapezoidal"], "trapezoidal", 4);
    return FuzzyNumber::trapezoidal(v[0], v[1], v[2], v[3]);
  }
  if (j.contains("sampled")) {
    const auto& s = j["sampled"];
    if (!s.is_object() || !s.contains("alpha") || !s.contains("lower") || !s.contains("upper")) {
      throw Error(ErrorCode::invalid_spec, "sampled needs alpha, lower and upper arrays");
    }
    auto grid = AlphaGrid::from_levels(detail::number_array(s["alpha"], "alpha"));
    return FuzzyNumber::sampled(std::move(grid), detail::number_array(s["lower"], "lower"),
                                detail::number_array(s["upper"], "upper"));
  }
  throw Error(ErrorCode::invalid_spec, "unknown fuzzy number shape " + j.begin().key());
}

inline FuzzyNumber fuzzy_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::invalid_spec, e.what());
  }
  return fuzzy_from_json(j);
}

// Always emits the sampled encoding on `grid`.
inline nlohmann::json fuzzy_to_json(const FuzzyNumber& a, const AlphaGrid& grid = {}) {
  nlohmann::json alpha = nlohmann::json::array(), lo = nlohmann::json::array(),
                 hi = nlohmann::json::array();
  for (double level : grid) {
    const auto c = a.cut(level);
    alpha.push_back(round12(level));
    lo.push_back(round12(c.lo));
    hi.push_back(round12(c.hi));
  }
  return {{"sampled", {{"alpha", alpha}, {"lower", lo}, {"upper", hi}}}};
}

}  // namespace fuzznum
