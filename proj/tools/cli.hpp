#pragma once

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fuzznum/fuzznum.hpp"

namespace fuzznum::cli {

using nlohmann::json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::invalid_spec, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_spec, what + ": " + e.what());
  }
}

// Inline JSON, or @path for a file.
inline json json_argument(const std::string& arg, const std::string& what) {
  if (!arg.empty() && arg.front() == '@') return parse_json(read_file(arg.substr(1)), what);
  return parse_json(arg, what);
}

inline FuzzyNumber fuzzy_argument(const std::string& arg, const std::string& what) {
  return fuzzy_from_json(json_argument(arg, what));
}

inline const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::invalid_spec, where + " needs \"" + key + "\"");
  }
  return j.at(key);
}

inline std::string string_member(const json& j, const char* key, const std::string& where) {
  const auto& v = member(j, key, where);
  if (!v.is_string()) throw Error(ErrorCode::invalid_spec, where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

inline std::pair<double, double> interval_member(const json& j, const char* key,
                                                 const std::string& where) {
  const auto& v = member(j, key, where);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw Error(ErrorCode::invalid_spec, where + ": \"" + key + "\" must be [lo, hi]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

// An expression in x (and alpha) without named constants.
inline std::shared_ptr<const expr::Program> compile_plain(const expr::Expr& e) {
  if (const auto names = expr::constants(e); !names.empty()) {
    throw Error(ErrorCode::unbound_constant, "no value bound to '" + names.front() + "'");
  }
  return std::make_shared<const expr::Program>(expr::Program::compile(e, {}));
}

// {"mode":"coefficient","terms":[{"coef":<fuzzy>,"kernel":"<expr in x>"}],"domain":[a,b]}
// {"mode":"endpoint","lower":"<expr in x, alpha>","upper":"...","domain":[a,b]}
inline FuzzyFunction function_from_json(const json& j) {
  const std::string where = "function";
  const auto mode = string_member(j, "mode", where);
  const auto [a, b] = interval_member(j, "domain", where);
  if (!(a < b)) throw Error(ErrorCode::invalid_spec, "function domain must satisfy lo < hi");
  auto scalar = [](const expr::Expr& e) -> ScalarFn {
    auto p = compile_plain(e);
    return [p](double x) { return p->run(x, 0.0, 0.0, {}); };
  };
  auto level = [](const expr::Expr& e) -> LevelFn {
    auto p = compile_plain(e);
    return [p](double x, double alpha) { return p->run(x, 0.0, alpha, {}); };
  };
  if (mode == "coefficient") {
    const auto& terms = member(j, "terms", where);
    if (!terms.is_array() || terms.empty()) {
      throw Error(ErrorCode::invalid_spec, "\"terms\" must be a non-empty array");
    }
    FuzzyVector c;
    std::vector<Kernel> g;
    for (const auto& t : terms) {
      c.push_back(fuzzy_from_json(member(t, "coef", "term")));
      const auto e = expr::parse(string_member(t, "kernel", "term"));
      if (expr::mentions(e, expr::Kind::alpha) || expr::mentions(e, expr::Kind::var_y)) {
        throw Error(ErrorCode::invalid_spec, "a kernel may only depend on x");
      }
      g.push_back({scalar(e), scalar(expr::differentiate(e))});
    }
    return FuzzyFunction::coefficient(std::move(c), std::move(g), a, b);
  }
  if (mode == "endpoint") {
    const auto lo = expr::parse(string_member(j, "lower", where));
    const auto hi = expr::parse(string_member(j, "upper", where));
    return FuzzyFunction::endpoint(level(lo), level(hi), a, b, level(expr::differentiate(lo)),
                                   level(expr::differentiate(hi)));
  }
  throw Error(ErrorCode::invalid_spec, "function mode must be \"coefficient\" or \"endpoint\"");
}

inline FdeMethod method_from_string(const std::string& s) {
  if (s == "parametric") return FdeMethod::parametric;
  if (s == "coupled-i") return FdeMethod::coupled_i;
  if (s == "coupled-d") return FdeMethod::coupled_d;
  throw Error(ErrorCode::invalid_spec, "unknown method '" + s + "'");
}

struct SolveSpec {
  FdeProblem problem;
  FdeMethod method = FdeMethod::parametric;
};

struct SolveOverrides {
  std::optional<std::string> method;
  std::optional<std::size_t> alpha_levels;
  std::optional<double> step;
  std::optional<std::size_t> param_grid;
};

// {"rhs", "constants", "initial", "span", "alpha_levels", "step", "method", "param_grid"};
// overrides win over the file.
inline SolveSpec spec_from_json(const json& j, const SolveOverrides& o = {}) {
  const std::string where = "spec";
  if (!j.is_object()) throw Error(ErrorCode::invalid_spec, "spec must be a JSON object");
  SolveSpec s;
  std::map<std::string, FuzzyNumber> table;
  if (j.contains("constants")) {
    const auto& c = j.at("constants");
    if (!c.is_object()) throw Error(ErrorCode::invalid_spec, "\"constants\" must be an object");
    for (const auto& [name, v] : c.items()) table.emplace(name, fuzzy_from_json(v));
  }
  s.problem.rhs = expr::bind_constants(expr::parse(string_member(j, "rhs", where)), table);
  s.problem.initial = fuzzy_from_json(member(j, "initial", where));
  std::tie(s.problem.x0, s.problem.x_end) = interval_member(j, "span", where);

  auto count = [&](const char* key, std::optional<std::size_t> flag) -> std::optional<std::size_t> {
    if (flag) return flag;
    if (!j.contains(key)) return std::nullopt;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw Error(ErrorCode::invalid_spec, std::string("\"") + key + "\" must be a non-negative integer");
    }
    return v.get<std::size_t>();
  };
  if (auto n = count("alpha_levels", o.alpha_levels)) s.problem.options.grid = AlphaGrid::uniform(*n);
  if (auto m = count("param_grid", o.param_grid)) s.problem.options.param_grid = *m;
  if (o.step) {
    s.problem.options.step = *o.step;
  } else if (j.contains("step")) {
    if (!j.at("step").is_number()) throw Error(ErrorCode::invalid_spec, "\"step\" must be a number");
    s.problem.options.step = j.at("step").get<double>();
  }
  if (j.contains("force_grid")) s.problem.options.force_grid = j.at("force_grid").get<bool>();
  if (o.method) {
    s.method = method_from_string(*o.method);
  } else if (j.contains("method")) {
    s.method = method_from_string(string_member(j, "method", where));
  }
  return s;
}

inline void write_csv(std::ostream& out, const FuzzySolution& sol, std::size_t stride) {
  stride = std::max<std::size_t>(stride, 1);
  out << "x,alpha,lower,upper\n";
  for (std::size_t i = 0; i < sol.x.size(); ++i) {
    if (i % stride != 0 && i + 1 != sol.x.size()) continue;
    for (std::size_t a = 0; a < sol.grid.size(); ++a) {
      const auto& c = sol.cuts[i][a];
      out << format12(sol.x[i]) << ',' << format12(sol.grid[a]) << ',' << format12(c.lo) << ','
          << format12(c.hi) << '\n';
    }
  }
}

inline json events_json(const FuzzySolution& sol) {
  std::vector<std::pair<double, std::string>> events;
  for (const auto& s : sol.switches) events.emplace_back(s.x, std::string(to_string(s.kind)));
  for (double x : sol.resets) events.emplace_back(x, "reset");
  for (double x : sol.envelope_crossings) events.emplace_back(x, "envelope-crossing");
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  json out = json::array();
  for (const auto& [x, kind] : events) out.push_back({{"x", round12(x)}, {"kind", kind}});
  return out;
}

// Writes to `path`, or to `fallback` when the path is empty.
template <class Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::invalid_spec, "cannot write '" + path + "'");
  write(out);
}

inline void print_json(std::ostream& out, const json& j) { out << j.dump() << '\n'; }

inline json error_json(const std::string& code, const std::string& detail) {
  return {{"error", code}, {"detail", detail}};
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fuzzy-number arithmetic, calculus and FDE solver", "fuzznum"};
  app.require_subcommand(1);
  std::string out_path;
  std::size_t alpha_levels = AlphaGrid::default_levels;

  auto* arith_cmd = app.add_subcommand("arith", "Arithmetic and differences of fuzzy numbers");
  std::string a_arg, b_arg, op = "add", sem = "standard";
  double lambda = 1.0;
  arith_cmd->add_option("--a", a_arg, "First operand (JSON or @file)")->required();
  arith_cmd->add_option("--b", b_arg, "Second operand (JSON or @file)");
  arith_cmd->add_option("--op", op, "add|sub|mul|div|psub|gpsub|smul|dist")
      ->check(CLI::IsMember({"add", "sub", "mul", "div", "psub", "gpsub", "smul", "dist"}));
  arith_cmd->add_option("--sem", sem, "standard|parametric|cia|slcia")
      ->check(CLI::IsMember({"standard", "parametric", "cia", "slcia"}));
  arith_cmd->add_option("--lambda", lambda, "Scalar for smul");

  auto* diff_cmd = app.add_subcommand("diff", "p- or gp-derivative of a fuzzy function");
  std::string fn_arg, kind = "p", grid_arg;
  std::vector<double> xs;
  diff_cmd->add_option("--function", fn_arg, "Function JSON or @file")->required();
  diff_cmd->add_option("--x", xs, "Evaluation points");
  diff_cmd->add_option("--grid", grid_arg, "Evaluation grid lo:hi:n");
  diff_cmd->add_option("--kind", kind, "p|gp")->check(CLI::IsMember({"p", "gp"}));

  auto* int_cmd = app.add_subcommand("integrate", "Level-wise integral of a fuzzy function");
  std::optional<double> from, to;
  std::string of = "function";
  int_cmd->add_option("--function", fn_arg, "Function JSON or @file")->required();
  int_cmd->add_option("--from", from, "Lower limit (default: domain start)");
  int_cmd->add_option("--to", to, "Upper limit (default: domain end)");
  int_cmd->add_option("--of", of, "function|derivative")
      ->check(CLI::IsMember({"function", "derivative"}));

  auto* sw_cmd = app.add_subcommand("switch-points", "Switching points of a fuzzy function");
  std::size_t points = 2001;
  sw_cmd->add_option("--function", fn_arg, "Function JSON or @file")->required();
  sw_cmd->add_option("--from", from, "Scan start (default: domain start)");
  sw_cmd->add_option("--to", to, "Scan end (default: domain end)");
  sw_cmd->add_option("--points", points, "Scan resolution")->check(CLI::PositiveNumber);

  auto* solve_cmd = app.add_subcommand("solve", "Solve a fuzzy initial-value problem");
  std::string spec_path, switches_path;
  SolveOverrides over;
  std::size_t stride = 1;
  bool lipschitz = false;
  solve_cmd->add_option("--spec", spec_path, "Problem spec JSON file")->required();
  solve_cmd->add_option("--method", over.method, "parametric|coupled-i|coupled-d");
  solve_cmd->add_option("--step", over.step, "RK4 step");
  solve_cmd->add_option("--param-grid", over.param_grid, "Parameter samples per axis");
  solve_cmd->add_option("--switches", switches_path, "Write the event report JSON here");
  solve_cmd->add_option("--stride", stride, "Emit every n-th x row")->check(CLI::PositiveNumber);
  solve_cmd->add_flag("--lipschitz", lipschitz, "Estimate the Lipschitz constant in Y");

  for (auto* c : {arith_cmd, diff_cmd, int_cmd, sw_cmd, solve_cmd}) {
    c->add_option("--out", out_path, "Output file (default: stdout)");
    c->add_option("--alpha-levels", alpha_levels, "Number of alpha levels");
  }

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    print_json(err, error_json("UsageError", e.what()));
    return 2;
  }

  try {
    const AlphaGrid grid = AlphaGrid::uniform(alpha_levels);
    auto function_arg = [&] { return function_from_json(json_argument(fn_arg, "function")); };

    if (arith_cmd->parsed()) {
      const auto a = fuzzy_argument(a_arg, "--a");
      json result;
      if (op == "smul") {
        result = fuzzy_to_json(scalar_mul(lambda, a), grid);
      } else {
        if (b_arg.empty()) throw Error(ErrorCode::invalid_spec, "--op " + op + " needs --b");
        const auto b = fuzzy_argument(b_arg, "--b");
        if (op == "psub") {
          const auto r = p_difference(a, b, grid);
          result = {{"exists", r.exists},
                    {"condition", std::string(to_string(r.condition_used))},
                    {"result", r.result ? fuzzy_to_json(*r.result, grid) : json(nullptr)}};
        } else if (op == "gpsub") {
          result = fuzzy_to_json(gp_difference(a, b, grid), grid);
        } else if (op == "dist") {
          result = {{"distance", round12(metric(a, b, grid))}};
        } else {
          const ArithOp o = op == "add"   ? ArithOp::add
                            : op == "sub" ? ArithOp::sub
                            : op == "mul" ? ArithOp::mul
                                          : ArithOp::div;
          const ArithSemantics s = sem == "standard"     ? ArithSemantics::standard
                                   : sem == "parametric" ? ArithSemantics::parametric
                                   : sem == "cia"        ? ArithSemantics::cia
                                                         : ArithSemantics::slcia;
          result = fuzzy_to_json(arith(a, b, o, s, grid), grid);
        }
      }
      emit(out_path, out, [&](std::ostream& o) { print_json(o, result); });
      return 0;
    }

    if (diff_cmd->parsed()) {
      const auto f = function_arg();
      if (!grid_arg.empty()) {
        double lo = 0, hi = 0;
        std::size_t n = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(grid_arg);
        if (!(ss >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 2) {
          throw Error(ErrorCode::invalid_spec, "--grid expects lo:hi:n with n >= 2");
        }
        for (std::size_t i = 0; i < n; ++i) {
          xs.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        }
      }
      if (xs.empty()) throw Error(ErrorCode::invalid_spec, "diff needs --x or --grid");
      json rows = json::array();
      for (double x : xs) {
        json row{{"x", round12(x)}};
        if (kind == "gp") {
          row["value"] = fuzzy_to_json(gp_derivative(f, x, grid), grid);
        } else {
          const auto r = p_derivative(f, x, {grid, classification_tolerance});
          row["classification"] = std::string(to_string(r.classification));
          row["value"] = r.value ? fuzzy_to_json(*r.value, grid) : json(nullptr);
          if (!r.value) row["failing_condition"] = r.failing_condition;
        }
        rows.push_back(std::move(row));
      }
      emit(out_path, out, [&](std::ostream& o) { print_json(o, rows.size() == 1 ? rows[0] : rows); });
      return 0;
    }

    if (int_cmd->parsed()) {
      const auto f = function_arg();
      const double a = from.value_or(f.domain_lo()), b = to.value_or(f.domain_hi());
      const auto r = of == "derivative" ? integrate_p_derivative(f, a, b, grid) : integrate(f, a, b, grid);
      emit(out_path, out, [&](std::ostream& o) { print_json(o, fuzzy_to_json(r, grid)); });
      return 0;
    }

    if (sw_cmd->parsed()) {
      const auto f = function_arg();
      ScanOptions opt;
      opt.points = points;
      opt.classify.grid = grid;
      const auto sw =
          find_switching_points(f, from.value_or(f.domain_lo()), to.value_or(f.domain_hi()), opt);
      json rows = json::array();
      for (const auto& s : sw) rows.push_back({{"x", round12(s.x)}, {"kind", std::string(to_string(s.kind))}});
      emit(out_path, out, [&](std::ostream& o) { print_json(o, rows); });
      return 0;
    }

    // solve
    if (solve_cmd->count("--alpha-levels") > 0) over.alpha_levels = alpha_levels;
    const auto spec = spec_from_json(parse_json(read_file(spec_path), "spec"), over);
    const auto sol = solve(spec.problem, spec.method);
    if (lipschitz) {
      const double l = estimate_lipschitz(spec.problem, sol);
      json note{{"lipschitz_estimate", round12(l)}};
      if (!(l < 1e6)) note["warning"] = "Lipschitz estimate explodes; the solution may not be unique";
      print_json(err, note);
    }
    emit(out_path, out, [&](std::ostream& o) { write_csv(o, sol, stride); });
    if (!switches_path.empty()) {
      emit(switches_path, out, [&](std::ostream& o) { print_json(o, events_json(sol)); });
    }
    return 0;
  } catch (const Error& e) {
    print_json(err, error_json(std::string(error_name(e.code())), e.detail()));
    return is_numerical(e.code()) ? 3 : 2;
  } catch (const json::exception& e) {
    print_json(err, error_json("InvalidSpec", e.what()));
    return 2;
  } catch (const std::exception& e) {
    print_json(err, error_json("InternalError", e.what()));
    return 3;
  }
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args), std::cout, std::cerr);
}

}  // namespace fuzznum::cli
