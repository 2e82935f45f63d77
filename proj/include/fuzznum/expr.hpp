#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fuzznum/fuzzy_number.hpp"

namespace fuzznum::expr {

enum class Kind { number, var_x, var_y, alpha, pi, constant, neg, add, sub, mul, div, pow, call };

// `sign` is produced by differentiating abs; the parser accepts it so that
// printed derivatives reparse.
enum class Func { sin, cos, exp, ln, abs, sign };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  explicit Node(Kind k) : kind(k) {}

  Kind kind;
  double value = 0.0;  // number
  std::string name;    // constant
  int exponent = 0;    // pow
  Func func = Func::sin;
  Expr lhs, rhs;       // unary operand in lhs
};

inline constexpr std::string_view to_string(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::ln: return "ln";
    case Func::abs: return "abs";
    case Func::sign: return "sign";
  }
  return "?";
}

// ---- construction -------------------------------------------------------

inline Expr number(double v) {
  Node n{Kind::number};
  n.value = v;
  return std::make_shared<const Node>(std::move(n));
}
inline Expr leaf(Kind k) { return std::make_shared<const Node>(Node{k}); }
inline Expr constant(std::string name) {
  Node n{Kind::constant};
  n.name = std::move(name);
  return std::make_shared<const Node>(std::move(n));
}
inline Expr unary(Kind k, Expr a) {
  Node n{k};
  n.lhs = std::move(a);
  return std::make_shared<const Node>(std::move(n));
}
inline Expr binary(Kind k, Expr a, Expr b) {
  Node n{k};
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return std::make_shared<const Node>(std::move(n));
}
inline Expr power(Expr a, int e) {
  Node n{Kind::pow};
  n.lhs = std::move(a);
  n.exponent = e;
  return std::make_shared<const Node>(std::move(n));
}
inline Expr call(Func f, Expr a) {
  Node n{Kind::call};
  n.func = f;
  n.lhs = std::move(a);
  return std::make_shared<const Node>(std::move(n));
}

inline bool same_tree(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::number: return a->value == b->value;
    case Kind::constant: return a->name == b->name;
    case Kind::pow: return a->exponent == b->exponent && same_tree(a->lhs, b->lhs);
    case Kind::call: return a->func == b->func && same_tree(a->lhs, b->lhs);
    case Kind::neg: return same_tree(a->lhs, b->lhs);
    case Kind::add:
    case Kind::sub:
    case Kind::mul:
    case Kind::div: return same_tree(a->lhs, b->lhs) && same_tree(a->rhs, b->rhs);
    default: return true;
  }
}

// Distinct constant names in order of first appearance.
inline void collect_constants(const Expr& e, std::vector<std::string>& out) {
  if (!e) return;
  if (e->kind == Kind::constant) {
    for (const auto& n : out) {
      if (n == e->name) return;
    }
    out.push_back(e->name);
    return;
  }
  collect_constants(e->lhs, out);
  collect_constants(e->rhs, out);
}

inline std::vector<std::string> constants(const Expr& e) {
  std::vector<std::string> out;
  collect_constants(e, out);
  return out;
}

inline bool mentions(const Expr& e, Kind k) {
  if (!e) return false;
  return e->kind == k || mentions(e->lhs, k) || mentions(e->rhs, k);
}

// ---- parsing ------------------------------------------------------------

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse() {
    auto e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail({"operator", "end of input"});
    return e;
  }

 private:
  [[noreturn]] void fail(std::vector<std::string> expected) {
    throw ParseError(pos_, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  Expr parse_expr() {
    auto e = parse_term();
    for (;;) {
      if (eat('+')) e = binary(Kind::add, e, parse_term());
      else if (eat('-')) e = binary(Kind::sub, e, parse_term());
      else return e;
    }
  }

  Expr parse_term() {
    auto e = parse_factor();
    for (;;) {
      if (eat('*')) e = binary(Kind::mul, e, parse_factor());
      else if (eat('/')) e = binary(Kind::div, e, parse_factor());
      else return e;
    }
  }

  Expr parse_factor() {
    const bool negate = eat('-');
    auto e = parse_atom();
    if (eat('^')) e = power(e, parse_int());
    return negate ? unary(Kind::neg, e) : e;
  }

  int parse_int() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < src_.size() && src_[pos_] == '-') ++pos_;
    const std::size_t digits = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ == digits) {
      pos_ = start;
      fail({"integer exponent"});
    }
    if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E')) {
      fail({"integer exponent"});
    }
    const std::string text(src_.substr(start, pos_ - start));
    const long v = std::strtol(text.c_str(), nullptr, 10);
    if (v > 1000 || v < -1000) {
      pos_ = start;
      fail({"integer exponent in [-1000, 1000]"});
    }
    return static_cast<int>(v);
  }

  Expr parse_atom() {
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    if (eat('(')) {
      auto e = parse_expr();
      if (!eat(')')) fail({"')'"});
      return e;
    }
    fail({"number", "identifier", "'('"});
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t s = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return pos_ - s;
    };
    std::size_t n = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) {
      pos_ = start;
      fail({"number"});
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        pos_ = mark + 1;
        fail({"exponent digits"});
      }
    }
    const std::string text(src_.substr(start, pos_ - start));
    return number(std::strtod(text.c_str(), nullptr));
  }

  Expr parse_ident() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view id = src_.substr(start, pos_ - start);
    static constexpr std::array<std::pair<std::string_view, Func>, 6> funcs{{{"sin", Func::sin},
                                                                            {"cos", Func::cos},
                                                                            {"exp", Func::exp},
                                                                            {"ln", Func::ln},
                                                                            {"abs", Func::abs},
                                                                            {"sign", Func::sign}}};
    for (const auto& [name, f] : funcs) {
      if (id == name) {
        if (!eat('(')) fail({"'('"});
        auto arg = parse_expr();
        if (!eat(')')) fail({"')'"});
        return call(f, arg);
      }
    }
    if (peek() == '(') {
      pos_ = start;
      fail({"sin", "cos", "exp", "ln", "abs"});
    }
    if (id == "x") return leaf(Kind::var_x);
    if (id == "Y" || id == "y") return leaf(Kind::var_y);
    if (id == "alpha") return leaf(Kind::alpha);
    if (id == "pi") return leaf(Kind::pi);
    return constant(std::string(id));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse(std::string_view src) { return detail::Parser(src).parse(); }

// ---- printing -----------------------------------------------------------

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return v < 0 ? "(" + std::string(buf) + ")" : std::string(buf);
}

// Fully parenthesized; reparses to an identical tree.
inline std::string print(const Expr& e) {
  switch (e->kind) {
    case Kind::number: return format_number(e->value);
    case Kind::var_x: return "x";
    case Kind::var_y: return "Y";
    case Kind::alpha: return "alpha";
    case Kind::pi: return "pi";
    case Kind::constant: return e->name;
    case Kind::neg: return "(-" + print(e->lhs) + ")";
    case Kind::add: return "(" + print(e->lhs) + " + " + print(e->rhs) + ")";
    case Kind::sub: return "(" + print(e->lhs) + " - " + print(e->rhs) + ")";
    case Kind::mul: return "(" + print(e->lhs) + " * " + print(e->rhs) + ")";
    case Kind::div: return "(" + print(e->lhs) + " / " + print(e->rhs) + ")";
    case Kind::pow: return "(" + print(e->lhs) + "^" + std::to_string(e->exponent) + ")";
    case Kind::call: return std::string(to_string(e->func)) + "(" + print(e->lhs) + ")";
  }
  return "?";
}

// ---- differentiation ----------------------------------------------------

namespace detail {

inline bool is_number(const Expr& e, double v) { return e->kind == Kind::number && e->value == v; }

// Literals stay non-negative so that printed trees reparse identically.
inline Expr num(double v) {
  if (v == 0.0) return number(0.0);
  return v < 0 ? unary(Kind::neg, number(-v)) : number(v);
}

inline Expr add(Expr a, Expr b) {
  if (is_number(a, 0)) return b;
  if (is_number(b, 0)) return a;
  if (a->kind == Kind::number && b->kind == Kind::number) return num(a->value + b->value);
  return binary(Kind::add, a, b);
}
inline Expr neg(Expr a) {
  if (is_number(a, 0)) return a;
  if (a->kind == Kind::neg) return a->lhs;
  return unary(Kind::neg, a);
}
inline Expr sub(Expr a, Expr b) {
  if (is_number(b, 0)) return a;
  if (is_number(a, 0)) return neg(b);
  if (a->kind == Kind::number && b->kind == Kind::number) return num(a->value - b->value);
  return binary(Kind::sub, a, b);
}
inline Expr mul(Expr a, Expr b) {
  if (is_number(a, 0) || is_number(b, 0)) return number(0);
  if (is_number(a, 1)) return b;
  if (is_number(b, 1)) return a;
  if (a->kind == Kind::number && b->kind == Kind::number) return num(a->value * b->value);
  return binary(Kind::mul, a, b);
}
inline Expr div(Expr a, Expr b) {
  if (is_number(a, 0)) return number(0);
  if (is_number(b, 1)) return a;
  return binary(Kind::div, a, b);
}
inline Expr pow(Expr a, int n) {
  if (n == 0) return number(1);
  if (n == 1) return a;
  return power(a, n);
}

}  // namespace detail

// d/dx with light simplification. Y, alpha and constants are independent of x.
inline Expr differentiate(const Expr& e) {
  using namespace detail;
  switch (e->kind) {
    case Kind::number:
    case Kind::var_y:
    case Kind::alpha:
    case Kind::pi:
    case Kind::constant: return number(0);
    case Kind::var_x: return number(1);
    case Kind::neg: return neg(differentiate(e->lhs));
    case Kind::add: return add(differentiate(e->lhs), differentiate(e->rhs));
    case Kind::sub: return sub(differentiate(e->lhs), differentiate(e->rhs));
    case Kind::mul:
      return add(mul(differentiate(e->lhs), e->rhs), mul(e->lhs, differentiate(e->rhs)));
    case Kind::div:
      return div(sub(mul(differentiate(e->lhs), e->rhs), mul(e->lhs, differentiate(e->rhs))),
                 pow(e->rhs, 2));
    case Kind::pow:
      return mul(mul(num(e->exponent), pow(e->lhs, e->exponent - 1)), differentiate(e->lhs));
    case Kind::call: {
      const auto du = differentiate(e->lhs);
      switch (e->func) {
        case Func::sin: return mul(call(Func::cos, e->lhs), du);
        case Func::cos: return neg(mul(call(Func::sin, e->lhs), du));
        case Func::exp: return mul(call(Func::exp, e->lhs), du);
        case Func::ln: return div(du, e->lhs);
        case Func::abs: return mul(call(Func::sign, e->lhs), du);
        case Func::sign: return number(0);
      }
    }
  }
  return number(0);
}

// ---- compiled evaluation ------------------------------------------------

enum class Op : unsigned char {
  push, x, y, alpha, slot, neg, add, sub, mul, div, pow, sin, cos, exp, ln, abs, sign
};

struct Instr {
  Op op;
  int slot = 0;
  double value = 0.0;
};

// Postfix program over (x, Y, alpha, slot values).
class Program {
 public:
  Program() = default;

  static Program compile(const Expr& e, const std::vector<std::string>& slots) {
    Program p;
    int depth = 0;
    p.emit(e, slots, depth);
    return p;
  }

  double run(double x, double y, double alpha, std::span<const double> slot_values) const {
    std::array<double, 64> small{};
    std::vector<double> big;
    double* st = small.data();
    if (max_depth_ > static_cast<int>(small.size())) {
      big.resize(static_cast<std::size_t>(max_depth_));
      st = big.data();
    }
    int sp = 0;
    for (const auto& in : code_) {
      switch (in.op) {
        case Op::push: st[sp++] = in.value; break;
        case Op::x: st[sp++] = x; break;
        case Op::y: st[sp++] = y; break;
        case Op::alpha: st[sp++] = alpha; break;
        case Op::slot: st[sp++] = slot_values[static_cast<std::size_t>(in.slot)]; break;
        case Op::neg: st[sp - 1] = -st[sp - 1]; break;
        case Op::add: --sp; st[sp - 1] += st[sp]; break;
        case Op::sub: --sp; st[sp - 1] -= st[sp]; break;
        case Op::mul: --sp; st[sp - 1] *= st[sp]; break;
        case Op::div: --sp; st[sp - 1] /= st[sp]; break;
        case Op::pow: st[sp - 1] = ipow(st[sp - 1], in.slot); break;
        case Op::sin: st[sp - 1] = std::sin(st[sp - 1]); break;
        case Op::cos: st[sp - 1] = std::cos(st[sp - 1]); break;
        case Op::exp: st[sp - 1] = std::exp(st[sp - 1]); break;
        case Op::ln: st[sp - 1] = st[sp - 1] > 0 ? std::log(st[sp - 1]) : NAN; break;
        case Op::abs: st[sp - 1] = std::abs(st[sp - 1]); break;
        case Op::sign: st[sp - 1] = st[sp - 1] < 0 ? -1.0 : 1.0; break;
      }
    }
    return st[0];
  }

  std::size_t size() const noexcept { return code_.size(); }

 private:
  static double ipow(double b, int n) {
    if (n < 0) return 1.0 / ipow(b, -n);
    double r = 1.0;
    while (n) {
      if (n & 1) r *= b;
      b *= b;
      n >>= 1;
    }
    return r;
  }

  void push(Instr in, int& depth, int delta) {
    code_.push_back(in);
    depth += delta;
    max_depth_ = std::max(max_depth_, depth);
  }

  void emit(const Expr& e, const std::vector<std::string>& slots, int& depth) {
    switch (e->kind) {
      case Kind::number: push({Op::push, 0, e->value}, depth, 1); return;
      case Kind::pi: push({Op::push, 0, std::numbers::pi}, depth, 1); return;
      case Kind::var_x: push({Op::x}, depth, 1); return;
      case Kind::var_y: push({Op::y}, depth, 1); return;
      case Kind::alpha: push({Op::alpha}, depth, 1); return;
      case Kind::constant: {
        int idx = -1;
        for (std::size_t i = 0; i < slots.size(); ++i) {
          if (slots[i] == e->name) idx = static_cast<int>(i);
        }
        if (idx < 0) throw Error(ErrorCode::unbound_constant, e->name);
        push({Op::slot, idx}, depth, 1);
        return;
      }
      case Kind::neg: emit(e->lhs, slots, depth); push({Op::neg}, depth, 0); return;
      case Kind::pow: emit(e->lhs, slots, depth); push({Op::pow, e->exponent}, depth, 0); return;
      case Kind::call: {
        emit(e->lhs, slots, depth);
        static constexpr Op ops[] = {Op::sin, Op::cos, Op::exp, Op::ln, Op::abs, Op::sign};
        push({ops[static_cast<int>(e->func)]}, depth, 0);
        return;
      }
      default: break;
    }
    emit(e->lhs, slots, depth);
    emit(e->rhs, slots, depth);
    const Op op = e->kind == Kind::add   ? Op::add
                  : e->kind == Kind::sub ? Op::sub
                  : e->kind == Kind::mul ? Op::mul
                                         : Op::div;
    push({op}, depth, -1);
  }

  std::vector<Instr> code_;
  int max_depth_ = 0;
};

// ---- binding ------------------------------------------------------------

// An expression whose named constants are fuzzy numbers, one parameter slot
// per distinct name.
class BoundExpr {
 public:
  BoundExpr() = default;

  const Expr& tree() const noexcept { return tree_; }
  std::size_t slots() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const FuzzyVector& coefficients() const noexcept { return coef_; }
  const Program& program() const noexcept { return prog_; }

  // c_j(t_j, alpha) in non-decreasing form.
  void slot_values(std::span<const double> t, double alpha, std::span<double> out) const {
    for (std::size_t j = 0; j < coef_.size(); ++j) out[j] = coef_[j].value(t[j], alpha);
  }

  double eval_values(double x, double y, double alpha, std::span<const double> values) const {
    return prog_.run(x, y, alpha, values);
  }

  friend BoundExpr bind_constants(const Expr& e, const std::map<std::string, FuzzyNumber>& table);

 private:
  Expr tree_;
  std::vector<std::string> names_;
  FuzzyVector coef_;
  Program prog_;
};

inline BoundExpr bind_constants(const Expr& e, const std::map<std::string, FuzzyNumber>& table) {
  BoundExpr b;
  b.tree_ = e;
  b.names_ = constants(e);
  for (const auto& n : b.names_) {
    auto it = table.find(n);
    if (it == table.end()) throw Error(ErrorCode::unbound_constant, "no value bound to '" + n + "'");
    b.coef_.push_back(it->second);
  }
  b.prog_ = Program::compile(e, b.names_);
  return b;
}

inline double eval_crisp(const BoundExpr& b, double x, double y, std::span<const double> t,
                         double alpha) {
  if (t.size() != b.slots()) {
    throw Error(ErrorCode::invalid_spec, "parameter vector has " + std::to_string(t.size()) +
                                             " entries, expression has " +
                                             std::to_string(b.slots()) + " slots");
  }
  std::vector<double> values(b.slots());
  b.slot_values(t, alpha, values);
  const double v = b.eval_values(x, y, alpha, values);
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::non_finite_value,
                "expression is not finite at x=" + std::to_string(x) + ", Y=" + std::to_string(y));
  }
  return v;
}

// Evaluates an expression that has no constants.
inline double eval_plain(const Expr& e, double x, double y = 0.0, double alpha = 0.0) {
  static const std::vector<std::string> none;
  return Program::compile(e, none).run(x, y, alpha, {});
}

// ---- affinity probe -----------------------------------------------------

struct AffinityReport {
  std::vector<bool> in_slot;  // per parameter slot
  bool in_y = true;
  bool all() const {
    if (!in_y) return false;
    for (bool b : in_slot) {
      if (!b) return false;
    }
    return true;
  }
};

// Three-point collinearity test at random (x, Y, alpha, t) draws with a fixed
// seed; `x_range` and `y_range` bound the draws.
inline AffinityReport probe_affinity(const BoundExpr& b, std::pair<double, double> x_range,
                                     std::pair<double, double> y_range, int trials = 16,
                                     double rel_tol = 1e-9, unsigned seed = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x_range.first, x_range.second);
  std::uniform_real_distribution<double> uy(y_range.first, y_range.second);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const std::size_t k = b.slots();
  AffinityReport r;
  r.in_slot.assign(k, true);
  std::vector<double> t(k), v(k);

  auto collinear = [rel_tol](double f0, double fm, double f1) {
    const double scale = std::max({1.0, std::abs(f0), std::abs(fm), std::abs(f1)});
    return std::abs(fm - 0.5 * (f0 + f1)) <= rel_tol * scale;
  };
  auto f = [&](double x, double y, double alpha) {
    b.slot_values(t, alpha, v);
    return b.eval_values(x, y, alpha, v);
  };

  for (int n = 0; n < trials; ++n) {
    const double x = ux(rng), y = uy(rng), alpha = u01(rng);
    for (auto& tj : t) tj = u01(rng);
    for (std::size_t j = 0; j < k; ++j) {
      const double keep = t[j];
      t[j] = 0.0;
      const double f0 = f(x, y, alpha);
      t[j] = 0.5;
      const double fm = f(x, y, alpha);
      t[j] = 1.0;
      const double f1 = f(x, y, alpha);
      t[j] = keep;
      if (std::isfinite(f0) && std::isfinite(fm) && std::isfinite(f1) && !collinear(f0, fm, f1)) {
        r.in_slot[j] = false;
      }
    }
    const double y1 = uy(rng);
    const double g0 = f(x, y, alpha), gm = f(x, 0.5 * (y + y1), alpha), g1 = f(x, y1, alpha);
    if (std::isfinite(g0) && std::isfinite(gm) && std::isfinite(g1) && !collinear(g0, gm, g1)) {
      r.in_y = false;
    }
  }
  return r;
}

}  // namespace fuzznum::expr
