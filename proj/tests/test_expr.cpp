#include <cmath>
#include <random>

#include "fuzznum/expr.hpp"
#include "support.hpp"

using namespace fuzznum;
using namespace fuzznum::expr;

namespace {

std::map<std::string, FuzzyNumber> table_46() {
  return {{"C1", FuzzyNumber::triangular(-2, 1, 4)}};
}

// Random well-formed tree over the full grammar; ln is guarded to stay finite.
Expr random_tree(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 4 : 13);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  switch (pick(rng)) {
    case 0: return number(std::round(u(rng) * 1000) / 1000);
    case 1: return leaf(Kind::var_x);
    case 2: return leaf(Kind::var_y);
    case 3: return constant(rng() % 2 ? "K" : "C1");
    case 4: return leaf(Kind::alpha);
    case 5: return unary(Kind::neg, random_tree(rng, depth - 1));
    case 6: return binary(Kind::add, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 7: return binary(Kind::sub, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 8: return binary(Kind::mul, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 9:
      return binary(Kind::div, random_tree(rng, depth - 1),
                    binary(Kind::add, number(2), power(random_tree(rng, depth - 1), 2)));
    case 10: return power(random_tree(rng, depth - 1), static_cast<int>(rng() % 4));
    case 11: return call(Func::sin, random_tree(rng, depth - 1));
    case 12: return call(Func::exp, call(Func::cos, random_tree(rng, depth - 1)));
    default:
      return call(Func::ln, binary(Kind::add, number(1), power(random_tree(rng, depth - 1), 2)));
  }
}

}  // namespace

TEST(Parse, Examples) {
  auto e = parse("-Y + C1*cos(x)");
  auto want = binary(Kind::add, unary(Kind::neg, leaf(Kind::var_y)),
                     binary(Kind::mul, constant("C1"), call(Func::cos, leaf(Kind::var_x))));
  EXPECT_TRUE(same_tree(e, want)) << print(e);
  auto k = parse("0.05*Y + K");
  EXPECT_TRUE(same_tree(k, binary(Kind::add, binary(Kind::mul, number(0.05), leaf(Kind::var_y)),
                                  constant("K"))));
  EXPECT_TRUE(same_tree(parse(" y "), leaf(Kind::var_y)));
  EXPECT_TRUE(same_tree(parse("-x^2"), unary(Kind::neg, power(leaf(Kind::var_x), 2))));
  EXPECT_TRUE(same_tree(parse("x^-1"), power(leaf(Kind::var_x), -1)));
  EXPECT_TRUE(same_tree(parse("2*-x"), binary(Kind::mul, number(2), unary(Kind::neg, leaf(Kind::var_x)))));
  EXPECT_TRUE(same_tree(parse("1-2-3"), binary(Kind::sub, binary(Kind::sub, number(1), number(2)), number(3))));
  EXPECT_EQ(parse("1.5e3")->value, 1500.0);
}

TEST(Parse, UnclosedCall) {
  try {
    parse("sin(");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
    EXPECT_EQ(e.code(), ErrorCode::parse_error);
    EXPECT_FALSE(e.expected().empty());
  }
}

TEST(Parse, Errors) {
  struct Case {
    const char* src;
    std::size_t offset;
  };
  for (auto [src, offset] : {Case{"x +", 3}, Case{"(x", 2}, Case{"2^1.5", 3}, Case{"foo(x)", 0},
                             Case{"sin x", 4}, Case{"x y", 2}, Case{"", 0}, Case{"--x", 1},
                             Case{"1e", 2}, Case{"x^", 2}, Case{"3 $ 4", 2}}) {
    try {
      parse(src);
      FAIL() << src;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.offset(), offset) << src << ": " << e.what();
    }
  }
}

TEST(Print, FullyParenthesized) {
  EXPECT_EQ(print(parse("-Y + C1*cos(x)")), "((-Y) + (C1 * cos(x)))");
  EXPECT_EQ(print(parse("x^-2")), "(x^-2)");
  EXPECT_EQ(print(parse("pi*alpha")), "(pi * alpha)");
}

TEST(Properties, PrintParseRoundTrip) {
  std::mt19937_64 rng(51);
  for (int n = 0; n < 500; ++n) {
    auto e = random_tree(rng, 5);
    auto again = parse(print(e));
    EXPECT_TRUE(same_tree(e, again)) << print(e);
    EXPECT_EQ(print(again), print(e));
  }
}

TEST(Constants, FirstAppearanceOrderAndSharing) {
  auto e = parse("K*x + C1 - K^2 + B");
  EXPECT_EQ(constants(e), (std::vector<std::string>{"K", "C1", "B"}));
  auto b = bind_constants(e, {{"K", FuzzyNumber::crisp(1)}, {"C1", FuzzyNumber::crisp(2)},
                    {"B", FuzzyNumber::crisp(3)}, {"unused", FuzzyNumber::crisp(9)}});
  EXPECT_EQ(b.slots(), 3u);
}

TEST(Bind, UnboundConstant) {
  try {
    bind_constants(parse("C1*x + C2"), table_46());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unbound_constant);
  }
}

TEST(EvalCrisp, Examples) {
  auto b = bind_constants(parse("-Y + C1*cos(x)"), table_46());
  const double t1[] = {1.0};
  EXPECT_DOUBLE_EQ(eval_crisp(b, 0, 0, t1, 0), 4.0);
  for (double t : {0.0, 0.3, 1.0}) {
    const double tt[] = {t};
    EXPECT_DOUBLE_EQ(eval_crisp(b, 0.7, 2.5, tt, 1.0), std::cos(0.7) - 2.5);
  }
  auto k = bind_constants(parse("0.05*Y + K"), {{"K", FuzzyNumber::triangular(-160, 0, 160)}});
  const double t0[] = {0.0};
  EXPECT_DOUBLE_EQ(eval_crisp(k, 0, 3000, t0, 0), -10.0);
}

TEST(EvalCrisp, NonFinite) {
  auto b = bind_constants(parse("ln(x) + 1/Y"), {});
  EXPECT_THROW(eval_crisp(b, -1, 1, {}, 0), Error);
  EXPECT_THROW(eval_crisp(b, 1, 0, {}, 0), Error);
  EXPECT_NEAR(eval_crisp(b, std::exp(1.0), 2, {}, 0), 1.5, 1e-15);
  const double extra[] = {0.5};
  EXPECT_THROW(eval_crisp(b, 1, 1, extra, 0), Error);
}

TEST(EvalCrisp, ReservedNames) {
  auto b = bind_constants(parse("alpha*pi + abs(x) + sign(x)"), {});
  EXPECT_NEAR(eval_crisp(b, -2, 0, {}, 0.5), 0.5 * std::numbers::pi + 2 - 1, 1e-15);
}

TEST(Properties, CoreIndependentOfT) {
  auto b = bind_constants(parse("C1*sin(x)*Y + K^2 - C1/(1+x^2)"),
                {{"C1", FuzzyNumber::triangular(-1, 0.5, 3)}, {"K", FuzzyNumber::trapezoidal(1, 2, 2, 5)}});
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(0, 1);
  const double ref[] = {0.0, 0.0};
  for (int n = 0; n < 100; ++n) {
    const double t[] = {u(rng), u(rng)};
    const double x = 3 * u(rng), y = 3 * u(rng) - 1;
    EXPECT_EQ(eval_crisp(b, x, y, t, 1.0), eval_crisp(b, x, y, ref, 1.0));
  }
}

TEST(Properties, AffinityProbe) {
  std::map<std::string, FuzzyNumber> tab{{"C1", FuzzyNumber::triangular(-2, 1, 4)},
                                         {"K", FuzzyNumber::triangular(1, 2, 3)}};
  auto check = [&](const char* src, std::vector<bool> slots, bool y) {
    auto r = probe_affinity(bind_constants(parse(src), tab), {0, 4}, {-3, 3});
    EXPECT_EQ(r.in_slot, slots) << src;
    EXPECT_EQ(r.in_y, y) << src;
  };
  check("-Y + C1*cos(x)", {true}, true);
  check("0.05*Y + K", {true}, true);
  check("C1*Y + K*exp(x)", {true, true}, true);
  check("C1^2*Y + K", {false, true}, true);
  check("sin(C1) + Y^2", {false}, false);
  check("C1*C1", {false}, true);
  // Random trees: a slot reported affine must be collinear at fresh points.
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0, 1);
  for (int n = 0; n < 200; ++n) {
    auto e = random_tree(rng, 4);
    auto b = bind_constants(e, tab);
    auto r = probe_affinity(b, {0, 4}, {-3, 3});
    for (std::size_t j = 0; j < b.slots(); ++j) {
      if (!r.in_slot[j]) continue;
      std::vector<double> t(b.slots(), 0.3);
      const double x = 4 * u(rng), y = 6 * u(rng) - 3, a = u(rng);
      std::vector<double> v(b.slots());
      auto at = [&](double tj) {
        t[j] = tj;
        b.slot_values(t, a, v);
        return b.eval_values(x, y, a, v);
      };
      const double f0 = at(0.0), f1 = at(1.0), fq = at(0.25);
      if (std::isfinite(f0) && std::isfinite(f1) && std::isfinite(fq)) {
        EXPECT_NEAR(fq, 0.75 * f0 + 0.25 * f1, 1e-7 * std::max({1.0, std::abs(f0), std::abs(f1)}))
            << print(e);
      }
    }
  }
}

TEST(Differentiate, Examples) {
  auto d = differentiate(parse("cos(x) - x^2/32"));
  for (double x : {-3.0, 0.0, 1.2, 5.0}) {
    EXPECT_NEAR(eval_plain(d, x), -std::sin(x) - x / 16, 1e-15);
  }
  EXPECT_EQ(print(differentiate(parse("3*x + Y"))), "3");
  EXPECT_EQ(print(differentiate(parse("Y*alpha"))), "0");
  auto a = differentiate(parse("abs(x)"));
  EXPECT_EQ(eval_plain(a, -2), -1.0);
  EXPECT_EQ(eval_plain(a, 0), 1.0);
  auto l = differentiate(parse("ln(x)"));
  EXPECT_NEAR(eval_plain(l, 4), 0.25, 1e-16);
}

TEST(Properties, DerivativeMatchesFiniteDifferences) {
  std::mt19937_64 rng(54);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const std::map<std::string, FuzzyNumber> tab{{"C1", FuzzyNumber::crisp(0.7)},
                                               {"K", FuzzyNumber::crisp(-1.3)}};
  int checked = 0;
  for (int n = 0; n < 300; ++n) {
    auto e = random_tree(rng, 4);
    auto f = bind_constants(e, tab);
    auto df = bind_constants(differentiate(e), tab);
    EXPECT_TRUE(same_tree(parse(print(differentiate(e))), differentiate(e)));
    const double x = u(rng), y = u(rng), a = 0.5;
    std::vector<double> t(f.slots(), 0.0);
    const double h = 1e-5;
    std::vector<double> v(f.slots());
    f.slot_values(t, a, v);
    const double fp = f.eval_values(x + h, y, a, v), fm = f.eval_values(x - h, y, a, v);
    std::vector<double> w(df.slots());
    df.slot_values(std::vector<double>(df.slots(), 0.0), a, w);
    const double exact = df.eval_values(x, y, a, w);
    if (!std::isfinite(fp) || !std::isfinite(fm) || !std::isfinite(exact)) continue;
    const double fd = (fp - fm) / (2 * h);
    if (std::abs(exact) > 1e4) continue;
    ++checked;
    EXPECT_NEAR(fd, exact, 1e-4 * std::max(1.0, std::abs(exact))) << print(e);
  }
  EXPECT_GT(checked, 250);
}
