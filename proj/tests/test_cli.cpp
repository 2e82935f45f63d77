#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"

using namespace fuzznum;
using nlohmann::json;

namespace {

const std::string source_dir = FUZZNUM_SOURCE_DIR;

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = fuzznum::cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) { return fuzznum::cli::read_file(path); }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("fuzznum_test_" + name)).string();
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto p = temp_path(name);
  std::ofstream(p) << text;
  return p;
}

struct Row {
  double x, alpha, lo, hi;
};

std::vector<Row> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,alpha,lower,upper");
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    Row r{};
    char c = 0;
    std::istringstream ls(line);
    ls >> r.x >> c >> r.alpha >> c >> r.lo >> c >> r.hi;
    rows.push_back(r);
  }
  return rows;
}

const std::string decaying = source_dir + "/problems/decaying_cosine.json";
const std::string savings = source_dir + "/problems/savings.json";

}  // namespace

TEST(CliSolve, GoldenParametric) {
  const auto events = temp_path("events.json");
  const auto r = invoke({"solve", "--spec", decaying, "--alpha-levels", "11", "--step", "0.01",
                      "--stride", "25", "--switches", events});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, slurp(source_dir + "/tests/golden/decaying_cosine_parametric.csv"));
  EXPECT_EQ(slurp(events), slurp(source_dir + "/tests/golden/decaying_cosine_parametric_events.json"));
  // Independent check of the golden values against the closed-form envelope.
  for (const auto& row : parse_csv(r.out)) {
    const double s = (std::cos(row.x) + std::sin(row.x) - std::exp(-row.x)) / 2;
    const double cl = -2 + 3 * row.alpha;
    const double ch = 4 - 3 * row.alpha;
    EXPECT_NEAR(row.lo, std::min(cl * s, ch * s) + (1 + row.alpha) * std::exp(-row.x), 1e-9);
    EXPECT_NEAR(row.hi, std::max(cl * s, ch * s) + (3 - row.alpha) * std::exp(-row.x), 1e-9);
  }
}

TEST(CliSolve, GoldenCoupledDecreasing) {
  const auto events = temp_path("events_d.json");
  const auto r = invoke({"solve", "--spec", decaying, "--method", "coupled-d", "--alpha-levels", "11",
                      "--step", "0.01", "--stride", "25", "--switches", events});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, slurp(source_dir + "/tests/golden/decaying_cosine_coupled_d.csv"));
  const auto ev = json::parse(slurp(events));
  ASSERT_EQ(ev.size(), 3u);
  EXPECT_EQ(ev[0]["kind"], "typeII");
  EXPECT_NEAR(ev[0]["x"].get<double>(), 0.291517514435, 1e-6);
  EXPECT_EQ(ev[1]["kind"], "reset");
  EXPECT_EQ(ev[2]["kind"], "typeII");
  EXPECT_NEAR(ev[2]["x"].get<double>(), 2.85007513915, 1e-6);
}

TEST(CliSolve, DeterministicOutput) {
  const std::vector<std::string> args{"solve", "--spec", savings, "--stride", "400"};
  const auto a = invoke(args), b = invoke(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(CliSolve, FlagsOverrideSpec) {
  const auto r = invoke({"solve", "--spec", savings, "--alpha-levels", "3", "--step", "12.5",
                      "--method", "coupled-i"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  EXPECT_EQ(rows.size(), 5u * 3u);
  EXPECT_DOUBLE_EQ(rows.back().x, 50.0);
  const auto s = fuzznum::cli::spec_from_json(json::parse(slurp(savings)));
  EXPECT_EQ(s.method, FdeMethod::coupled_d);
  EXPECT_EQ(s.problem.options.grid.size(), 101u);
}

TEST(CliSolve, OutputReingestsAsFuzzyNumbers) {
  const auto path = temp_path("sol.csv");
  const auto r = invoke({"solve", "--spec", savings, "--alpha-levels", "21", "--stride", "200",
                      "--out", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto rows = parse_csv(slurp(path));
  ASSERT_EQ(rows.size() % 21, 0u);
  for (std::size_t i = 0; i < rows.size(); i += 21) {
    std::vector<double> lo, hi;
    for (std::size_t a = 0; a < 21; ++a) {
      EXPECT_EQ(rows[i + a].x, rows[i].x);
      lo.push_back(rows[i + a].lo);
      hi.push_back(rows[i + a].hi);
    }
    EXPECT_NO_THROW(FuzzyNumber::sampled(AlphaGrid::uniform(21), lo, hi, 1e-9))
        << "x=" << rows[i].x;
  }
}

TEST(CliArith, GpDifference) {
  const auto r = invoke({"arith", "--a", R"({"triangular":[12,15,19]})", "--b",
                      R"({"triangular":[5,9,11]})", "--op", "gpsub"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto a = fuzzy_from_json(json::parse(r.out));
  for (double alpha : AlphaGrid{}) {
    EXPECT_NEAR(a.cut(alpha).lo, 6.0, 1e-9);
    EXPECT_NEAR(a.cut(alpha).hi, 8 - 2 * alpha, 1e-9);
  }
}

TEST(CliArith, OtherOperations) {
  const std::string a = R"({"triangular":[1,2,3]})", b = R"({"trapezoidal":[1,2,3,5]})";
  auto sampled = [](const Result& r) { return fuzzy_from_json(json::parse(r.out)); };
  const auto sum = sampled(invoke({"arith", "--a", a, "--b", b, "--op", "add"}));
  EXPECT_NEAR(sum.cut(0).lo, 2, 1e-12);
  EXPECT_NEAR(sum.cut(0).hi, 8, 1e-12);
  const auto self = sampled(invoke({"arith", "--a", a, "--b", a, "--op", "sub", "--sem", "cia"}));
  EXPECT_NEAR(self.cut(0).lo, 0, 1e-12);
  EXPECT_NEAR(self.cut(0).hi, 0, 1e-12);
  const auto scaled = sampled(invoke({"arith", "--a", a, "--op", "smul", "--lambda", "-2"}));
  EXPECT_NEAR(scaled.cut(0).lo, -6, 1e-12);
  const auto d = json::parse(invoke({"arith", "--a", a, "--b", b, "--op", "dist"}).out);
  EXPECT_NEAR(d["distance"].get<double>(), 2.0, 1e-12);
  const auto p = json::parse(invoke({"arith", "--a", b, "--b", a, "--op", "psub"}).out);
  EXPECT_TRUE(p["exists"].get<bool>());
  EXPECT_EQ(p["condition"], "cond9");
}

TEST(CliCalculus, SwitchPointsDiffIntegrate) {
  const std::string f =
      R"({"mode":"coefficient","terms":[{"coef":{"trapezoidal":[2,4,5,8]},"kernel":"cos(x) - x^2/32"}],"domain":[-10,10]})";
  const auto sw = json::parse(invoke({"switch-points", "--function", f}).out);
  ASSERT_EQ(sw.size(), 7u);
  EXPECT_NEAR(sw[4]["x"].get<double>(), 1.50038918079, 1e-5);
  EXPECT_EQ(sw[4]["kind"], "typeII");

  const std::string g = R"({"mode":"coefficient","terms":[{"coef":{"triangular":[0,1,2]},"kernel":"1 - x"}],"domain":[0,3]})";
  const auto in = fuzzy_from_json(json::parse(invoke({"integrate", "--function", g}).out));
  for (double alpha : {0.0, 0.4, 1.0}) {
    EXPECT_NEAR(in.cut(alpha).lo, -3 + 1.5 * alpha, 1e-8);
    EXPECT_NEAR(in.cut(alpha).hi, -1.5 * alpha, 1e-8);
  }

  const std::string h = R"({"mode":"endpoint","lower":"alpha*x^2","upper":"alpha*x^2 + x^2 + 1 - alpha","domain":[0,1]})";
  const std::string lin = R"({"mode":"endpoint","lower":"alpha*x^2","upper":"(2 - alpha)*x^2","domain":[0,1]})";
  const auto rows = json::parse(invoke({"diff", "--function", lin, "--grid", "0.25:0.75:3"}).out);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) {
    EXPECT_EQ(row["classification"], "i_p");
    const double x = row["x"].get<double>();
    const auto v = fuzzy_from_json(row["value"]);
    EXPECT_NEAR(v.cut(0.5).lo, x, 1e-6);
    EXPECT_NEAR(v.cut(0.5).hi, 3 * x, 1e-6);
  }
  const auto gap = json::parse(invoke({"diff", "--function", h, "--x", "0.5"}).out);
  EXPECT_EQ(gap["classification"], "neither");
  EXPECT_TRUE(gap["value"].is_null());
  const auto gp = json::parse(invoke({"diff", "--function", h, "--x", "0.5", "--kind", "gp"}).out);
  EXPECT_NEAR(fuzzy_from_json(gp["value"]).cut(0).hi, 2.0, 1e-8);
}

TEST(CliErrors, ExitCodes) {
  auto code_of = [](const Result& r) { return json::parse(r.err)["error"].get<std::string>(); };

  auto r = invoke({"solve", "--spec", "missing.json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(code_of(r), "InvalidSpec");

  r = invoke({"solve", "--spec", write_temp("bad.json", R"({"rhs":"Y +* 2","initial":1,"span":[0,1]})")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(code_of(r), "ParseError");

  r = invoke({"solve", "--spec", write_temp("unbound.json", R"({"rhs":"K*Y","initial":1,"span":[0,1]})")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(code_of(r), "UnboundConstant");

  r = invoke({"solve", "--spec", write_temp("blow.json", R"({"rhs":"Y*Y","initial":1,"span":[0,3]})")});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(code_of(r), "IntegrationBlowup");

  r = invoke({"solve", "--spec", write_temp("drift.json", R"({"rhs":"alpha","initial":1,"span":[0,1]})")});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(code_of(r), "InvalidLevelSet");

  r = invoke({"solve", "--spec", write_temp("notjson.json", "{")});
  EXPECT_EQ(r.code, 2);

  r = invoke({"arith", "--a", "[1,2]", "--b", "1", "--op", "add"});
  EXPECT_EQ(r.code, 2);
  r = invoke({"arith", "--a", "1", "--b", R"({"triangular":[-1,0,1]})", "--op", "div"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(code_of(r), "DivisionBySpanningZero");
  r = invoke({"arith", "--a", "1", "--op", "pow"});
  EXPECT_EQ(r.code, 2);
  r = invoke({});
  EXPECT_EQ(r.code, 2);
  r = invoke({"diff", "--function", R"({"mode":"endpoint","lower":"x","upper":"x","domain":[0,1]})", "--x", "2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(code_of(r), "DomainError");
  EXPECT_EQ(invoke({"--help"}).code, 0);
}
