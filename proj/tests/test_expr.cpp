#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "crossreg/expr.hpp"

using namespace crossreg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Random expression source over x1, x2 and a parameter k.
std::string random_expr(std::mt19937& rng, int depth, bool polynomial) {
  std::uniform_int_distribution<int> pick(0, polynomial ? 5 : 8);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  if (depth == 0) {
    switch (pick(rng) % 4) {
      case 0: return "x1";
      case 1: return "x2";
      case 2: return polynomial ? "x1" : "k";
      default: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", std::fabs(coef(rng)));
        return buf;
      }
    }
  }
  const std::string a = random_expr(rng, depth - 1, polynomial);
  const std::string b = random_expr(rng, depth - 1, polynomial);
  switch (pick(rng)) {
    case 0: return "(" + a + ") + (" + b + ")";
    case 1: return "(" + a + ") - (" + b + ")";
    case 2: return "(" + a + ")*(" + b + ")";
    case 3: return "-(" + a + ")";
    case 4: return "(" + a + ")^2";
    case 5: return "(" + a + ")^3 - " + b;
    case 6: return "sin(" + a + ")/(2 + cos(" + b + "))";
    case 7: return "exp(" + a + ") - " + b + "^2^1";
    default: return "-" + a + "*-" + b;
  }
}

}  // namespace

TEST_CASE("parse builds the expected trees", "[expr]") {
  const Expr e = parse("x1*x2", {});
  REQUIRE(e.nodes().size() == 3);
  CHECK(e.nodes().back().op == Op::Mul);
  CHECK(e.nodes()[0].op == Op::Var);

  const Expr hopf = parse("-x2 + (mu - x2^2)*x1 + 5/9", {"mu"});
  CHECK(hopf.nodes().back().op == Op::Add);
  CHECK(hopf.str() == "-x2 + (mu - x2^2)*x1 + 5/9");
}

TEST_CASE("precedence and associativity", "[expr]") {
  const Point p{2.0, 3.0};
  CHECK(eval2(parse("-x1^2", {}), p, {}).v == -4.0);
  CHECK(eval2(parse("2^3^2", {}), p, {}).v == 512.0);
  CHECK(eval2(parse("x2 - x1 - 1", {}), p, {}).v == 0.0);
  CHECK(eval2(parse("x2 / x1 / 3", {}), p, {}).v == 0.5);
  CHECK(eval2(parse("2^-1", {}), p, {}).v == 0.5);
  CHECK(eval2(parse("-x1*x2", {}), p, {}).v == -6.0);
  CHECK(eval2(parse("1.5e1 + .5", {}), p, {}).v == 15.5);
}

TEST_CASE("parse errors carry offsets", "[expr]") {
  try {
    parse("x1 +", {});
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset == 4);
  }
  CHECK_THROWS_AS(parse("x3 + 1", {}), ParseError);
  CHECK_THROWS_AS(parse("sin x1", {}), ParseError);
  CHECK_THROWS_AS(parse("sin(x1, x2)", {}), ParseError);
  CHECK_THROWS_AS(parse("(x1", {}), ParseError);
  CHECK_THROWS_AS(parse("", {}), ParseError);
  CHECK_THROWS_AS(parse("x1 x2", {}), ParseError);
  try {
    parse("x1 + nu", {"mu"});
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset == 5);
  }
}

TEST_CASE("eval2 values and derivatives", "[expr]") {
  const Dual2 d = eval2(parse("x1*x2", {}), {2.0, 3.0}, {});
  CHECK(d.v == 6.0);
  CHECK(d.g[0] == 3.0);
  CHECK(d.g[1] == 2.0);
  CHECK(d.hess(0, 0) == 0.0);
  CHECK(d.hess(0, 1) == 1.0);
  CHECK(d.hess(1, 1) == 0.0);

  const Dual2 h = eval2(parse("-x2 + (mu - x2^2)*x1 + 5/9", {"mu"}), {0.0, 0.0}, {{"mu", 0.0}});
  CHECK_THAT(h.v, WithinAbs(5.0 / 9.0, 1e-15));
  CHECK(h.g[0] == 0.0);
  CHECK(h.g[1] == -1.0);
  CHECK(h.hess(0, 0) == 0.0);
  CHECK(h.hess(0, 1) == 0.0);
  CHECK(h.hess(1, 1) == 0.0);

  const Dual2 e = eval2(parse("exp(x1)", {}), {0.0, 0.0}, {});
  CHECK(e.v == 1.0);
  CHECK(e.g[0] == 1.0);
  CHECK(e.g[1] == 0.0);
}

TEST_CASE("sgn and abs conventions", "[expr]") {
  const Dual2 s0 = eval2(parse("sgn(x1)", {}), {0.0, 1.0}, {});
  CHECK(s0.v == 0.0);
  CHECK(s0.g[0] == 0.0);
  CHECK(s0.kink);
  const Dual2 s1 = eval2(parse("sgn(x1)", {}), {-0.3, 1.0}, {});
  CHECK(s1.v == -1.0);
  CHECK_FALSE(s1.kink);
  const Dual2 a0 = eval2(parse("abs(x1)", {}), {0.0, 0.0}, {});
  CHECK(a0.g[0] == 1.0);  // right-hand derivative
  CHECK(a0.kink);
  const Dual2 a1 = eval2(parse("abs(x1)", {}), {-2.0, 0.0}, {});
  CHECK(a1.v == 2.0);
  CHECK(a1.g[0] == -1.0);
}

TEST_CASE("domain errors", "[expr]") {
  CHECK_THROWS_AS(eval2(parse("ln(x1)", {}), {0.0, 0.0}, {}), DomainError);
  CHECK_THROWS_AS(eval2(parse("sqrt(x1)", {}), {-1.0, 0.0}, {}), DomainError);
  CHECK_THROWS_AS(eval2(parse("1/x1", {}), {0.0, 0.0}, {}), DomainError);
  CHECK_THROWS_AS(eval2(parse("x1^-2", {}), {0.0, 0.0}, {}), DomainError);
  CHECK_THROWS_AS(eval2(parse("x1^0.5", {}), {-1.0, 0.0}, {}), DomainError);
  CHECK_THROWS_AS(eval2(parse("x1 + k", {"k"}), {0.0, 0.0}, {}), std::invalid_argument);
  // integer powers of negative bases are fine
  CHECK(eval2(parse("x1^3", {}), {-2.0, 0.0}, {}).v == -8.0);
}

TEST_CASE("third derivatives", "[expr]") {
  CHECK_THAT(third_derivative(parse("x1^3", {}), {0.7, -0.2}, {}, 0, 0, 0), WithinAbs(6.0, 1e-6));
  CHECK_THAT(third_derivative(parse("x1^3", {}), {-3.0, 0.0}, {}, 0, 0, 0), WithinAbs(6.0, 1e-6));
  CHECK_THAT(third_derivative(parse("x2^2*x1", {}), {0.0, 0.0}, {}, 0, 1, 1), WithinAbs(2.0, 1e-6));
  CHECK_THAT(third_derivative(parse("x2^2*x1", {}), {0.0, 0.0}, {}, 1, 0, 1), WithinAbs(2.0, 1e-6));
  CHECK_THAT(third_derivative(parse("sin(x1)", {}), {0.0, 0.0}, {}, 0, 0, 0), WithinAbs(-1.0, 1e-6));
}

TEST_CASE("AD matches central differences on random polynomials", "[expr][property]") {
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int n = 0; n < 60; ++n) {
    const Expr e = parse(random_expr(rng, 3, true), {});
    const Point p{u(rng), u(rng)};
    const Dual2 d = eval2(e, p, {});
    const double h = 1e-6;
    for (int i = 0; i < 2; ++i) {
      Point pp = p, pm = p;
      pp[i] += h;
      pm[i] -= h;
      const double fd = (eval2(e, pp, {}).v - eval2(e, pm, {}).v) / (2 * h);
      CHECK(std::fabs(fd - d.g[i]) <= 1e-7 * std::fmax(1.0, std::fabs(d.g[i])));
      for (int j = 0; j < 2; ++j) {
        const double fdh = (eval2(e, pp, {}).g[j] - eval2(e, pm, {}).g[j]) / (2 * h);
        CHECK(std::fabs(fdh - d.hess(i, j)) <= 1e-5 * std::fmax(1.0, std::fabs(d.hess(i, j))));
      }
    }
  }
}

TEST_CASE("print and re-parse round trip", "[expr][property]") {
  std::mt19937 rng(7);
  for (int n = 0; n < 100; ++n) {
    const std::string src = random_expr(rng, 1 + n % 4, false);
    const Expr e = parse(src, {"k"});
    const Expr again = parse(e.str(), {"k"});
    INFO(src << "  ->  " << e.str());
    CHECK(again == e);
    CHECK(parse(again.str(), {"k"}) == e);
  }
}
