#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "crossreg/acceptance.hpp"
#include "crossreg/classify.hpp"

using namespace crossreg;
using Catch::Matchers::WithinAbs;

TEST_CASE("panel examples", "[classify]") {
  CHECK(classify_origin(PiecewiseSystem("1", "2", "2", "1")).label == ClassLabel::A0);
  CHECK(classify_origin(PiecewiseSystem("2", "1", "-1", "-2")).label == ClassLabel::B0);

  const auto c01 = classify_origin(PiecewiseSystem("1", "-2", "2", "1"));
  CHECK(c01.label == ClassLabel::C0);
  CHECK(c01.transient);
  REQUIRE(c01.first_return);
  CHECK(c01.first_return->ok);
  CHECK_THAT(c01.find("alphaZ")->value, WithinAbs(-0.25, 1e-15));

  const auto c02 = classify_origin(PiecewiseSystem("1", "2", "2", "-1"));
  CHECK(c02.label == ClassLabel::C0);
  CHECK_FALSE(c02.transient);
  CHECK_FALSE(c02.first_return);
}

TEST_CASE("B1 from the double pseudo-equilibrium family", "[classify]") {
  // a = b = c1 = c2 = 1, alpha = 0
  const auto r = classify_origin(PiecewiseSystem("1 - x1", "1", "-1", "-1 + x2"));
  CHECK(r.label == ClassLabel::B1);
  CHECK_THAT(r.find("(detZ)_x1(0) != 0")->value, WithinAbs(1.0, 1e-15));
  CHECK_THAT(r.find("(detZ)_x2(0) != 0")->value, WithinAbs(1.0, 1e-15));
}

TEST_CASE("A1 regular fold", "[classify]") {
  const auto r = classify_origin(PiecewiseSystem("x2", "1", "1", "1"));
  CHECK(r.label == ClassLabel::A1);
  // degenerate tangency is not a fold
  CHECK(classify_origin(PiecewiseSystem("x2^2", "1", "1", "1")).label == ClassLabel::Unclassified);
}

TEST_CASE("is_transient", "[classify]") {
  CHECK(is_transient(PiecewiseSystem("1", "-2", "2", "1")));
  CHECK_FALSE(is_transient(PiecewiseSystem("1", "2", "2", "-1")));
  CHECK(is_transient(PiecewiseSystem("1", "-1", "1", "1")));
  CHECK_THROWS_AS(is_transient(PiecewiseSystem("1", "2", "2", "1")), std::invalid_argument);

  const TransienceCheck t = transience_numeric(PiecewiseSystem("1", "-2", "2", "1"));
  CHECK(t.all_reach);
  CHECK(t.samples == 32);
}

TEST_CASE("alpha = -1 falls back to C1 or Unclassified", "[classify]") {
  // constant fields: return map is exactly linear with slope 1, no cubic term
  const auto r = classify_origin(PiecewiseSystem("1", "-1", "1", "1"));
  CHECK(r.label == ClassLabel::Unclassified);
  REQUIRE(r.first_return);
  CHECK(r.first_return->ok);
  CHECK(std::isnan(r.first_return->beta_fit));
  CHECK(r.find("beta_unidentifiable") != nullptr);
  CHECK_THAT(r.first_return->eta_fit, WithinAbs(0.0, 1e-6));

  // a cubic term in X makes the return map genuinely nonlinear
  const auto c1 = classify_origin(PiecewiseSystem("1 + x2^2", "-1", "1", "1"));
  REQUIRE(c1.first_return);
  CHECK(c1.first_return->ok);
  CHECK(std::fabs(c1.first_return->eta_fit) > 1e-4);
  CHECK(c1.label == ClassLabel::C1);
}

TEST_CASE("first return fit recovers alpha^2 slope", "[classify][property]") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 6; ++k) {
    const PiecewiseSystem s = random_constant_transient(rng);
    const FirstReturnExpansion e = first_return_coefficients(s);
    REQUIRE(e.ok);
    // constant fields: the map is linear, so the fitted corrections vanish
    CHECK(std::fabs(e.c2) < 1e-6);
    CHECK(e.fit_residual < 1e-9);
  }
}

TEST_CASE("classification is invariant under scaling the fields", "[classify][property]") {
  const char* sys[][4] = {{"1", "2", "2", "1"}, {"2", "1", "-1", "-2"}, {"1", "-2", "2", "1"}, {"1 - x1", "1", "-1", "-1 + x2"}};
  for (const auto& s : sys)
    for (double c : {1e-3, 7.0, 1e4}) {
      const std::string k = "(" + std::to_string(c) + ")*";
      const PiecewiseSystem a(s[0], s[1], s[2], s[3]);
      const PiecewiseSystem b(k + "(" + s[0] + ")", k + "(" + s[1] + ")", k + "(" + s[2] + ")", k + "(" + s[3] + ")");
      CHECK(classify_origin(a).label == classify_origin(b).label);
    }
}
