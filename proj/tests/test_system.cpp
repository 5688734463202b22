#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "crossreg/system.hpp"

using namespace crossreg;
using Catch::Matchers::WithinAbs;

namespace {
PiecewiseSystem constant(double x1, double x2, double y1, double y2) {
  auto s = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  return PiecewiseSystem(s(x1), s(x2), s(y1), s(y2));
}
}  // namespace

TEST_CASE("classify_point examples", "[system]") {
  CHECK(classify_point(constant(1, 2, 2, 1), {0.0, 0.5}).kind == RegionKind::Crossing);
  const RegionVerdict b0 = classify_point(constant(2, 1, -1, -2), {0.0, 0.5});
  CHECK(b0.kind == RegionKind::Escaping);
  CHECK(b0.Xf == 2.0);
  CHECK(b0.Yf == -1.0);
  CHECK(classify_point(constant(2, 1, -1, -2), {0.0, -0.5}).kind == RegionKind::Sliding);
  CHECK(classify_point(constant(0, 1, 1, 1), {0.0, 0.5}).kind == RegionKind::Tangency);
  CHECK_THROWS_AS(classify_point(constant(1, 2, 2, 1), {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(classify_point(constant(1, 2, 2, 1), {0.3, 0.5}), std::invalid_argument);
}

TEST_CASE("sliding field examples", "[system]") {
  CHECK_THAT(sliding_field(constant(2, 1, -1, -2), Branch{1, -1}, 0.5).value, WithinAbs(-1.0, 1e-15));
  CHECK_THAT(sliding_field(constant(1, 2, -1, 2), Branch{1, 1}, 0.5).value, WithinAbs(2.0, 1e-15));
  const SlidingSample d = sliding_field(constant(1, 1, 1, -1), Branch{1, 1}, 0.5);
  CHECK(d.degenerate);
}

TEST_CASE("pseudo-equilibria", "[system]") {
  // Affine family at alpha = 0.3: Sigma2- slides with component -(x1 + 0.3)/2.3.
  const PiecewiseSystem s("a - b*c2*x1", "b + a*alpha", "-a", "-b + a*c1*x2",
                          {{"a", 1}, {"b", 1}, {"c1", 1}, {"c2", 1}, {"alpha", 0.3}});
  const auto pe = find_pseudo_equilibria(s, Branch{2, -1});
  REQUIRE(pe.size() == 1);
  CHECK_THAT(pe[0].p[0], WithinAbs(-0.3, 1e-11));
  CHECK(pe[0].hyperbolic);
  CHECK_THAT(pe[0].derivative, WithinAbs(-1.0 / 2.3, 1e-9));
  CHECK(find_pseudo_equilibria(s, Branch{2, 1}).empty());
  // Sliding field -x2 on Sigma1: root only at the excluded origin.
  const PiecewiseSystem lin("1", "-x2", "-1", "-x2");
  CHECK(find_pseudo_equilibria(lin, Branch{1, 1}).empty());
  CHECK(find_pseudo_equilibria(lin, Branch{1, -1}).empty());
  CHECK(find_pseudo_equilibria(constant(1, 2, 2, 1), Branch{1, 1}).empty());
}

TEST_CASE("fold_scan examples", "[system]") {
  const auto f = fold_scan(PiecewiseSystem("x2", "1", "1", "1"));
  bool found = false;
  for (const auto& r : f)
    if (r.axis == 1 && r.field == 'X') {
      found = true;
      CHECK_THAT(r.p[1], WithinAbs(0.0, 1e-12));
      CHECK(r.fold);
      CHECK(r.regular_fold);
      CHECK_THAT(r.second_order_value, WithinAbs(1.0, 1e-12));
    }
  CHECK(found);
  CHECK(fold_scan(constant(1, 2, 2, 1)).empty());
  bool degenerate = false;
  for (const auto& r : fold_scan(PiecewiseSystem("x2^2", "1", "1", "1")))
    if (r.axis == 1 && r.field == 'X') {
      degenerate = true;
      CHECK_FALSE(r.fold);
    }
  CHECK(degenerate);
}

TEST_CASE("sliding combination is tangent and alpha in [0,1]", "[system][property]") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int n = 0; n < 200; ++n) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.6f + %.6f*x2", u(rng), u(rng));
    const std::string X1 = buf;
    std::snprintf(buf, sizeof buf, "%.6f + %.6f*x1*x2", u(rng), u(rng));
    const std::string Y1 = buf;
    const PiecewiseSystem s(X1, "x1 + 1", Y1, "x2 - 1");
    for (int k = 1; k < 20; ++k) {
      for (int sign : {1, -1}) {
        const Point p{0.0, sign * k / 20.0};
        const RegionVerdict v = classify_point(s, p);
        if (v.kind != RegionKind::Sliding && v.kind != RegionKind::Escaping) continue;
        const SlidingSample ss = sliding_field(s, Branch{1, sign}, k / 20.0);
        CHECK(ss.alpha >= 0.0);
        CHECK(ss.alpha <= 1.0);
        CHECK(std::fabs(ss.normal_residual) < 1e-10);
      }
    }
  }
}

TEST_CASE("verdicts are invariant under positive rescaling", "[system][property]") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0), c(0.1, 10.0);
  for (int n = 0; n < 200; ++n) {
    const double x1 = u(rng), x2 = u(rng), y1 = u(rng), y2 = u(rng);
    const double a = c(rng), b = c(rng);
    const PiecewiseSystem s = constant(x1, x2, y1, y2);
    const PiecewiseSystem t = constant(a * x1, a * x2, b * y1, b * y2);
    for (const Point p : {Point{0, 0.4}, Point{0, -0.4}, Point{0.4, 0}, Point{-0.4, 0}})
      CHECK(classify_point(s, p).kind == classify_point(t, p).kind);
  }
}

TEST_CASE("fold_scan finds every sign change of a cubic", "[system][property]") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> r(-0.9, 0.9);
  for (int n = 0; n < 30; ++n) {
    const double a = r(rng), b = r(rng), c = r(rng);
    char buf[200];
    std::snprintf(buf, sizeof buf, "(x2 - %.6f)*(x2 - %.6f)*(x2 - %.6f)", a, b, c);
    const PiecewiseSystem s(buf, "1", "1", "1");
    const auto folds = fold_scan(s);
    // brute force on a 10x finer grid
    int brute = 0;
    const int N = 10 * 2 * 512;
    double prev = (-1 - a) * (-1 - b) * (-1 - c);
    for (int k = 1; k <= N; ++k) {
      const double x = -1.0 + 2.0 * k / N;
      const double v = (x - a) * (x - b) * (x - c);
      if ((v < 0) != (prev < 0) && v != 0.0) ++brute;
      prev = v;
    }
    int found = 0;
    for (const auto& f : folds)
      if (f.axis == 1 && f.field == 'X') ++found;
    INFO(buf);
    CHECK(found >= brute);
  }
}
