#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "crossreg/transition.hpp"

using namespace crossreg;
using Catch::Matchers::WithinAbs;

TEST_CASE("catalog values at the origin", "[transition]") {
  const auto lin = builtin("st_linear");
  CHECK(lin(0.5) == 0.5);
  CHECK(lin.d1(0.5).g[0] == 1.0);

  const auto phi1 = builtin("phi1_hopf");
  CHECK(phi1(0.0) == 2.0);
  CHECK(phi1.d1(0.0).g[0] == 0.0);
  const auto psi1 = builtin("psi1_hopf");
  CHECK(psi1(0.0) == 1.75);
  CHECK(psi1.d1(0.0).g[0] == 0.0);

  CHECK(builtin("phiB")(0.0) == 1.0);
  CHECK(builtin("psiC02")(0.0) == 0.0);
  CHECK_THROWS_AS(builtin("nope"), std::invalid_argument);
}

TEST_CASE("eval_scaled applies the chain rule", "[transition]") {
  const ScaledValue a = builtin("st_linear").eval_scaled(0.005, 0.01);
  CHECK_THAT(a.value, WithinAbs(0.5, 1e-15));
  CHECK_THAT(a.d1, WithinAbs(100.0, 1e-10));
  const ScaledValue b = builtin("psiC02").eval_scaled(20.0, 1.0);
  CHECK_THAT(b.value, WithinAbs(1.0, 1e-8));
  const ScaledValue c = builtin("st_cubic").eval_scaled(0.0, 0.01);
  CHECK(c.value == 0.0);
  CHECK_THAT(c.d1, WithinAbs(150.0, 1e-10));
  // second derivative of 3y/2 - y^3/2 at y = 0.5 is -1.5, scaled by 1/eta^2
  const ScaledValue d = builtin("st_cubic").eval_scaled(0.005, 0.01);
  CHECK_THAT(d.d2, WithinAbs(-1.5e4, 1e-6));
}

TEST_CASE("piece boundaries use the right piece and flag kinks", "[transition]") {
  const auto c01 = builtin("psiC01");
  const auto j = c01.d1(0.0);
  CHECK(j.kink);
  CHECK(j.g[0] == 1.5);  // right piece 3s/2 - s^3/2
  CHECK_FALSE(c01.d1(0.3).kink);
  const ScaledValue sv = c01.eval_scaled(0.0, 0.1);
  CHECK(sv.on_kink);
}

TEST_CASE("check_contract on the catalog", "[transition]") {
  for (const std::string& name : builtin_names()) {
    const ContractReport r = check_contract(builtin(name));
    INFO(name);
    if (name == "psi2_curve") {
      // outer pieces as written: swapped limits and a jump at s = 1
      CHECK_FALSE(r.continuous);
      CHECK_FALSE(r.limits_ok);
      CHECK_THAT(r.limit_plus, WithinAbs(-1.0, 1e-5));
      CHECK_THAT(r.limit_minus, WithinAbs(1.0, 1e-5));
    } else {
      CHECK(r.ok());
      CHECK(r.violations.empty());
    }
  }
  const ContractReport q = check_contract(builtin("psi_nonmono_quintic"));
  CHECK(q.continuous);
  CHECK_FALSE(q.monotone);
  const ContractReport l = check_contract(builtin("st_linear"));
  CHECK(l.monotone);
  CHECK(l.sotomayor_teixeira);
}

TEST_CASE("broken entry reports a jump", "[transition]") {
  const TransitionFunction t("broken", {{-INFINITY, 0.0, "s - 1"}, {0.0, INFINITY, "1"}}, false, false);
  const ContractReport r = check_contract(t);
  CHECK_FALSE(r.continuous);
  CHECK_FALSE(r.ok());
  CHECK_FALSE(r.violations.empty());
  CHECK_THROWS(TransitionFunction("gap", {{-INFINITY, 0.0, "s"}, {1.0, INFINITY, "1"}}, false, false));
}

TEST_CASE("seams and sign agreement", "[transition][property]") {
  const auto q = builtin("psi_nonmono_quintic");
  CHECK_THAT(q.piece_value(1, 1.0), WithinAbs(1.0, 1e-12));
  CHECK_THAT(q.piece_value(1, -1.0), WithinAbs(-1.0, 1e-12));
  for (const char* name : {"st_linear", "st_cubic"}) {
    const auto t = builtin(name);
    for (double s : {-50.0, -3.0, -1.0, 1.0, 1.5, 7.0, 1e5}) CHECK(t(s) == (s > 0 ? 1.0 : -1.0));
  }
}

TEST_CASE("piecewise derivatives match finite differences", "[transition][property]") {
  for (const std::string& name : builtin_names()) {
    const auto t = builtin(name);
    for (double s = -2.95; s < 3.0; s += 0.1) {
      if (t.on_boundary(s)) continue;
      const double h = 1e-6;
      if (t.piece_index(s - h) != t.piece_index(s + h)) continue;
      const double fd = (t(s + h) - t(s - h)) / (2 * h);
      INFO(name << " at " << s);
      CHECK_THAT(t.d1(s).g[0], WithinAbs(fd, 1e-6 * std::fmax(1.0, std::fabs(fd))));
    }
  }
}
