#include <catch2/catch_amalgamated.hpp>

#include "crossreg/acceptance.hpp"
#include "crossreg/equilibria.hpp"

using namespace crossreg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

RegularizedField hopf_field(double mu, double eps = 0.1, double eta = 0.1) {
  RegularizationSpec s;
  s.epsilon = eps;
  s.eta = eta;
  s.phi = builtin("phi1_hopf");
  s.psi = builtin("psi1_hopf");
  return RegularizedField(PiecewiseSystem("-x2 + (mu - x2^2)*x1 + 5/9", "x1 + 5/9", "1", "1", {{"mu", mu}}), s);
}

RegularizedField st_field(const PiecewiseSystem& s, double eps, double eta) {
  RegularizationSpec sp;
  sp.epsilon = eps;
  sp.eta = eta;
  sp.phi = builtin("st_linear");
  sp.psi = builtin("st_linear");
  return RegularizedField(s, sp);
}

bool close_rel(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b)); }

}  // namespace

TEST_CASE("Hopf origin data and closed form", "[equilibria]") {
  const OriginData d = origin_data(hopf_field(0.0));
  CHECK(d.phi == 2.0);
  CHECK(d.psi == 1.75);
  CHECK(d.dphi == 0.0);
  CHECK(d.dpsi == 0.0);
  CHECK_THAT(d.detZ, WithinAbs(0.0, 1e-15));
  // (X1, Y1) = f (X2, Y2)
  CHECK_THAT(d.X1, WithinAbs(d.f * d.X2, 1e-10));
  CHECK_THAT(d.Y1, WithinAbs(d.f * d.Y2, 1e-10));

  const ClosedForm c0 = origin_jacobian_closed_form(d);
  CHECK_THAT(c0.tr, WithinAbs(0.0, 1e-12));
  CHECK_THAT(c0.det, WithinRel(81.0 / 16.0, 1e-12));
  const ClosedForm c1 = origin_jacobian_closed_form(origin_data(hopf_field(0.1)));
  CHECK_THAT(c1.tr, WithinRel(9.0 / 40.0, 1e-12));
}

TEST_CASE("Hopf eigenvalues", "[equilibria]") {
  for (double mu : {-0.1, 0.0, 0.1}) {
    const auto l = eigenvalues(hopf_field(mu).jacobian({0, 0}));
    const std::complex<double> r = std::sqrt(std::complex<double>(mu * mu - 4.0));
    const std::complex<double> e1 = 9.0 / 8.0 * (mu + r), e2 = 9.0 / 8.0 * (mu - r);
    CHECK(std::abs(l[0] - e1) < 1e-9);
    CHECK(std::abs(l[1] - e2) < 1e-9);
  }
}

TEST_CASE("closed form matches the AD Jacobian on random cases", "[equilibria][property]") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 40; ++k) {
    const OracleCase oc = jacobian_oracle_case(rng, k % 2 == 1);
    const RegularizedField f(oc.sys, oc.spec);
    const auto J = f.jacobian({0, 0});
    const Vec2 z = f({0, 0});
    REQUIRE(std::hypot(z[0], z[1]) < 1e-12);
    const ClosedForm c = origin_jacobian_closed_form(origin_data(f));
    CHECK(close_rel(c.det, J[0] * J[3] - J[1] * J[2], 1e-8));
    CHECK(close_rel(c.tr, J[0] + J[3], 1e-8));
  }
}

TEST_CASE("closed form preconditions", "[equilibria]") {
  // A0 panel: det[Z](0) = 3 != 0
  CHECK_THROWS_AS(origin_jacobian_closed_form(origin_data(st_field(PiecewiseSystem("1", "2", "2", "1"), 0.1, 0.1))),
                  PreconditionError);
}

TEST_CASE("tables decision on the Hopf family", "[equilibria]") {
  const HyperbolicityVerdict v0 = tables_decision(hopf_field(0.0));
  CHECK(v0.gate == "A0");
  CHECK(v0.det_case == "2_d");
  CHECK(v0.tr_case == "1_t");
  CHECK_FALSE(v0.real_eigenvalues);
  CHECK(v0.table_verdict == Hyperbolicity::NonHyperbolic);
  CHECK(v0.verdict == Hyperbolicity::NonHyperbolic);
  CHECK(v0.notes.empty());

  const HyperbolicityVerdict v1 = tables_decision(hopf_field(0.1));
  CHECK(v1.tr_case == "2_t");
  CHECK(v1.verdict == Hyperbolicity::Hyperbolic);
  CHECK(v1.table_verdict == Hyperbolicity::Hyperbolic);
}

TEST_CASE("class gate", "[equilibria]") {
  // C0 origin is outside the tables
  CHECK_THROWS_AS(tables_decision(st_field(PiecewiseSystem("1", "-2", "2", "1"), 0.1, 0.1)), PreconditionError);
}

TEST_CASE("Newton search finds the regularized equilibria", "[equilibria]") {
  const auto eq = find_equilibria(hopf_field(0.0), 0.5, 32);
  REQUIRE_FALSE(eq.empty());
  bool origin = false;
  for (const auto& e : eq) {
    CHECK(e.residual < 1e-10);
    origin = origin || std::hypot(e.p[0], e.p[1]) < 1e-9;
  }
  CHECK(origin);

  // constant A0 panel: no equilibria anywhere
  CHECK(find_equilibria(st_field(PiecewiseSystem("1", "2", "2", "1"), 0.01, 0.01)).empty());
}

TEST_CASE("equilibrium-locus scan", "[equilibria]") {
  const EquilibriumScan s0 = equilibrium_scan(st_field(PiecewiseSystem("1", "2", "2", "1"), 0.01, 0.01));
  CHECK(s0.loci.empty());
  CHECK(s0.h_index == 2);

  const EquilibriumScan s1 = equilibrium_scan(hopf_field(0.0), 100, 0.5);
  REQUIRE_FALSE(s1.loci.empty());
  bool near_origin = false;
  for (const auto& L : s1.loci)
    near_origin = near_origin || (L.lo[0] <= 0.01 && L.hi[0] >= -0.01 && L.lo[1] <= 0.01 && L.hi[1] >= -0.01);
  CHECK(near_origin);

  // every Newton equilibrium lies in a flagged locus (within one cell)
  for (const auto& e : find_equilibria(hopf_field(0.0), 0.5, 16)) {
    bool inside = false;
    for (const auto& L : s1.loci)
      inside = inside || (e.p[0] >= L.lo[0] - s1.cell && e.p[0] <= L.hi[0] + s1.cell &&
                          e.p[1] >= L.lo[1] - s1.cell && e.p[1] <= L.hi[1] + s1.cell);
    CHECK(inside);
  }
}
