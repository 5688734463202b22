#include <catch2/catch_amalgamated.hpp>

#include "crossreg/bifurcation.hpp"
#include "crossreg/flow.hpp"

using namespace crossreg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

RegularizationSpec st_spec(const char* phi, const char* psi, double eps, double eta) {
  RegularizationSpec s;
  s.epsilon = eps;
  s.eta = eta;
  s.phi = builtin(phi);
  s.psi = builtin(psi);
  return s;
}

// ST-like transition with phi(0) = d
TransitionFunction shifted_phi(double d) {
  char b[96];
  std::snprintf(b, sizeof b, "(%.17g) + s - (%.17g)*s^2", d, d);
  return TransitionFunction("phi_shift", {{-INFINITY, -1, "-1"}, {-1, 1, b}, {1, INFINITY, "1"}}, true, true);
}

std::vector<SignTuple> all_signs() {
  std::vector<SignTuple> out;
  for (int a : {1, -1})
    for (int b : {1, -1})
      for (int c1 : {1, -1})
        for (int c2 : {1, -1}) out.push_back({a, b, c1, c2});
  return out;
}

RegularizedField hopf_field(double mu, double eps, double eta) {
  RegularizationSpec s = st_spec("phi1_hopf", "psi1_hopf", eps, eta);
  return RegularizedField(PiecewiseSystem("-x2 + (mu - x2^2)*x1 + 5/9", "x1 + 5/9", "1", "1", {{"mu", mu}}), s);
}

}  // namespace

TEST_CASE("Sotomayor model systems", "[bifurcation]") {
  const auto sn = sotomayor_check({expr_param_field("mu - x1^2", "-x2"), {0, 0}, 0});
  CHECK(sn.kind == BifurcationKind::SaddleNode);
  CHECK_THAT(sn.values.at("w.g_mu"), WithinAbs(1.0, 1e-10));
  CHECK_THAT(sn.values.at("w.D2g(v,v)"), WithinAbs(-2.0, 1e-10));

  const auto tc = sotomayor_check({expr_param_field("mu*x1 - x1^2", "-x2"), {0, 0}, 0});
  CHECK(tc.kind == BifurcationKind::Transcritical);
  CHECK_THAT(tc.values.at("w.g_mu"), WithinAbs(0.0, 1e-10));
  CHECK_THAT(tc.values.at("w.Dg_mu v"), WithinAbs(1.0, 1e-10));
  CHECK_THAT(tc.values.at("w.D2g(v,v)"), WithinAbs(-2.0, 1e-10));

  const auto pf = sotomayor_check({expr_param_field("mu - x1^3", "-x2"), {0, 0}, 0});
  CHECK(pf.kind == BifurcationKind::None);

  CHECK_THROWS_AS(sotomayor_check({expr_param_field("mu - x1", "-x2"), {0, 0}, 0}), BifurcationError);
  CHECK_THROWS_AS(sotomayor_check({expr_param_field("mu - x1^2", "x2^2"), {0, 0}, 0}), BifurcationError);
}

TEST_CASE("affine chart preserves the certificate kind", "[bifurcation][property]") {
  const ParamField g = expr_param_field("mu - x1^2 + x1*x2", "-x2 + x1^2");
  const ParamField h = affine_chart(g, {2.0, 1.0, -0.5, 1.5}, {0.0, 0.0});
  CHECK(sotomayor_check({h, {0, 0}, 0}).kind == BifurcationKind::SaddleNode);
}

TEST_CASE("transcritical family certificate", "[bifurcation]") {
  const RegularizationSpec sp = st_spec("st_linear", "st_cubic", 0.5, 0.1);
  const FamilyTranscritical r = certify_family_transcritical({1, 1, 1, 1}, sp);
  CHECK(r.cert.kind == BifurcationKind::Transcritical);
  // psi(-alpha0 / 0.1) = 0.25 with st_cubic
  const double u = -r.alpha0 / 0.1;
  CHECK_THAT(1.5 * u - 0.5 * u * u * u, WithinAbs(0.25, 1e-12));
  CHECK(r.line_residual < 1e-10);
  CHECK_THAT(r.A5_ad, WithinRel(r.A5, 1e-6));
  CHECK_THAT(r.A6_ad, WithinRel(r.A6, 1e-6));
  CHECK(r.A5_ref == 0.0);  // phi''(0) = 0 for st_linear

  const FamilyTranscritical m = certify_family_transcritical({1, -1, 1, 1}, sp);
  CHECK(m.cert.kind == BifurcationKind::Transcritical);
  const double um = -m.alpha0 / 0.1;
  CHECK_THAT(1.5 * um - 0.5 * um * um * um, WithinAbs(-0.25, 1e-12));

  RegularizationSpec bad = sp;
  bad.epsilon = 3.0;
  CHECK_THROWS_AS(certify_family_transcritical({1, 1, 1, 1}, bad), std::exception);
}

TEST_CASE("transcritical family across sign tuples", "[bifurcation][property]") {
  const RegularizationSpec sp = st_spec("st_linear", "st_cubic", 0.5, 0.1);
  for (const SignTuple& s : all_signs()) {
    const FamilyTranscritical r = certify_family_transcritical(s, sp);
    CHECK(r.cert.kind == BifurcationKind::Transcritical);
    CHECK(r.line_residual < 1e-10);
    CHECK_THAT(r.A5_ad, WithinRel(r.A5, 1e-6));
    CHECK_THAT(r.A6_ad, WithinRel(r.A6, 1e-6));
  }
}

TEST_CASE("saddle-node family certificate", "[bifurcation]") {
  const RegularizationSpec sp = st_spec("st_linear", "st_linear", 0.1, 0.1);
  const FamilySaddleNode r = certify_family_saddlenode({1, 1, 1, 1}, sp);
  CHECK(r.cert.kind == BifurcationKind::SaddleNode);
  CHECK_THAT(r.wg_mu, WithinRel(0.5, 1e-12));
  CHECK_THAT(r.wD2g_vv_ref, WithinRel(-200.0, 1e-12));
  // the Y^ term x2^2 adds exactly 1
  CHECK_THAT(r.wD2g_vv, WithinRel(r.wD2g_vv_exact, 1e-10));
  CHECK_THAT(r.wD2g_vv, WithinRel(-199.0, 1e-10));

  const FamilySaddleNode f = certify_family_saddlenode({1, 1, 1, -1}, sp);
  CHECK(f.wD2g_vv_ref == -r.wD2g_vv_ref);

  RegularizationSpec half = sp;
  half.epsilon = 0.05;
  const FamilySaddleNode h = certify_family_saddlenode({1, 1, 1, 1}, half);
  CHECK_THAT(h.wD2g_vv_ref, WithinRel(2.0 * r.wD2g_vv_ref, 1e-12));

  for (const SignTuple& s : all_signs()) {
    const FamilySaddleNode q = certify_family_saddlenode(s, sp);
    CHECK(q.cert.kind == BifurcationKind::SaddleNode);
    CHECK_THAT(q.wg_mu, WithinRel(s.a / 2.0, 1e-12));
    CHECK_THAT(q.wD2g_vv, WithinRel(q.wD2g_vv_exact, 1e-10));
  }
}

TEST_CASE("fixed-eta saddle-node", "[bifurcation]") {
  RegularizationSpec sp = st_spec("st_linear", "st_cubic", 0.1, 0.1);
  sp.phi = shifted_phi(-0.05);
  const FixedEtaSaddleNode r = certify_fixed_eta_saddlenode({1, 1, 1, 1}, sp);
  CHECK(r.cert.kind == BifurcationKind::SaddleNode);
  CHECK_THAT(r.p0, WithinAbs(0.0, 1e-14));
  // eta0 = -2 a b phi(0) psi'(0) / c1
  CHECK_THAT(r.eta0, WithinRel(0.15, 1e-12));
  CHECK_THAT(r.wg_mu, WithinAbs(0.5, 1e-8));
  // AD coefficient for p0 = 0: 1/4 + phi'(0)/(2 phi(0) eps) + psi''(0)/(8 phi(0) psi'(0)^2)
  CHECK_THAT(r.B5_ad, WithinRel(0.25 + 1.0 / (2 * -0.05 * 0.1), 1e-9));

  // phi(0) = 0.5 gives eta0 < 0
  sp.phi = shifted_phi(0.5 - 1e-9);
  CHECK_THROWS_AS(certify_fixed_eta_saddlenode({1, 1, 1, 1}, sp), BifurcationError);

  RegularizationSpec pos = st_spec("st_linear", "st_cubic", 0.1, 0.1);
  pos.phi = shifted_phi(-0.05);
  pos.psi = TransitionFunction("psi_pos", {{-INFINITY, INFINITY, "2 + s^2"}}, false, false);
  CHECK_THROWS_AS(certify_fixed_eta_saddlenode({1, 1, 1, 1}, pos), BifurcationError);
}

TEST_CASE("Hopf analysis", "[bifurcation]") {
  const HopfAnalysis h = hopf_analysis(hopf_field(0.05, 0.025, 0.01), "mu", -0.1, 0.1);
  CHECK_THAT(h.mu_star, WithinAbs(0.0, 1e-10));
  CHECK_THAT(h.omega, WithinRel(9.0 / 4.0, 1e-10));
  CHECK_THAT(h.trace_slope, WithinRel(9.0 / 4.0, 1e-6));
  REQUIRE(h.formula_value);
  CHECK(*h.formula_value > 0.0);
  CHECK(h.lyapunov_estimate > 0.0);
  CHECK_THAT(h.lyapunov_estimate, WithinRel(*h.formula_value, 0.2));
  CHECK_THAT(hopf_u3_ref(0.1, 0.1), WithinRel(561.0, 0.01));

  CHECK_THROWS_AS(hopf_analysis(hopf_field(0.0, 0.025, 0.01), "mu", 0.05, 0.1), BifurcationError);
}

TEST_CASE("Lyapunov estimate on a normal form", "[bifurcation][property]") {
  // x' = -y + x (x^2 + y^2), y' = x + y (x^2 + y^2): a = 1/16 * 16 = 1
  const Expr f1 = parse_with_variables("-x2 + x1*(x1^2 + x2^2)", {"x1", "x2"});
  const Expr f2 = parse_with_variables("x1 + x2*(x1^2 + x2^2)", {"x1", "x2"});
  const auto F = [&](const Point& p) { return std::array<Dual2, 2>{eval2(f1, p, {}), eval2(f2, p, {})}; };
  CHECK_THAT(lyapunov_estimate(F, {0, 0}, 1e-3), WithinRel(2 * M_PI, 1e-6));
}

TEST_CASE("subcritical Hopf cycle radius scales like sqrt(mu)", "[bifurcation][property]") {
  // the reference coefficient is positive at eps = eta = 0.1, so the cycle exists for mu < 0
  std::vector<double> radii;
  for (double mu : {-1e-3, -4e-3, -9e-3}) {
    const auto r = find_limit_cycle(hopf_field(mu, 0.1, 0.1), 1e-4, 0.05);
    REQUIRE(r);
    radii.push_back(*r);
  }
  CHECK(radii[1] / radii[0] > 1.0);
  CHECK(radii[1] / radii[0] < 4.0);
  CHECK(radii[2] / radii[0] > 1.5);
  CHECK(radii[2] / radii[0] < 6.0);
  CHECK_FALSE(find_limit_cycle(hopf_field(1e-3, 0.1, 0.1), 1e-4, 0.05));
}
