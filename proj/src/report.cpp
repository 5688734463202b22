#include "crossreg/report.hpp"

#include <cmath>

namespace crossreg {

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

namespace {

Json vec(const Vec2& v) { return Json::array({number(v[0]), number(v[1])}); }

Json cplx(const std::complex<double>& z) { return Json::array({number(z.real()), number(z.imag())}); }

Json mat(const std::array<double, 4>& m) {
  return Json::array({Json::array({number(m[0]), number(m[1])}), Json::array({number(m[2]), number(m[3])})});
}

Json values(const std::map<std::string, double>& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[k] = number(v);
  return j;
}

Json strings(const std::vector<std::string>& s) {
  Json j = Json::array();
  for (const auto& x : s) j.push_back(x);
  return j;
}

}  // namespace

Json to_json(const ClassificationResult& r) {
  Json j;
  j["class_label"] = to_string(r.label);
  j["matched"] = strings(r.matched);
  j["transient"] = r.transient;
  Json w = Json::array();
  for (const auto& x : r.witnesses) w.push_back({{"name", x.name}, {"value", number(x.value)}, {"margin", number(x.margin)}});
  j["witnesses"] = w;
  if (r.first_return) {
    const auto& f = *r.first_return;
    j["first_return"] = {{"ok", f.ok},
                         {"error", f.error},
                         {"alpha", number(f.alpha)},
                         {"c1", number(f.alpha * f.alpha)},
                         {"c2", number(f.c2)},
                         {"beta", number(f.beta_fit)},
                         {"eta", number(f.eta_fit)},
                         {"fit_residual", number(f.fit_residual)},
                         {"radius", number(f.radius)}};
  }
  j["diagnostics"] = strings(r.diagnostics);
  return j;
}

Json to_json(const OriginData& d) {
  return {{"X", vec({d.X1, d.X2})},
          {"Y", vec({d.Y1, d.Y2})},
          {"DX", mat(d.DX)},
          {"DY", mat(d.DY)},
          {"detZ", number(d.detZ)},
          {"detZ_x1", number(d.detZ_x1)},
          {"detZ_x2", number(d.detZ_x2)},
          {"trDX", number(d.trDX)},
          {"trDY", number(d.trDY)},
          {"detDX", number(d.detDX)},
          {"detDY", number(d.detDY)},
          {"detD(X+Y)", number(d.detDXY)},
          {"phi(0)", number(d.phi)},
          {"phi'(0)", number(d.dphi)},
          {"psi(0)", number(d.psi)},
          {"psi'(0)", number(d.dpsi)},
          {"f", number(d.f)},
          {"G", vec(d.G)},
          {"G_W", vec(d.G_W)},
          {"G_T", vec(d.G_T)},
          {"det[DG]", number(d.detDG)}};
}

Json to_json(const ClosedForm& c) {
  return {{"det", number(c.det)}, {"tr", number(c.tr)}, {"terms", values(c.terms)}};
}

Json to_json(const HyperbolicityVerdict& v) {
  Json j = {{"gate", v.gate},
            {"gate_boundary", v.gate_boundary},
            {"det_case", v.det_case},
            {"tr_case", v.tr_case},
            {"real_eigenvalues", v.real_eigenvalues},
            {"table_verdict", to_string(v.table_verdict)},
            {"verdict", to_string(v.verdict)},
            {"almost_every_point", v.almost_every_point},
            {"det", number(v.det_value)},
            {"tr", number(v.tr_value)},
            {"eigenvalues", Json::array({cplx(v.lambda1), cplx(v.lambda2)})},
            {"notes", strings(v.notes)}};
  if (!v.det_xi_case.empty()) j["det_xi_case"] = v.det_xi_case;
  if (!v.tr_xi_case.empty()) j["tr_xi_case"] = v.tr_xi_case;
  return j;
}

Json to_json(const EquilibriumScan& s) {
  Json loci = Json::array();
  for (const auto& L : s.loci)
    loci.push_back({{"cells", L.cells.size()}, {"centroid", vec(L.centroid)}, {"lo", vec(L.lo)}, {"hi", vec(L.hi)}});
  return {{"h_index", s.h_index}, {"grid", s.grid}, {"cell", number(s.cell)}, {"g_filter", s.g_filter}, {"loci", loci}};
}

Json to_json(const std::vector<Equilibrium>& eq) {
  Json j = Json::array();
  for (const auto& e : eq)
    j.push_back({{"p", vec(e.p)},
                 {"residual", number(e.residual)},
                 {"jacobian", mat(e.jacobian)},
                 {"eigenvalues", Json::array({cplx(e.lambda1), cplx(e.lambda2)})}});
  return j;
}

Json to_json(const BifurcationCertificate& c) {
  Json conds = Json::array();
  for (const auto& x : c.conditions)
    conds.push_back({{"name", x.name}, {"value", number(x.value)}, {"threshold", number(x.threshold)}, {"pass", x.pass}});
  return {{"kind", to_string(c.kind)},
          {"location", {{"u0", vec(c.u0)}, {"mu0", number(c.mu0)}}},
          {"conditions", conds},
          {"eigen_data",
           {{"lambda1", cplx(c.lambda1)}, {"lambda2", cplx(c.lambda2)}, {"v", vec(c.v)}, {"w", vec(c.w)}}},
          {"values", values(c.values)},
          {"notes", strings(c.notes)}};
}

Json to_json(const FamilyTranscritical& t) {
  Json j = to_json(t.cert);
  j["alpha0"] = number(t.alpha0);
  j["cross_checks"] = {{"A5", number(t.A5)},         {"A5_ad", number(t.A5_ad)},
                       {"A5_ref", number(t.A5_ref)}, {"A6", number(t.A6)},
                       {"A6_ad", number(t.A6_ad)},   {"line_residual", number(t.line_residual)}};
  return j;
}

Json to_json(const FamilySaddleNode& t) {
  Json j = to_json(t.cert);
  j["reference_normalization"] = {{"w.g_mu", number(t.wg_mu)},
                              {"w.g_mu_ref", number(t.wg_mu_ref)},
                              {"w.D2g(v,v)", number(t.wD2g_vv)},
                              {"w.D2g(v,v)_ref", number(t.wD2g_vv_ref)},
                              {"w.D2g(v,v)_with_x2^2_term", number(t.wD2g_vv_exact)}};
  return j;
}

Json to_json(const FixedEtaSaddleNode& t) {
  Json j = to_json(t.cert);
  j["p0"] = number(t.p0);
  j["eta0"] = number(t.eta0);
  j["alpha0"] = number(t.alpha0);
  j["B5_ad"] = number(t.B5_ad);
  j["B5_ref"] = number(t.B5_ref);
  return j;
}

Json to_json(const HopfAnalysis& h) {
  Json j = {{"kind", "Hopf"},
            {"mu_star", number(h.mu_star)},
            {"omega", number(h.omega)},
            {"eigenvalues", Json::array({cplx(h.lambda1), cplx(h.lambda2)})},
            {"trace_slope", number(h.trace_slope)},
            {"lyapunov_estimate", number(h.lyapunov_estimate)},
            {"lyapunov_sign", h.lyapunov_estimate > 0 ? "positive (subcritical)" : h.lyapunov_estimate < 0 ? "negative (supercritical)" : "zero"}};
  j["lyapunov_formula_value"] = h.formula_value ? number(*h.formula_value) : Json(nullptr);
  j["notes"] = strings(h.notes);
  return j;
}

Json to_json(const Trajectory& t) {
  Json ev = Json::array();
  for (const auto& e : t.events)
    ev.push_back({{"t", number(e.t)}, {"kind", to_string(e.kind)}, {"x", vec(e.x)}, {"note", e.note}});
  Json j = {{"samples", t.samples.size()}, {"events", ev}, {"failed", t.failed}, {"error", t.error}};
  if (!t.samples.empty()) {
    j["end"] = vec(t.end());
    j["end_time"] = number(t.end_time());
  }
  return j;
}

Json to_json(const std::vector<CriterionResult>& r) {
  Json j = Json::array();
  for (const auto& c : r)
    j.push_back({{"id", c.id},
                 {"name", c.name},
                 {"pass", c.pass},
                 {"seconds", number(c.seconds)},
                 {"budget", number(c.budget)},
                 {"detail", c.detail}});
  return j;
}

}  // namespace crossreg
