#include "crossreg/bifurcation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "crossreg/equilibria.hpp"
#include "crossreg/flow.hpp"
#include "crossreg/roots.hpp"

namespace crossreg {

namespace {

using J3 = Jet<3>;

std::string fmt(const char* f, double a) {
  char b[160];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

std::string num(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "(%.17g)", v);
  return b;
}

// Largest-magnitude component made positive.
Vec2 orient(Vec2 v) {
  const double n = std::hypot(v[0], v[1]);
  v = {v[0] / n, v[1] / n};
  const double big = std::fabs(v[0]) >= std::fabs(v[1]) ? v[0] : v[1];
  if (big < 0) v = {-v[0], -v[1]};
  return v;
}

std::array<J3, 2> at(const SotomayorInput& in) {
  return in.g(J3::variable(in.u0[0], 0), J3::variable(in.u0[1], 1), J3::variable(in.mu0, 2));
}

ScaledValue tvals(const TransitionFunction& t, double s) { return t.eval_scaled(s, 1.0); }

void require_xi_zero(const RegularizationSpec& spec) {
  if (spec.xi != 0.0) throw BifurcationError("the sign-tuple families need xi = 0");
}

RegularizedField field_at(const PiecewiseSystem& sys, const RegularizationSpec& spec, const std::string& p,
                          double v) {
  return RegularizedField(sys.with_params({{p, v}}), spec);
}

}  // namespace

const char* to_string(BifurcationKind k) {
  switch (k) {
    case BifurcationKind::SaddleNode: return "SaddleNode";
    case BifurcationKind::Transcritical: return "Transcritical";
    case BifurcationKind::Hopf: return "Hopf";
    case BifurcationKind::None: return "None";
  }
  return "?";
}

const Condition* BifurcationCertificate::find(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return &c;
  return nullptr;
}

ParamField expr_param_field(const std::string& g1, const std::string& g2) {
  const Expr e1 = parse_with_variables(g1, {"x1", "x2", "mu"});
  const Expr e2 = parse_with_variables(g2, {"x1", "x2", "mu"});
  return [e1, e2](const J3& x1, const J3& x2, const J3& mu) {
    const J3 s[3] = {x1, x2, mu};
    return std::array<J3, 2>{e1.eval<3>(s), e2.eval<3>(s)};
  };
}

ParamField regularized_param_field(const RegularizedField& f, const std::string& param) {
  const auto& names = f.system().param_names();
  if (std::find(names.begin(), names.end(), param) == names.end())
    throw BifurcationError("unknown bifurcation parameter '" + param + "'");
  return [f, param](const J3& x1, const J3& x2, const J3& mu) { return f.eval<3>(x1, x2, param, mu); };
}

ParamField affine_chart(ParamField g, const std::array<double, 4>& M, const Vec2& c0, const Vec2& c1,
                        double mu_shift) {
  const double det = M[0] * M[3] - M[1] * M[2];
  if (std::fabs(det) < 1e-300) throw BifurcationError("singular chart matrix");
  const std::array<double, 4> Mi = {M[3] / det, -M[1] / det, -M[2] / det, M[0] / det};
  return [g = std::move(g), M, Mi, c0, c1, mu_shift](const J3& u1, const J3& u2, const J3& mu) {
    const J3 x1 = M[0] * u1 + M[1] * u2 + c0[0] + c1[0] * mu;
    const J3 x2 = M[2] * u1 + M[3] * u2 + c0[1] + c1[1] * mu;
    const auto z = g(x1, x2, mu + mu_shift);
    return std::array<J3, 2>{Mi[0] * z[0] + Mi[1] * z[1], Mi[2] * z[0] + Mi[3] * z[1]};
  };
}

SotomayorValues sotomayor_values(const SotomayorInput& in, const Vec2& v, const Vec2& w) {
  const auto g = at(in);
  SotomayorValues s;
  for (int k = 0; k < 2; ++k) {
    s.wg_mu += w[k] * g[k].g[2];
    double dmv = 0.0, d2 = 0.0;
    for (int i = 0; i < 2; ++i) {
      dmv += g[k].hess(i, 2) * v[i];
      for (int j = 0; j < 2; ++j) d2 += g[k].hess(i, j) * v[i] * v[j];
    }
    s.wDg_mu_v += w[k] * dmv;
    s.wD2g_vv += w[k] * d2;
  }
  return s;
}

BifurcationCertificate sotomayor_check(const SotomayorInput& in) {
  BifurcationCertificate c;
  c.u0 = in.u0;
  c.mu0 = in.mu0;
  const auto g = at(in);
  const double res = std::hypot(g[0].v, g[1].v);
  Eigen::Matrix2d A;
  A << g[0].g[0], g[0].g[1], g[1].g[0], g[1].g[1];
  const double Anorm = std::max(1.0, A.cwiseAbs().maxCoeff());
  if (res > 1e-8 * Anorm) c.notes.push_back("g(u0, mu0) is not zero: |g| = " + fmt("%.3g", res));
  const auto l = eigenvalues({A(0, 0), A(0, 1), A(1, 0), A(1, 1)});
  c.lambda1 = l[0];
  c.lambda2 = l[1];
  const double tau = 1e-8 * Anorm;
  const bool z1 = std::abs(l[0]) <= tau, z2 = std::abs(l[1]) <= tau;
  if (!z1 && !z2)
    throw BifurcationError("Dg(u0, mu0) has no eigenvalue near zero (|lambda| = " +
                           fmt("%.6g", std::min(std::abs(l[0]), std::abs(l[1]))) + ")");
  if (z1 && z2) throw BifurcationError("both eigenvalues of Dg(u0, mu0) are near zero (codimension two)");

  Eigen::JacobiSVD<Eigen::Matrix2d> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  c.v = orient({svd.matrixV()(0, 1), svd.matrixV()(1, 1)});
  c.w = orient({svd.matrixU()(0, 1), svd.matrixU()(1, 1)});
  const SotomayorValues s = sotomayor_values(in, c.v, c.w);

  double gmu_scale = 1.0, hess_scale = 1.0, mixed_scale = 1.0;
  for (int k = 0; k < 2; ++k) {
    gmu_scale = std::max(gmu_scale, std::fabs(g[k].g[2]));
    for (int i = 0; i < 2; ++i) {
      mixed_scale = std::max(mixed_scale, std::fabs(g[k].hess(i, 2)));
      for (int j = 0; j < 2; ++j) hess_scale = std::max(hess_scale, std::fabs(g[k].hess(i, j)));
    }
  }
  const auto nonzero = [&](const std::string& n, double v, double scale) {
    const double t = 1e-6 * scale;
    c.conditions.push_back({n + " != 0", v, t, std::fabs(v) > t});
    return std::fabs(v) > t;
  };
  const auto zero = [&](const std::string& n, double v, double scale) {
    const double t = 1e-8 * scale;
    c.conditions.push_back({n + " = 0", v, t, std::fabs(v) <= t});
    return std::fabs(v) <= t;
  };
  const double far = std::max(std::abs(l[0]), std::abs(l[1]));
  c.conditions.push_back({"simple zero eigenvalue", std::min(std::abs(l[0]), std::abs(l[1])), tau, true});
  c.conditions.push_back({"other eigenvalue |Re| > tau", far, tau, far > tau});

  const bool d2 = std::fabs(s.wD2g_vv) > 1e-6 * hess_scale;
  if (std::fabs(s.wg_mu) > 1e-8 * gmu_scale) {
    const bool a = nonzero("w.g_mu", s.wg_mu, gmu_scale);
    const bool b = nonzero("w.D2g(v,v)", s.wD2g_vv, hess_scale);
    if (a && b) c.kind = BifurcationKind::SaddleNode;
  } else {
    zero("w.g_mu", s.wg_mu, gmu_scale);
    const bool a = nonzero("w.Dg_mu v", s.wDg_mu_v, mixed_scale);
    const bool b = nonzero("w.D2g(v,v)", s.wD2g_vv, hess_scale);
    if (a && b) c.kind = BifurcationKind::Transcritical;
  }
  if (!d2) c.notes.push_back("w.D2g(v,v) vanishes: degenerate, outside both condition sets");
  c.values["w.g_mu"] = s.wg_mu;
  c.values["w.Dg_mu v"] = s.wDg_mu_v;
  c.values["w.D2g(v,v)"] = s.wD2g_vv;
  return c;
}

PiecewiseSystem transcritical_family(const SignTuple& s) {
  return PiecewiseSystem(num(s.a) + " - " + num(s.b * s.c2) + "*x1", num(s.b) + " + " + num(s.a) + "*alpha",
                         num(-s.a), num(-s.b) + " + " + num(s.a * s.c1) + "*x2", {{"alpha", 0.0}});
}

PiecewiseSystem saddlenode_family(const SignTuple& s) {
  return PiecewiseSystem(num(s.a) + " - " + num(s.b * s.c1) + "*x1 - " + num(s.b * s.c2) + "*x2",
                         num(s.b) + " + " + num(s.a) + "*beta", num(-s.a), num(-s.b) + " + x2^2",
                         {{"beta", 0.0}});
}

FamilyTranscritical certify_family_transcritical(const SignTuple& s, const RegularizationSpec& spec) {
  require_xi_zero(spec);
  const ScaledValue ph = tvals(spec.phi, 0.0);
  if (std::fabs(ph.value) > 1e-12) throw BifurcationError("the transcritical family needs phi(0) = 0");
  if (!(ph.d1 > 0.0)) throw BifurcationError("the transcritical family needs phi'(0) > 0");
  const double eps = spec.epsilon, eta = spec.eta;
  if (!(eps < 2.0 * ph.d1))
    throw BifurcationError("epsilon out of the solvable range: need 0 < eps < 2 phi'(0) = " + fmt("%.6g", 2 * ph.d1));
  const double target = s.b * s.c2 * eps / (2.0 * s.a * ph.d1);
  const auto h = [&](double u) { return spec.psi(u) - target; };
  if (h(-1.0) * h(1.0) > 0.0) throw BifurcationError("psi(u) = " + fmt("%.6g", target) + " has no root in (-1, 1)");
  const double sstar = bisect(h, -1.0, 1.0, 1e-15);

  FamilyTranscritical r;
  r.alpha0 = -s.c1 * eta * sstar;
  const PiecewiseSystem sys = transcritical_family(s);
  const RegularizedField f = field_at(sys, spec, "alpha", r.alpha0);
  const Vec2 z = f({0.0, -r.alpha0 / s.c1});
  if (std::hypot(z[0], z[1]) > 1e-10)
    throw BifurcationError("no equilibrium at (0, -alpha0/c1): |Z| = " + fmt("%.3g", std::hypot(z[0], z[1])));
  for (int k = 0; k < 10; ++k) {
    const double al = r.alpha0 + eta * (k - 4.5) / 20.0;
    const Vec2 q = field_at(sys, spec, "alpha", al)({0.0, -al / s.c1});
    r.line_residual = std::max(r.line_residual, std::hypot(q[0], q[1]));
  }

  // x = (r, s - (mu + alpha0)/c1), then (r, s) = N u with the Jordan map.
  const double k = s.c2 / (2.0 * s.a) + s.b * s.c2 * r.alpha0 / 2.0;
  const std::array<double, 4> N = {-s.a * s.c1 / 2.0, 0.0, k, 1.0};
  const ParamField g = affine_chart(regularized_param_field(f, "alpha"), N, {0.0, -r.alpha0 / s.c1},
                                    {0.0, -1.0 / s.c1}, r.alpha0);
  const SotomayorInput in{g, {0.0, 0.0}, 0.0};
  r.cert = sotomayor_check(in);
  const auto jg = at(in);
  r.A5_ad = jg[0].hess(0, 2);
  r.A6_ad = 0.5 * jg[0].hess(0, 0);
  const ScaledValue ps = tvals(spec.psi, sstar);
  r.A5 = -s.a * ph.d1 * ps.d1 / (s.c1 * eps * eta);
  r.A5_ref = r.A5 * ph.d2 / (4.0 * ph.d1 * eps);
  r.A6 = s.c1 / 8.0 + s.c2 * ph.d1 * ps.d1 * (1.0 + s.a * s.b * r.alpha0) / (2.0 * eps * eta) -
         s.a * s.b * s.c1 * s.c2 * ph.d2 / (8.0 * ph.d1 * eps);
  r.cert.values["alpha0"] = r.alpha0;
  r.cert.values["A5"] = r.A5;
  r.cert.values["A5_ref"] = r.A5_ref;
  r.cert.values["A5_ad"] = r.A5_ad;
  r.cert.values["A6"] = r.A6;
  r.cert.values["A6_ad"] = r.A6_ad;
  r.cert.values["line_residual"] = r.line_residual;
  r.cert.notes.push_back("codimension is preserved; the genericity claim concerns perturbations of the whole "
                         "family and is not computed");
  return r;
}

FamilySaddleNode certify_family_saddlenode(const SignTuple& s, const RegularizationSpec& spec) {
  require_xi_zero(spec);
  const ScaledValue ph = tvals(spec.phi, 0.0), ps = tvals(spec.psi, 0.0);
  if (std::fabs(ph.value) > 1e-12 || std::fabs(ps.value) > 1e-12)
    throw BifurcationError("the saddle-node family needs phi(0) = psi(0) = 0");
  const RegularizedField f(saddlenode_family(s), spec);
  const SotomayorInput in{regularized_param_field(f, "beta"), {0.0, 0.0}, 0.0};
  FamilySaddleNode r;
  r.cert = sotomayor_check(in);
  const SotomayorValues pv = sotomayor_values(in, {-double(s.c2) / s.c1, 1.0}, {0.0, 1.0});
  r.wg_mu = pv.wg_mu;
  r.wD2g_vv = pv.wD2g_vv;
  r.wg_mu_ref = s.a / 2.0;
  r.wD2g_vv_ref = -2.0 * s.b * s.c2 * ph.d1 * ps.d1 / (s.c1 * spec.epsilon * spec.eta);
  r.wD2g_vv_exact = r.wD2g_vv_ref + 1.0;
  r.cert.values["w.g_mu (v=(-c2/c1,1), w=(0,1))"] = r.wg_mu;
  r.cert.values["w.D2g(v,v) (v=(-c2/c1,1), w=(0,1))"] = r.wD2g_vv;
  r.cert.values["w.g_mu reference"] = r.wg_mu_ref;
  r.cert.values["w.D2g(v,v) reference"] = r.wD2g_vv_ref;
  r.cert.values["w.D2g(v,v) with x2^2 term"] = r.wD2g_vv_exact;
  return r;
}

FixedEtaSaddleNode certify_fixed_eta_saddlenode(const SignTuple& s, const RegularizationSpec& spec0) {
  require_xi_zero(spec0);
  const ScaledValue ph = tvals(spec0.phi, 0.0);
  if (std::fabs(ph.value) <= 1e-12) throw BifurcationError("fixed-eta saddle-node needs phi(0) != 0");
  // zero of psi in (-1, 1) closest to 0
  std::optional<double> p0;
  const int n = 256;
  for (int k = 0; k < n; ++k) {
    const double u0 = -1.0 + 2.0 * k / n, u1 = -1.0 + 2.0 * (k + 1) / n;
    const double f0 = spec0.psi(u0), f1 = spec0.psi(u1);
    double root;
    if (f0 == 0.0)
      root = u0;
    else if (f0 * f1 < 0.0)
      root = bisect([&](double u) { return spec0.psi(u); }, u0, u1, 1e-15);
    else
      continue;
    if (root <= -1.0 || root >= 1.0) continue;
    if (!p0 || std::fabs(root) < std::fabs(*p0)) p0 = root;
  }
  if (!p0) throw BifurcationError("psi has no zero in (-1, 1)");
  FixedEtaSaddleNode r;
  r.p0 = *p0;
  const ScaledValue ps = tvals(spec0.psi, r.p0);
  r.B1 = ph.value * ps.d1 * s.a;
  r.B2 = 2.0 * s.b * s.a;
  r.B3 = s.a - 2.0 * r.B1 * r.p0;
  r.eta0 = -r.B1 * r.B2 / (s.c1 * r.B3);
  const PiecewiseSystem sys = transcritical_family(s);
  if (!(r.eta0 > 0.0) || r.eta0 > sys.domain_radius() / 2.0)
    throw BifurcationError("out of regime: eta0 = " + fmt("%.6g", r.eta0) + " must lie in (0, domain_radius/2)");
  r.alpha0 = -r.eta0 * s.c1 * r.p0;
  RegularizationSpec spec = spec0;
  spec.eta = r.eta0;
  const RegularizedField f = field_at(sys, spec, "alpha", r.alpha0);
  const Vec2 z = f({0.0, r.eta0 * r.p0});
  if (std::hypot(z[0], z[1]) > 1e-10)
    throw BifurcationError("no equilibrium at (0, eta0 p0): |Z| = " + fmt("%.3g", std::hypot(z[0], z[1])));

  // reference chart at mu = 0: r = x1 + kappa x2, s = x2
  const double kappa = 2.0 * s.c1 * (r.B1 * r.p0 - 1.0) / (s.c2 * 2.0 * s.a);
  const std::array<double, 4> P = {1.0, kappa, 0.0, 1.0};
  const ParamField g = affine_chart(regularized_param_field(f, "alpha"), P, {0.0, r.eta0 * r.p0}, {0.0, 0.0},
                                    r.alpha0);
  const SotomayorInput in{g, {0.0, 0.0}, 0.0};
  r.cert = sotomayor_check(in);
  const auto jg = at(in);
  r.wg_mu = jg[1].g[2];
  r.B5_ad = 0.5 * jg[1].hess(1, 1);
  const double B2 = r.B2, B3 = r.B3, eps = spec.epsilon, phi0 = ph.value;
  r.B5_ref = B3 / (2 * B2) - s.a * ph.d1 * B3 * B3 / (s.c2 * s.b * phi0 * B2 * eps) +
                 ph.d1 * ps.d1 * r.p0 * B3 / (s.c2 * eps) -
                 s.b * ps.d2 * B3 * B3 / (phi0 * (ps.d2 * ps.d2) * B2 * B2) + ps.d2 * B3 / (ps.d1 * B2);
  const double kappa_ok = std::fabs(jg[0].g[1]) + std::fabs(jg[1].g[0]);
  if (kappa_ok > 1e-8 * std::max(1.0, std::fabs(r.B1 / r.eta0)))
    r.cert.notes.push_back("the reference Jordan map leaves off-diagonal linear terms (" + fmt("%.3g", kappa_ok) +
                           "); the certificate uses the numeric null vectors");
  r.cert.values["p0"] = r.p0;
  r.cert.values["eta0"] = r.eta0;
  r.cert.values["alpha0"] = r.alpha0;
  r.cert.values["B1"] = r.B1;
  r.cert.values["B2"] = r.B2;
  r.cert.values["B3"] = r.B3;
  r.cert.values["w.g_mu (w=(0,1))"] = r.wg_mu;
  r.cert.values["B5_ref"] = r.B5_ref;
  r.cert.values["B5_ad"] = r.B5_ad;
  return r;
}

double hopf_u3_ref(double eps, double eta) {
  const double e4 = std::pow(eps, 4), h4 = std::pow(eta, 4);
  return M_PI / 2916.0 * (-(98.0 + 945.0 * eps) / e4 - 9.0 * (-32.0 + 48.0 * eta + 81.0 * h4) / h4);
}

double lyapunov_estimate(const std::function<std::array<Dual2, 2>(const Point&)>& f, const Point& p0, double h) {
  const auto z0 = f(p0);
  const double J[4] = {z0[0].g[0], z0[0].g[1], z0[1].g[0], z0[1].g[1]};
  const double det = J[0] * J[3] - J[1] * J[2];
  if (!(det > 0.0)) throw BifurcationError("no rotation at the equilibrium (det <= 0)");
  const double w = std::sqrt(det);
  // eigenvector q for i w
  const std::complex<double> iw(0.0, w);
  std::complex<double> q1, q2;
  if (std::fabs(J[1]) >= std::fabs(J[2])) {
    q1 = J[1];
    q2 = iw - J[0];
  } else {
    q1 = iw - J[3];
    q2 = J[2];
  }
  double T[4] = {q1.real(), -q1.imag(), q2.real(), -q2.imag()};
  double dT = T[0] * T[3] - T[1] * T[2];
  const double sc = 1.0 / std::sqrt(std::fabs(dT));
  for (double& t : T) t *= sc;
  dT = T[0] * T[3] - T[1] * T[2];
  const double Ti[4] = {T[3] / dT, -T[1] / dT, -T[2] / dT, T[0] / dT};

  // Hessians of F(u) = T^-1 f(p0 + T u) / w at u
  struct H2 {
    double h[2][3];  // component, (uu, uv, vv)
  };
  const auto hess = [&](double u, double v) {
    const Point x{p0[0] + T[0] * u + T[1] * v, p0[1] + T[2] * u + T[3] * v};
    const auto z = f(x);
    double Hx[2][2][2];
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) Hx[k][i][j] = z[k].hess(i, j);
    H2 out{};
    const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
    for (int m = 0; m < 2; ++m)
      for (int p = 0; p < 3; ++p) {
        const int a = pairs[p][0], b = pairs[p][1];
        double s = 0.0;
        for (int k = 0; k < 2; ++k) {
          double tk = 0.0;
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) tk += T[i * 2 + a] * Hx[k][i][j] * T[j * 2 + b];
          s += Ti[m * 2 + k] * tk;
        }
        out.h[m][p] = s / w;
      }
    return out;
  };
  const H2 c = hess(0, 0), xp = hess(h, 0), xm = hess(-h, 0), yp = hess(0, h), ym = hess(0, -h);
  const double fxx = c.h[0][0], fxy = c.h[0][1], fyy = c.h[0][2];
  const double gxx = c.h[1][0], gxy = c.h[1][1], gyy = c.h[1][2];
  const double fxxx = (xp.h[0][0] - xm.h[0][0]) / (2 * h);
  const double fxyy = (xp.h[0][2] - xm.h[0][2]) / (2 * h);
  const double gxxy = (yp.h[1][0] - ym.h[1][0]) / (2 * h);
  const double gyyy = (yp.h[1][2] - ym.h[1][2]) / (2 * h);
  const double a = (fxxx + fxyy + gxxy + gyyy + fxy * (fxx + fyy) - gxy * (gxx + gyy) - fxx * gxx + fyy * gyy) / 16.0;
  return 2.0 * M_PI * a;
}

bool is_hopf_example(const RegularizedField& f, const std::string& param) {
  const auto& sp = f.spec();
  if (sp.xi != 0.0 || sp.phi.name() != "phi1_hopf" || sp.psi.name() != "psi1_hopf") return false;
  const auto& ps = f.system().params();
  const auto it = ps.find(param);
  if (it == ps.end()) return false;
  const double mu = it->second;
  const PiecewiseSystem& s = f.system();
  for (double x1 : {-0.7, -0.1, 0.3, 0.9})
    for (double x2 : {-0.5, 0.2, 0.8}) {
      const Vec2 X = s.X({x1, x2}), Y = s.Y({x1, x2});
      const Vec2 Xr = {-x2 + (mu - x2 * x2) * x1 + 5.0 / 9.0, x1 + 5.0 / 9.0};
      if (std::fabs(X[0] - Xr[0]) > 1e-12 || std::fabs(X[1] - Xr[1]) > 1e-12 || std::fabs(Y[0] - 1) > 1e-12 ||
          std::fabs(Y[1] - 1) > 1e-12)
        return false;
    }
  return true;
}

HopfAnalysis hopf_analysis(const RegularizedField& f, const std::string& param, double mu_lo, double mu_hi) {
  HopfAnalysis h;
  const PiecewiseSystem& sys = f.system();
  const auto& names = sys.param_names();
  if (std::find(names.begin(), names.end(), param) == names.end())
    throw BifurcationError("unknown bifurcation parameter '" + param + "'");
  bool closed = true;
  const auto trace = [&](double mu) {
    const RegularizedField g = field_at(sys, f.spec(), param, mu);
    const Vec2 z = g({0.0, 0.0});
    if (std::hypot(z[0], z[1]) > 1e-9 * std::max(1.0, sys.scale()))
      throw BifurcationError("the origin is not an equilibrium at " + param + " = " + fmt("%.6g", mu));
    if (closed) {
      try {
        return origin_jacobian_closed_form(origin_data(g)).tr;
      } catch (const PreconditionError&) {
        closed = false;
      }
    }
    const auto J = g.jacobian({0.0, 0.0});
    return J[0] + J[3];
  };
  const double tl = trace(mu_lo), th = trace(mu_hi);
  if (tl * th > 0.0) throw BifurcationError("no trace crossing for " + param + " in the given range");
  h.mu_star = tl == 0.0 ? mu_lo : th == 0.0 ? mu_hi : bisect(trace, mu_lo, mu_hi, 1e-15);
  h.notes.push_back(closed ? "trace from the closed form" : "trace from the AD Jacobian");
  const double d = 1e-6 * std::max(1.0, std::fabs(mu_hi - mu_lo));
  h.trace_slope = (trace(h.mu_star + d) - trace(h.mu_star - d)) / (2 * d);
  const RegularizedField g = field_at(sys, f.spec(), param, h.mu_star);
  const auto J = g.jacobian({0.0, 0.0});
  const auto l = eigenvalues(J);
  h.lambda1 = l[0];
  h.lambda2 = l[1];
  const double det = J[0] * J[3] - J[1] * J[2];
  if (!(det > 0.0)) throw BifurcationError("omega^2 = det <= 0 at mu*: no Hopf point");
  h.omega = std::sqrt(det);
  const double step = 1e-3 * std::min(f.spec().epsilon, f.spec().eta);
  h.lyapunov_estimate = lyapunov_estimate([&](const Point& p) { return g.eval2(p); }, {0.0, 0.0}, step);
  if (is_hopf_example(g, param)) h.formula_value = hopf_u3_ref(f.spec().epsilon, f.spec().eta);
  return h;
}

std::optional<double> find_limit_cycle(const RegularizedField& f, double x_lo, double x_hi, int n) {
  const auto disp = [&](double r) -> std::optional<double> {
    const ReturnResult rr = return_map(f, -r);
    if (!rr.ok) return std::nullopt;
    return -rr.x_out - r;
  };
  std::optional<double> prev;
  double rprev = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double r = x_lo * std::pow(x_hi / x_lo, double(k) / n);
    const auto d = disp(r);
    if (d && prev && (*d) * (*prev) < 0.0) {
      double a = rprev, b = r, da = *prev;
      for (int it = 0; it < 60 && (b - a) > 1e-12 * b; ++it) {
        const double m = 0.5 * (a + b);
        const auto dm = disp(m);
        if (!dm) return std::nullopt;
        if ((*dm) * da <= 0.0) {
          b = m;
        } else {
          a = m;
          da = *dm;
        }
      }
      return 0.5 * (a + b);
    }
    prev = d;
    rprev = r;
  }
  return std::nullopt;
}

}  // namespace crossreg
