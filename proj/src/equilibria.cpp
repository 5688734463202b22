#include "crossreg/equilibria.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>

#include "crossreg/classify.hpp"

namespace crossreg {

namespace {

double half_or_radius(const RegularizedField& f, double half) {
  return half > 0.0 ? half : f.system().domain_radius();
}

std::string fmt(const char* f, double a) {
  char b[128];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

}  // namespace

double h_function(const RegularizedField& f, int i, const Point& p) {
  const auto& s = f.spec();
  const double w = s.phi(p[0] / s.epsilon) * s.psi(p[1] / s.eta);
  const Vec2 X = f.system().X(p), Y = f.system().Y(p);
  return w * (X[i - 1] - Y[i - 1]) + (X[i - 1] + Y[i - 1]);
}

EquilibriumScan equilibrium_scan(const RegularizedField& f, int n, double half) {
  EquilibriumScan out;
  const PiecewiseSystem& sys = f.system();
  const auto& sp = f.spec();
  half = half_or_radius(f, half);
  out.grid = n;
  out.cell = 2.0 * half / n;
  out.g_filter = sp.xi != 0.0;
  out.h_index = std::fabs(sys.X({0, 0})[1]) <= sys.tau_zero() ? 1 : 2;

  const int m = n + 1;
  const double tp = product_tol(sys), tz = sys.tau_zero();
  std::vector<double> det(m * m), H(m * m), G1(m * m), G2(m * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const Point p{-half + a * out.cell, -half + b * out.cell};
      const Vec2 X = sys.X(p), Y = sys.Y(p);
      const int k = a * m + b;
      det[k] = X[0] * Y[1] - X[1] * Y[0];
      H[k] = h_function(f, out.h_index, p);
      if (out.g_filter) {
        const Vec2 g = sp.g.value(sp.phi(p[0] / sp.epsilon), sp.psi(p[1] / sp.eta));
        G1[k] = g[0];
        G2[k] = g[1];
      }
    }
  // A function vanishes in a cell when a corner is within tol or the corner
  // signs differ.
  const auto vanishes = [&](const std::vector<double>& v, int a, int b, double tol) {
    const double c[4] = {v[a * m + b], v[(a + 1) * m + b], v[a * m + b + 1], v[(a + 1) * m + b + 1]};
    bool pos = false, neg = false;
    for (double x : c) {
      if (std::fabs(x) <= tol) return true;
      (x > 0 ? pos : neg) = true;
    }
    return pos && neg;
  };
  std::vector<char> flag(n * n, 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      bool ok = vanishes(det, a, b, tp) && vanishes(H, a, b, tz);
      if (ok && out.g_filter) ok = vanishes(G1, a, b, tz) && vanishes(G2, a, b, tz);
      flag[a * n + b] = ok;
    }
  // 8-connected components
  std::vector<char> seen(n * n, 0);
  for (int s = 0; s < n * n; ++s) {
    if (!flag[s] || seen[s]) continue;
    Locus L;
    L.lo = {INFINITY, INFINITY};
    L.hi = {-INFINITY, -INFINITY};
    std::queue<int> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      const int c = q.front();
      q.pop();
      const int a = c / n, b = c % n;
      const Point p{-half + (a + 0.5) * out.cell, -half + (b + 0.5) * out.cell};
      L.cells.push_back(p);
      for (int i = 0; i < 2; ++i) {
        L.lo[i] = std::min(L.lo[i], p[i]);
        L.hi[i] = std::max(L.hi[i], p[i]);
      }
      for (int da = -1; da <= 1; ++da)
        for (int db = -1; db <= 1; ++db) {
          const int aa = a + da, bb = b + db;
          if (aa < 0 || bb < 0 || aa >= n || bb >= n) continue;
          const int k = aa * n + bb;
          if (flag[k] && !seen[k]) {
            seen[k] = 1;
            q.push(k);
          }
        }
    }
    for (const Point& p : L.cells) {
      L.centroid[0] += p[0] / L.cells.size();
      L.centroid[1] += p[1] / L.cells.size();
    }
    out.loci.push_back(std::move(L));
  }
  return out;
}

std::array<std::complex<double>, 2> eigenvalues(const std::array<double, 4>& J) {
  const double tr = J[0] + J[3], det = J[0] * J[3] - J[1] * J[2];
  const std::complex<double> disc = std::sqrt(std::complex<double>(0.25 * tr * tr - det));
  return {0.5 * tr + disc, 0.5 * tr - disc};
}

std::vector<Equilibrium> find_equilibria(const RegularizedField& f, double half, int n, int max_iter,
                                         double dedupe) {
  half = half_or_radius(f, half);
  const double S = std::max(1.0, f.scale());
  const double tol = 1e-12 * S;
  // A second grid over the regularization strips: equilibria of Z^R sit at
  // distance O(eps, eta) from the cross, finer than the outer seed spacing.
  std::vector<Point> seeds;
  const auto add_grid = [&](double h) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) seeds.push_back({-h + (a + 0.5) * 2.0 * h / n, -h + (b + 0.5) * 2.0 * h / n});
  };
  add_grid(half);
  const double strip = 4.0 * std::max(f.spec().epsilon, f.spec().eta);
  if (strip < 0.5 * half) add_grid(strip);

  std::vector<Equilibrium> out;
  for (Point p : seeds) {
    bool conv = false;
    for (int it = 0; it < max_iter; ++it) {
      const Vec2 z = f(p);
      if (!std::isfinite(z[0]) || !std::isfinite(z[1])) break;
      if (std::hypot(z[0], z[1]) <= tol) {
        conv = true;
        break;
      }
      const auto J = f.jacobian(p);
      Eigen::Matrix2d M;
      M << J[0], J[1], J[2], J[3];
      Eigen::JacobiSVD<Eigen::Matrix2d> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
      svd.setThreshold(1e-12);
      const Eigen::Vector2d d = svd.solve(Eigen::Vector2d(z[0], z[1]));
      p = {p[0] - d(0), p[1] - d(1)};
      if (std::max(std::fabs(p[0]), std::fabs(p[1])) > 2.0 * half) break;
    }
    if (!conv) continue;
    if (std::max(std::fabs(p[0]), std::fabs(p[1])) > half * (1.0 + 1e-12)) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Equilibrium& e) {
      return std::hypot(e.p[0] - p[0], e.p[1] - p[1]) < dedupe;
    });
    if (dup) continue;
    Equilibrium e;
    e.p = p;
    e.jacobian = f.jacobian(p);
    const auto l = eigenvalues(e.jacobian);
    e.lambda1 = l[0];
    e.lambda2 = l[1];
    const Vec2 z = f(p);
    e.residual = std::hypot(z[0], z[1]);
    out.push_back(e);
  }
  return out;
}

OriginData origin_data(const RegularizedField& fld) {
  OriginData d;
  const PiecewiseSystem& sys = fld.system();
  const auto& sp = fld.spec();
  const auto X = sys.X2({0, 0}), Y = sys.Y2({0, 0});
  d.X1 = X[0].v;
  d.X2 = X[1].v;
  d.Y1 = Y[0].v;
  d.Y2 = Y[1].v;
  d.DX = {X[0].g[0], X[0].g[1], X[1].g[0], X[1].g[1]};
  d.DY = {Y[0].g[0], Y[0].g[1], Y[1].g[0], Y[1].g[1]};
  d.detZ = d.X1 * d.Y2 - d.X2 * d.Y1;
  for (int i = 0; i < 2; ++i) {
    const double v = X[0].g[i] * d.Y2 + d.X1 * Y[1].g[i] - X[1].g[i] * d.Y1 - d.X2 * Y[0].g[i];
    (i == 0 ? d.detZ_x1 : d.detZ_x2) = v;
  }
  const auto det2 = [](const std::array<double, 4>& m) { return m[0] * m[3] - m[1] * m[2]; };
  d.trDX = d.DX[0] + d.DX[3];
  d.trDY = d.DY[0] + d.DY[3];
  d.detDX = det2(d.DX);
  d.detDY = det2(d.DY);
  std::array<double, 4> S;
  for (int k = 0; k < 4; ++k) S[k] = d.DX[k] + d.DY[k];
  d.detDXY = det2(S);

  const Jet<1> ph = sp.phi.d1(0.0), ps = sp.psi.d1(0.0);
  d.phi = ph.v;
  d.dphi = ph.g[0];
  d.psi = ps.v;
  d.dpsi = ps.g[0];
  d.f = d.X2 != 0.0 ? d.X1 / d.X2 : std::nan("");

  const auto g = sp.g.eval<2>(Dual2::variable(d.phi, 0), Dual2::variable(d.psi, 1));
  d.G = {g[0].v, g[1].v};
  d.G_W = {g[0].g[0], g[1].g[0]};
  d.G_T = {g[0].g[1], g[1].g[1]};
  d.detDG = d.G_W[0] * d.G_T[1] - d.G_T[0] * d.G_W[1];
  d.epsilon = sp.epsilon;
  d.eta = sp.eta;
  d.xi = sp.xi;
  d.scale = sys.scale();
  return d;
}

void check_origin_preconditions(const OriginData& d) {
  const double tz = 1e-10 * std::max(1.0, d.scale);
  const double tp = tz * std::max(1.0, d.scale);
  if (std::fabs(d.detZ) > tp)
    throw PreconditionError("closed form needs det[Z](0) = 0, got " + fmt("%.6g", d.detZ));
  const double H2 = d.phi * d.psi * (d.X2 - d.Y2) + (d.X2 + d.Y2);
  if (std::fabs(H2) > tz) throw PreconditionError("closed form needs H_2(0) = 0, got " + fmt("%.6g", H2));
  if (std::fabs(d.X2 - d.Y2) <= tz) throw PreconditionError("closed form needs X2(0) != Y2(0)");
  if (std::fabs(d.X2) <= tz) throw PreconditionError("closed form needs X2(0) != 0 (f = X1/X2)");
  if (d.xi != 0.0 && std::hypot(d.G[0], d.G[1]) > tz)
    throw PreconditionError("closed form needs G(phi(0), psi(0)) = 0 when xi != 0, got |G| = " +
                            fmt("%.6g", std::hypot(d.G[0], d.G[1])));
}

ClosedForm origin_jacobian_closed_form(const OriginData& d) {
  check_origin_preconditions(d);
  ClosedForm c;
  auto& t = c.terms;
  const double e = d.epsilon, h = d.eta, xi = d.xi;
  const double X1 = d.X1, X2 = d.X2, Y1 = d.Y1, Y2 = d.Y2, dX = X2 - Y2;

  const double det0 = (Y2 * Y2 * d.detDX + Y2 * X2 * (d.detDX - d.detDXY + d.detDY) + X2 * X2 * d.detDY) /
                      (dX * dX);
  // (Y2, -X2) dZ^T/dx_k, with Z^T = [[X1, X2], [Y1, Y2]]
  const auto row = [&](int k) -> Vec2 {
    return {Y2 * d.DX[k] - X2 * d.DY[k], Y2 * d.DX[2 + k] - X2 * d.DY[2 + k]};
  };
  const auto perp_dot = [](const Vec2& g, const Vec2& v) { return g[0] * -v[1] + g[1] * v[0]; };
  const Vec2 r1 = row(0), r2 = row(1);
  const double det11 = (d.f * d.G_W[1] - d.G_W[0]) * -d.phi + (d.f * d.G_T[1] - d.G_T[0]) * d.psi;
  const double det12c = perp_dot(d.G_W, r2), det13c = perp_dot(d.G_T, r1);
  const double det12p = perp_dot(d.G_W, r1), det13p = perp_dot(d.G_T, r2);
  const double det1 = dX * det11 * d.dphi * d.dpsi / (2 * e * h) + det12c * d.dphi / (e * dX) -
                      det13c * d.dpsi / (h * dX);
  const double det1p = dX * det11 * d.dphi * d.dpsi / (2 * e * h) + det12p * d.dpsi / (e * dX) -
                       det13p * d.dphi / (h * dX);
  const double A = d.detZ_x1 * d.phi * d.dpsi, B = d.detZ_x2 * d.dphi * d.psi;
  const double det2 = d.detDG * d.dphi * d.dpsi / (e * h);
  c.det = B / (2 * e) - A / (2 * h) + det0 + det1 * xi + det2 * xi * xi;

  const double tr0 = (X2 * d.trDY - Y2 * d.trDX) / dX;
  const double tr1 = d.G_W[0] * d.dphi / e + d.G_T[1] * d.dpsi / h;
  c.tr = d.f * dX * d.dphi * d.psi / (2 * e) + dX * d.phi * d.dpsi / (2 * h) + tr0 + tr1 * xi;

  t["det0"] = det0;
  t["det1"] = det1;
  t["det1_ref"] = det1p;
  t["det11"] = det11;
  t["det12"] = det12c;
  t["det13"] = det13c;
  t["det12_ref"] = det12p;
  t["det13_ref"] = det13p;
  t["det2"] = det2;
  t["A"] = A;
  t["B"] = B;
  t["tr0"] = tr0;
  t["tr1"] = tr1;
  t["det_ref"] = B / (2 * e) - A / (2 * h) + det0 + det1p * xi + det2 * xi * xi;
  (void)X1;
  (void)Y1;
  return c;
}

const char* to_string(Hyperbolicity h) {
  return h == Hyperbolicity::Hyperbolic ? "Hyperbolic" : "NonHyperbolic";
}

namespace {

// Zero test relative to the largest contribution in the group, with an
// absolute floor so that rounding noise in an all-zero group stays zero.
struct Group {
  double tol;
  Group(std::initializer_list<double> contributions, double floor) {
    double m = floor;
    for (double v : contributions) m = std::max(m, std::fabs(v));
    tol = 1e-9 * m;
  }
  bool z(double v) const { return std::fabs(v) <= tol; }
};

// The base determinant and trace tables share their shape: two coefficient terms and a remainder.
std::string walk_12(const Group& g, double a, double b, double rest, const char* suffix) {
  const bool za = g.z(a), zb = g.z(b);
  std::string c;
  if (za && zb)
    c = g.z(rest) ? "1" : "2";
  else if (za != zb)
    c = "2";
  else
    c = a * b < 0 ? "2" : "3";
  return c + suffix;
}

}  // namespace

HyperbolicityVerdict tables_decision(const RegularizedField& f) {
  HyperbolicityVerdict v;
  const PiecewiseSystem& sys = f.system();
  const ClassificationResult cls = classify_origin(sys);
  const OriginData d = origin_data(f);
  const double w = d.phi * d.psi;
  const bool boundary = std::fabs(std::fabs(w) - 1.0) <= 1e-12;
  v.gate_boundary = boundary;
  if (cls.label == ClassLabel::A0) {
    v.gate = "A0";
    if (std::fabs(w) <= 1.0 + 1e-12)
      throw PreconditionError(std::string("class gate: A0 needs phi psi(0) outside [-1, 1], got ") +
                              fmt("%.6g", w) + (boundary ? " (boundary value)" : ""));
  } else if (cls.label == ClassLabel::B1) {
    v.gate = "B1";
    if (std::fabs(w) >= 1.0 - 1e-12)
      throw PreconditionError(std::string("class gate: B1 needs phi psi(0) in (-1, 1), got ") +
                              fmt("%.6g", w) + (boundary ? " (boundary value)" : ""));
  } else {
    throw PreconditionError(std::string("class gate: origin is ") + to_string(cls.label) +
                            ", the hyperbolicity tables cover A0 and B1 only");
  }
  const ClosedForm cf = origin_jacobian_closed_form(d);
  v.det_value = cf.det;
  v.tr_value = cf.tr;
  const auto J = f.jacobian({0.0, 0.0});
  const auto l = eigenvalues(J);
  v.lambda1 = l[0];
  v.lambda2 = l[1];
  const double jtr = J[0] + J[3], jdet = J[0] * J[3] - J[1] * J[2];
  v.real_eigenvalues = 0.25 * jtr * jtr - jdet >= 0.0;

  const double e = d.epsilon, h = d.eta, xi = d.xi, dX = d.X2 - d.Y2;
  const double R = sys.domain_radius(), S = sys.scale();
  const double floor = sys.tau_rel() * S * S / (R * R);
  const auto& T = cf.terms;

  // base determinant and trace tables
  const double A = T.at("A"), B = T.at("B"), det0 = T.at("det0");
  v.det_case = walk_12(Group({A / (2 * h), B / (2 * e), det0}, floor), A, B, det0, "_d");
  const double ta = d.phi * d.dpsi, tb = d.dphi * d.psi, t0 = d.X2 * d.trDY - d.Y2 * d.trDX;
  v.tr_case = walk_12(Group({dX * ta / (2 * h), d.f * dX * tb / (2 * e), t0 / dX}, floor / std::max(1e-300, S / R)),
                      ta, tb, t0, "_t");

  bool hyper = true;
  if (v.real_eigenvalues) {
    if (v.det_case == "3_d") v.almost_every_point = true;
    if (v.det_case == "1_d") {
      if (xi == 0.0) {
        hyper = false;
      } else {
        // xi determinant table
        const double P = T.at("det12") * d.dphi, Q = T.at("det13") * d.dpsi;
        const double Rr = T.at("det11") * d.dphi * d.dpsi;
        const Group g({P / (e * dX), Q / (h * dX), dX * Rr / (2 * e * h)}, floor);
        const bool zp = g.z(P), zq = g.z(Q), zr = g.z(Rr);
        if (zp && zq && zr) {
          v.det_xi_case = "1.1_d";
        } else if ((!zp && !zq && P * Q < 0 && !zr && Rr * P < 0) || (!zp && !zq && P * Q > 0) ||
                   (!zp && zq && !zr && Rr * P < 0) || (zp && !zq && !zr && Rr * Q > 0)) {
          v.det_xi_case = "1.3_d";
          v.almost_every_point = true;
        } else {
          v.det_xi_case = "1.2_d";
        }
        if (v.det_xi_case == "1.1_d") {
          const double q2 = d.detDG * d.dphi * d.dpsi;
          if (Group({q2}, floor).z(q2) || q2 == 0.0) {
            hyper = false;
          } else {
            v.notes.push_back("case 1.1_d with det[DG] phi' psi' != 0: det[J] is O(xi^2) and nonzero");
          }
        }
      }
    }
  } else {
    if (v.tr_case == "3_t") v.almost_every_point = true;
    if (v.tr_case == "1_t") {
      if (xi == 0.0) {
        hyper = false;
      } else {
        // xi trace table
        const double U = d.G_W[0] * d.dphi, V = d.G_T[1] * d.dpsi;
        const Group g({U / e, V / h}, floor / std::max(1e-300, S / R));
        const bool zu = g.z(U), zv = g.z(V);
        if (zu && zv) {
          v.tr_xi_case = "1.1_t";
          hyper = false;
        } else if (!zu && !zv && U * V < 0) {
          v.tr_xi_case = "1.3_t";
          v.almost_every_point = true;
        } else {
          v.tr_xi_case = "1.2_t";
        }
      }
    }
  }
  v.table_verdict = hyper ? Hyperbolicity::Hyperbolic : Hyperbolicity::NonHyperbolic;

  const double jscale = std::max({1.0, std::fabs(J[0]), std::fabs(J[1]), std::fabs(J[2]), std::fabs(J[3])});
  const bool eig_hyper = std::fabs(l[0].real()) > 1e-9 * jscale && std::fabs(l[1].real()) > 1e-9 * jscale;
  v.verdict = eig_hyper ? Hyperbolicity::Hyperbolic : Hyperbolicity::NonHyperbolic;
  if (v.verdict != v.table_verdict)
    v.notes.push_back(std::string("tables give ") + to_string(v.table_verdict) + " but the eigenvalues give " +
                      to_string(v.verdict) + "; the eigenvalue verdict is reported");
  if (v.almost_every_point)
    v.notes.push_back("the table case holds for almost every parameter value; the excluded set is where the "
                      "displayed combination cancels");
  return v;
}

}  // namespace crossreg
