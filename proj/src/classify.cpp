#include "crossreg/classify.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "crossreg/flow.hpp"

namespace crossreg {

const char* to_string(ClassLabel c) {
  switch (c) {
    case ClassLabel::A0: return "A0";
    case ClassLabel::B0: return "B0";
    case ClassLabel::C0: return "C0";
    case ClassLabel::A1: return "A1";
    case ClassLabel::B1: return "B1";
    case ClassLabel::C1: return "C1";
    case ClassLabel::Unclassified: return "Unclassified";
  }
  return "?";
}

const Witness* ClassificationResult::find(const std::string& name) const {
  for (const auto& w : witnesses)
    if (w.name == name) return &w;
  return nullptr;
}

double product_tol(const PiecewiseSystem& sys) { return sys.tau_rel() * sys.scale() * sys.scale(); }
double derivative_tol(const PiecewiseSystem& sys) { return product_tol(sys) / sys.domain_radius(); }

namespace {

struct Recorder {
  std::vector<Witness>& w;
  bool pos(const std::string& n, double v, double tol) {
    w.push_back({n + " > 0", v, v - tol});
    return v > tol;
  }
  bool neg(const std::string& n, double v, double tol) {
    w.push_back({n + " < 0", v, -v - tol});
    return v < -tol;
  }
  bool nonzero(const std::string& n, double v, double tol) {
    w.push_back({n + " != 0", v, std::fabs(v) - tol});
    return std::fabs(v) > tol;
  }
  bool zero(const std::string& n, double v, double tol) {
    w.push_back({n + " = 0", v, tol - std::fabs(v)});
    return std::fabs(v) <= tol;
  }
};

}  // namespace

bool is_transient(const PiecewiseSystem& sys) {
  const Vec2 X = sys.X({0, 0}), Y = sys.Y({0, 0});
  const double t = product_tol(sys);
  const double p1 = X[0] * Y[0], p2 = X[1] * Y[1];
  if (!((p1 > t && p2 < -t) || (p1 < -t && p2 > t)))
    throw std::invalid_argument("is_transient needs X_i Y_i(0) > 0 and X_j Y_j(0) < 0");
  return X[0] * X[1] < -t;
}

TransienceCheck transience_numeric(const PiecewiseSystem& sys, int per_quadrant) {
  TransienceCheck out;
  const double R = sys.domain_radius();
  FlowOptions opt;
  for (int s1 : {1, -1})
    for (int s2 : {1, -1}) {
      const bool useX = s1 * s2 > 0;
      Rhs f = [&](const Point& p) { return useX ? sys.X(p) : sys.Y(p); };
      for (int k = 0; k < per_quadrant; ++k) {
        const double a = R * (0.02 + 0.08 * k / std::max(1, per_quadrant - 1));
        const double b = R * (0.1 - 0.08 * k / std::max(1, per_quadrant - 1));
        const Point p{s1 * a, s2 * b};
        std::vector<OdeEvent> ev = {
            {[s1](const Point& x) { return s1 * x[0]; }, 1},
            {[s2](const Point& x) { return s2 * x[1]; }, 2},
            {[R](const Point& x) { return R - std::max(std::fabs(x[0]), std::fabs(x[1])); }, 3}};
        const double S = std::max(1e-300, std::hypot(f(p)[0], f(p)[1]));
        const OdeOutcome fw = integrate_ode(f, p, 0.0, 1e3 * R / S, opt, ev);
        const OdeOutcome bw = integrate_ode(f, p, 0.0, -1e3 * R / S, opt, ev);
        ++out.samples;
        const bool ok = (fw.event == 1 && bw.event == 2) || (fw.event == 2 && bw.event == 1);
        if (!ok) {
          out.all_reach = false;
          char buf[128];
          std::snprintf(buf, sizeof buf, "(%.3g, %.3g): forward event %d, backward event %d", p[0],
                        p[1], fw.event, bw.event);
          out.failures.push_back(buf);
        }
      }
    }
  return out;
}

FirstReturnExpansion first_return_coefficients(const PiecewiseSystem& sys, double r) {
  FirstReturnExpansion e;
  const Vec2 X = sys.X({0, 0}), Y = sys.Y({0, 0});
  e.alpha = X[0] * Y[1] / (X[1] * Y[0]);
  e.radius = r > 0.0 ? r : 0.1 * sys.domain_radius();
  const double a2 = e.alpha * e.alpha;
  Eigen::Matrix<double, 16, 2> A;
  Eigen::Matrix<double, 16, 1> b;
  std::array<double, 16> xs{}, ys{};
  for (int k = 1; k <= 16; ++k) {
    const double x = -e.radius * k / 16.0;
    const ReturnResult rr = return_map(sys, x);
    if (!rr.ok) {
      e.error = "return map failed at x = " + std::to_string(x) + ": " + rr.error;
      return e;
    }
    xs[k - 1] = x;
    ys[k - 1] = rr.x_out;
    A(k - 1, 0) = x * x;
    A(k - 1, 1) = x * x * x;
    b(k - 1) = rr.x_out - a2 * x;
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  e.c2 = c(0);
  e.eta_fit = c(1);
  const double den = e.alpha + a2;
  e.beta_fit = std::fabs(den) <= 1e-12 ? std::nan("") : e.c2 / den;
  for (int k = 0; k < 16; ++k) {
    const double m = a2 * xs[k] + e.c2 * xs[k] * xs[k] + e.eta_fit * xs[k] * xs[k] * xs[k];
    e.fit_residual = std::max(e.fit_residual, std::fabs(m - ys[k]));
  }
  e.ok = true;
  return e;
}

ClassificationResult classify_origin(const PiecewiseSystem& sys) {
  ClassificationResult res;
  Recorder rec{res.witnesses};
  const Point o{0.0, 0.0};
  const auto X = sys.X2(o), Y = sys.Y2(o);
  const double tau = sys.tau_zero(), tp = product_tol(sys), td = derivative_tol(sys);
  const double p1 = X[0].v * Y[0].v, p2 = X[1].v * Y[1].v;
  const double det = X[0].v * Y[1].v - X[1].v * Y[0].v;
  double ddet[2];
  for (int i = 0; i < 2; ++i)
    ddet[i] = X[0].g[i] * Y[1].v + X[0].v * Y[1].g[i] - X[1].g[i] * Y[0].v - X[1].v * Y[0].g[i];

  // A0
  const bool a0_1 = rec.pos("X1Y1(0)", p1, tp), a0_2 = rec.pos("X2Y2(0)", p2, tp);
  if (a0_1 && a0_2) res.matched.push_back("A0");

  // B0 / B1 share the sign pattern
  const bool n1 = p1 < -tp, n2 = p2 < -tp;
  if (n1 && n2) {
    const bool det_nz = rec.nonzero("detZ(0)", det, tp);
    if (det_nz) {
      res.matched.push_back("B0");
    } else {
      rec.zero("detZ(0)", det, tp);
      const bool d1 = rec.nonzero("(detZ)_x1(0)", ddet[0], td);
      const bool d2 = rec.nonzero("(detZ)_x2(0)", ddet[1], td);
      if (d1 && d2) res.matched.push_back("B1");
    }
  }

  // C0 / C1: mixed signs
  const bool mixed = (p1 > tp && p2 < -tp) || (p1 < -tp && p2 > tp);
  if (mixed) {
    const double x1x2 = X[0].v * X[1].v;
    res.transient = x1x2 < -tp;
    rec.neg("X1X2(0)", x1x2, tp);
    const double alpha = X[0].v * Y[1].v / (X[1].v * Y[0].v);
    res.witnesses.push_back({"alphaZ", alpha, 0.0});
    if (!res.transient) {
      res.matched.push_back("C0");
    } else {
      res.first_return = first_return_coefficients(sys);
      const bool not_one = rec.nonzero("alphaZ^2 - 1", alpha * alpha - 1.0, 1e-9);
      if (not_one) {
        res.matched.push_back("C0");
      } else if (rec.zero("alphaZ + 1", alpha + 1.0, 1e-9)) {
        const FirstReturnExpansion& fr = *res.first_return;
        if (!fr.ok) {
          res.diagnostics.push_back(fr.error);
        } else {
          const double r = fr.radius;
          const double unc3 = std::max(1e-8, 100.0 * fr.fit_residual / (r * r * r));
          res.witnesses.push_back({"beta_unidentifiable", fr.c2, 0.0});
          res.diagnostics.push_back(
              "beta cannot be identified at alpha = -1 (its x^2 coefficient vanishes); test recorded, "
              "non-blocking");
          if (rec.nonzero("etaZ", fr.eta_fit, unc3)) res.matched.push_back("C1");
        }
      }
    }
  }

  // A1: the origin is a regular fold of X or Y on some Sigma_i
  for (int axis = 1; axis <= 2; ++axis) {
    const int i = axis - 1, j = 1 - i;
    for (char which : {'X', 'Y'}) {
      const auto& F = which == 'X' ? X : Y;
      const auto& G = which == 'X' ? Y : X;
      if (std::fabs(F[i].v) > tau) continue;
      const std::string tag = std::string(1, which) + std::to_string(axis);
      rec.zero(tag + "(0)", F[i].v, tau);
      const double w = F[j].v * F[i].g[j];
      const bool fold = rec.nonzero(std::string(1, which) + std::to_string(j + 1) + "*(" + tag +
                                        ")_x" + std::to_string(j + 1) + "(0)",
                                    w, td);
      const bool t1 = rec.nonzero(std::string(1, which == 'X' ? 'Y' : 'X') + "1(0)", G[0].v, tau);
      const bool t2 = rec.nonzero(std::string(1, which == 'X' ? 'Y' : 'X') + "2(0)", G[1].v, tau);
      if (fold && t1 && t2) {
        res.matched.push_back("A1");
        res.diagnostics.push_back("origin is a regular fold of " + std::string(1, which) + " in Sigma_" +
                                  std::to_string(axis));
      }
    }
  }
  if (res.matched.size() == 1) {
    const std::string& m = res.matched[0];
    for (ClassLabel c : {ClassLabel::A0, ClassLabel::B0, ClassLabel::C0, ClassLabel::A1, ClassLabel::B1,
                         ClassLabel::C1})
      if (m == to_string(c)) res.label = c;
  } else if (res.matched.empty()) {
    res.diagnostics.push_back("no class hypotheses hold within tolerance");
  } else {
    std::string all;
    for (const auto& m : res.matched) all += (all.empty() ? "" : ", ") + m;
    res.diagnostics.push_back("overlapping hypotheses (" + all + "); left Unclassified");
  }
  return res;
}

}  // namespace crossreg
