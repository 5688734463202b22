#include "crossreg/system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crossreg/roots.hpp"

namespace crossreg {

std::string Branch::name() const {
  return std::string("Sigma") + (axis == 1 ? "1" : "2") + (sign > 0 ? "+" : "-");
}

const char* to_string(RegionKind k) {
  switch (k) {
    case RegionKind::Crossing: return "Crossing";
    case RegionKind::Sliding: return "Sliding";
    case RegionKind::Escaping: return "Escaping";
    case RegionKind::Tangency: return "Tangency";
  }
  return "?";
}

PiecewiseSystem::PiecewiseSystem(const std::string& X1, const std::string& X2,
                                 const std::string& Y1, const std::string& Y2, ParamMap params,
                                 double domain_radius)
    : params_(std::move(params)), radius_(domain_radius) {
  if (!(radius_ > 0.0)) throw std::invalid_argument("domain_radius must be positive");
  for (const auto& [k, v] : params_) {
    if (k == "x1" || k == "x2") throw std::invalid_argument("parameter name '" + k + "' is reserved");
    names_.push_back(k);
    values_.push_back(v);
  }
  X_ = {X1, X2, parse(X1, names_), parse(X2, names_)};
  Y_ = {Y1, Y2, parse(Y1, names_), parse(Y2, names_)};
  compute_scale();
}

PiecewiseSystem PiecewiseSystem::with_params(const ParamMap& overrides) const {
  PiecewiseSystem s = *this;
  for (const auto& [k, v] : overrides) {
    auto it = s.params_.find(k);
    if (it == s.params_.end()) throw std::invalid_argument("unknown parameter '" + k + "'");
    it->second = v;
  }
  for (std::size_t k = 0; k < s.names_.size(); ++k) s.values_[k] = s.params_.at(s.names_[k]);
  s.compute_scale();
  return s;
}

Vec2 PiecewiseSystem::X(const Point& p) const {
  auto s = slots<0>(p[0], p[1]);
  auto r = evalX<0>(s);
  return {r[0].v, r[1].v};
}

Vec2 PiecewiseSystem::Y(const Point& p) const {
  auto s = slots<0>(p[0], p[1]);
  auto r = evalY<0>(s);
  return {r[0].v, r[1].v};
}

std::array<Dual2, 2> PiecewiseSystem::X2(const Point& p) const {
  return evalX<2>(slots<2>(Dual2::variable(p[0], 0), Dual2::variable(p[1], 1)));
}

std::array<Dual2, 2> PiecewiseSystem::Y2(const Point& p) const {
  return evalY<2>(slots<2>(Dual2::variable(p[0], 0), Dual2::variable(p[1], 1)));
}

Vec2 PiecewiseSystem::quadrant_field(const Point& p) const {
  return p[0] * p[1] > 0.0 ? X(p) : Y(p);
}

void PiecewiseSystem::compute_scale() {
  double m = 0.0;
  constexpr int n = 32;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const Point p{radius_ * (2.0 * i / n - 1.0), radius_ * (2.0 * j / n - 1.0)};
      try {
        const Vec2 x = X(p), y = Y(p);
        for (double v : {x[0], x[1], y[0], y[1]})
          if (std::isfinite(v)) m = std::fmax(m, std::fabs(v));
      } catch (const DomainError&) {
        // points outside an expression's domain do not contribute to the scale
      }
    }
  scale_ = m > 0.0 ? m : 1.0;
}

RegionKind region_from_normals(const Branch& b, double Xf, double Yf, double tau) {
  if (std::fabs(Xf) <= tau || std::fabs(Yf) <= tau) return RegionKind::Tangency;
  if (Xf * Yf > 0.0) return RegionKind::Crossing;
  // On Sigma_i^+ sliding needs X_i < 0 < Y_i, on Sigma_i^- the reverse.
  const bool sliding = b.sign > 0 ? (Xf < 0.0 && Yf > 0.0) : (Xf > 0.0 && Yf < 0.0);
  return sliding ? RegionKind::Sliding : RegionKind::Escaping;
}

RegionVerdict classify_point(const PiecewiseSystem& sys, const Point& p) {
  const double tp = 1e-12 * sys.domain_radius();
  const bool on1 = std::fabs(p[0]) <= tp, on2 = std::fabs(p[1]) <= tp;
  if (on1 && on2) throw std::invalid_argument("point is the origin; use classify_origin");
  if (!on1 && !on2) throw std::invalid_argument("point is not on the switching set");
  Branch b = on1 ? Branch{1, p[1] > 0 ? 1 : -1} : Branch{2, p[0] > 0 ? 1 : -1};
  const int i = b.axis - 1;
  RegionVerdict v;
  v.branch = b;
  v.Xf = sys.X(p)[i];
  v.Yf = sys.Y(p)[i];
  v.kind = region_from_normals(b, v.Xf, v.Yf, sys.tau_zero());
  v.margin = std::fmin(std::fabs(v.Xf), std::fabs(v.Yf)) - sys.tau_zero();
  return v;
}

SlidingSample sliding_field(const PiecewiseSystem& sys, const Branch& b, double s) {
  SlidingSample out;
  out.p = b.at(s);
  const Vec2 x = sys.X(out.p), y = sys.Y(out.p);
  const int i = b.axis - 1, j = 1 - i;
  const double den = y[i] - x[i];
  if (std::fabs(den) <= sys.tau_zero()) {
    out.degenerate = true;
    out.value = std::nan("");
    out.alpha = std::nan("");
    return out;
  }
  out.value = (y[i] * x[j] - x[i] * y[j]) / den;
  out.alpha = x[i] / (x[i] - y[i]);
  out.normal_residual = (1.0 - out.alpha) * x[i] + out.alpha * y[i];
  return out;
}

double sliding_derivative(const PiecewiseSystem& sys, const Branch& b, double s) {
  // Seed the free coordinate; the fixed one stays constant 0.
  const Jet<1> u = Jet<1>::variable(b.sign * s, 0);
  const Jet<1> zero(0.0);
  const auto sl = b.axis == 1 ? sys.slots<1>(zero, u) : sys.slots<1>(u, zero);
  const auto x = sys.evalX<1>(sl), y = sys.evalY<1>(sl);
  const int i = b.axis - 1, j = 1 - i;
  const Jet<1> z = (y[i] * x[j] - x[i] * y[j]) / (y[i] - x[i]);
  return z.g[0];
}

std::vector<PseudoEquilibrium> find_pseudo_equilibria(const PiecewiseSystem& sys, const Branch& b,
                                                      int n_grid) {
  std::vector<PseudoEquilibrium> out;
  const double R = sys.domain_radius();
  const double tau = sys.tau_zero();
  const double tol = 1e-12 * R;
  auto kind_at = [&](double s) {
    const Point p = b.at(s);
    const int i = b.axis - 1;
    return region_from_normals(b, sys.X(p)[i], sys.Y(p)[i], tau);
  };
  auto usable = [&](double s) {
    const RegionKind k = kind_at(s);
    return (k == RegionKind::Sliding || k == RegionKind::Escaping) && !sliding_field(sys, b, s).degenerate;
  };
  auto f = [&](double s) { return sliding_field(sys, b, s).value; };
  std::vector<double> roots;
  double prev_s = 0.0, prev_f = 0.0;
  bool have_prev = false;
  for (int k = 1; k <= n_grid; ++k) {
    const double s = R * k / n_grid;
    if (!usable(s)) {
      have_prev = false;
      continue;
    }
    const double v = f(s);
    if (v == 0.0) {
      roots.push_back(s);
    } else if (have_prev && prev_f != 0.0 && (v < 0.0) != (prev_f < 0.0)) {
      roots.push_back(bisect(f, prev_s, s, tol));
    }
    prev_s = s;
    prev_f = v;
    have_prev = true;
  }
  for (double s : roots) {
    PseudoEquilibrium pe;
    pe.branch = b;
    pe.s = s;
    pe.p = b.at(s);
    pe.kind = kind_at(s);
    pe.derivative = sliding_derivative(sys, b, s);
    pe.hyperbolic = std::fabs(pe.derivative) > tau;
    out.push_back(pe);
  }
  return out;
}

std::vector<FoldReport> fold_scan(const PiecewiseSystem& sys, int n_grid) {
  std::vector<FoldReport> out;
  const double R = sys.domain_radius();
  const double tau = sys.tau_zero();
  const double tau2 = sys.tau_rel() * sys.scale() * sys.scale() / R;
  for (int axis = 1; axis <= 2; ++axis) {
    const int i = axis - 1, j = 1 - i;
    auto point = [&](double u) { return axis == 1 ? Point{0.0, u} : Point{u, 0.0}; };
    for (char which : {'X', 'Y'}) {
      auto jet = [&](double u) {
        const Jet<1> t = Jet<1>::variable(u, 0);
        const Jet<1> zero(0.0);
        const auto sl = axis == 1 ? sys.slots<1>(zero, t) : sys.slots<1>(t, zero);
        return which == 'X' ? sys.evalX<1>(sl) : sys.evalY<1>(sl);
      };
      auto f = [&](double u) { return jet(u)[i].v; };
      auto df = [&](double u) { return jet(u)[i].g[0]; };
      // 2 n_grid cells over [-R, R] keep the resolution of n_grid per half-branch.
      const auto roots = scan_roots(f, df, -R, R, 2 * n_grid, 1e-13 * R, 1e-9 * R);
      for (double u : roots) {
        const Point p = point(u);
        const auto F = which == 'X' ? sys.X2(p) : sys.Y2(p);
        const Vec2 G = which == 'X' ? sys.Y(p) : sys.X(p);
        FoldReport r;
        r.p = p;
        r.axis = axis;
        r.field = which;
        r.normal = F[i].v;
        r.second_order_value = F[j].v * F[i].g[j];
        r.fold = std::fabs(r.normal) <= tau && std::fabs(r.second_order_value) > tau2;
        r.regular_fold = r.fold && std::fabs(G[0]) > tau && std::fabs(G[1]) > tau;
        out.push_back(r);
      }
    }
  }
  return out;
}

}  // namespace crossreg
