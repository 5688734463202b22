#include "crossreg/regularize.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace crossreg {

namespace {

GTerm term(const std::string& name, double c, double p, double q, PowMode mr = PowMode::Power,
           PowMode ms = PowMode::Power) {
  return {c, p, q, mr, ms, name};
}

double take(std::map<std::string, double>& free, const std::string& key, double fallback) {
  auto it = free.find(key);
  if (it == free.end()) return fallback;
  const double v = it->second;
  free.erase(it);
  return v;
}

void reject_leftovers(const std::map<std::string, double>& free, const std::string& family) {
  if (free.empty()) return;
  std::string keys;
  for (const auto& [k, v] : free) keys += (keys.empty() ? "" : ", ") + k;
  throw GConstraintError("G family '" + family + "': unknown or dependent coefficient(s): " + keys);
}

std::string homog_label(char c, int m, int i) {
  return std::string(1, c) + std::to_string(m - i) + std::to_string(i);
}

std::vector<GTerm> homogeneous_component(char c, int m, std::map<std::string, double>& free) {
  if (m < 0 || m > 9) throw GConstraintError("homogeneous G degree must be in 0..9");
  std::vector<double> a(m + 1, 0.0);
  for (int i = 2; i <= m; ++i) a[i] = take(free, homog_label(c, m, i), 0.0);
  // Corners (+-1, +-1) give two conditions: the even-i and odd-i sums vanish.
  double odd = 0.0, even = 0.0;
  for (int i = 3; i <= m; i += 2) odd += a[i];
  for (int i = 2; i <= m; i += 2) even += a[i];
  if (m >= 1) a[1] = -odd;
  a[0] = -even;
  std::vector<GTerm> out;
  for (int i = 0; i <= m; ++i) out.push_back(term(homog_label(c, m, i), a[i], m - i, i));
  return out;
}

bool is_integer(double p) { return std::floor(p) == p; }

}  // namespace

double GSpec::corner_residual() const {
  double m = 0.0;
  for (double r : {-1.0, 1.0})
    for (double s : {-1.0, 1.0}) {
      const Vec2 g = value(r, s);
      m = std::fmax(m, std::fmax(std::fabs(g[0]), std::fabs(g[1])));
    }
  return m;
}

std::string GSpec::kind_name() const {
  switch (kind) {
    case Kind::Zero: return "Zero";
    case Kind::PolynomialHomogeneous: return "PolynomialHomogeneous";
    case Kind::PolynomialSum: return "PolynomialSum";
    case Kind::FractionalPower: return "FractionalPower";
    case Kind::Custom: return "Custom";
  }
  return "?";
}

GSpec solve_g_constraints(const GTemplate& t, double tol) {
  GSpec g;
  g.family = t.family;
  auto free = t.free;
  if (t.family == "zero") {
    g.kind = GSpec::Kind::Zero;
  } else if (t.family == "homogeneous") {
    g.kind = GSpec::Kind::PolynomialHomogeneous;
    g.terms[0] = homogeneous_component('a', t.m1, free);
    g.terms[1] = homogeneous_component('b', t.m2, free);
  } else if (t.family == "eqG") {
    g.kind = GSpec::Kind::PolynomialSum;
    const double a02 = take(free, "a02", 0.0), a31 = take(free, "a31", 0.0);
    const double b03 = take(free, "b03", 0.0), b12 = take(free, "b12", 0.0);
    const double a11 = -a31;
    const double a20 = -a11 - a02 - 2.0 - a31;
    const double b26 = -7.0 / 4.0;
    const double b21 = -b03;
    const double b30 = -b03 - b12 - b21 - 7.0 / 4.0 - b26;
    g.terms[0] = {term("a20", a20, 2, 0), term("a11", a11, 1, 1), term("a02", a02, 0, 2),
                  term("const", 2.0, 0, 0), term("a31", a31, 3, 1)};
    g.terms[1] = {term("b30", b30, 3, 0), term("b21", b21, 2, 1),      term("b12", b12, 1, 2),
                  term("b03", b03, 0, 3), term("const", 7.0 / 4.0, 0, 0), term("b26", b26, 2, 6)};
  } else if (t.family == "eqG1") {
    g.kind = GSpec::Kind::FractionalPower;
    const double a1 = take(free, "a1", 0.0), a2 = take(free, "a2", 0.0);
    const double b1 = take(free, "b1", 0.0);
    const double a3 = 0.0;
    const double a0 = -a1 - a2 - 2.0 - a3;
    const double b2 = -7.0 / 4.0;
    const double b0 = -b1 - 7.0 / 4.0 - b2;
    const auto A = PowMode::Abs, S = PowMode::SignedAbs;
    g.terms[0] = {term("a0", a0, 0.5, 0, A), term("a1", a1, 0, 3.5, A, A),
                  term("a2", a2, 10.0 / 3.0, 0, A), term("const", 2.0, 0, 0), term("a3", a3, 3, 1)};
    g.terms[1] = {term("b0", b0, 4, 3.5, S, S), term("b1", b1, 4, 6, S, S),
                  term("const", 7.0 / 4.0, 0, 0), term("b2", b2, 2, 6)};
  } else if (t.family == "terms") {
    g.terms = t.terms;
    bool fractional = false;
    for (const auto& comp : g.terms)
      for (const auto& tm : comp) {
        if (tm.p < 0.0 || tm.q < 0.0) throw GConstraintError("G exponents must be non-negative");
        if ((tm.mode_r == PowMode::Power && !is_integer(tm.p)) ||
            (tm.mode_s == PowMode::Power && !is_integer(tm.q)))
          throw GConstraintError("plain powers need integer exponents; use abs or signed_abs");
        fractional = fractional || tm.mode_r != PowMode::Power || tm.mode_s != PowMode::Power;
      }
    g.kind = fractional ? GSpec::Kind::FractionalPower : GSpec::Kind::PolynomialSum;
  } else if (t.family == "custom") {
    g.kind = GSpec::Kind::Custom;
    g.custom_src = t.custom;
    for (int c = 0; c < 2; ++c) g.custom[c] = parse_with_variables(t.custom[c], {"r", "s"});
  } else {
    throw GConstraintError("unknown G family '" + t.family + "'");
  }
  reject_leftovers(free, t.family);
  for (const auto& comp : g.terms)
    for (const auto& tm : comp)
      if (tm.name != "const") g.coefficients[tm.name] = tm.coef;

  const double res = g.corner_residual();
  if (!(res < tol)) {
    std::string msg = "G corner constraint G(+-1, +-1) = 0 violated:";
    for (double r : {-1.0, 1.0})
      for (double s : {-1.0, 1.0}) {
        const Vec2 v = g.value(r, s);
        char buf[128];
        std::snprintf(buf, sizeof buf, " G(%g,%g) = (%.3g, %.3g)", r, s, v[0], v[1]);
        msg += buf;
      }
    throw GConstraintError(msg);
  }
  return g;
}

double eqG1_c3_a2() {
  return (-256.0 + 686.0 * std::sqrt(7.0)) / (1024.0 * std::cbrt(2.0) - 343.0 * std::sqrt(7.0));
}

HopfGCoefficients hopf_g_equilibrium_coefficients(const std::string& family,
                                                  const std::map<std::string, double>& free,
                                                  double tol) {
  HopfGCoefficients out;
  GTemplate t;
  t.family = family;
  if (family == "eqG") {
    std::map<std::string, double> f = free;
    const double a31 = take(f, "a31", 0.0), b12 = take(f, "b12", 0.0);
    reject_leftovers(f, family);
    const double a02 = 8.0 / 5.0 * (-4.0 + 7.0 * a31);
    const double b03 = (-54425.0 - 512.0 * b12) / 448.0;
    t.free = {{"a31", a31}, {"b12", b12}, {"a02", a02}, {"b03", b03}};
    out.values = {{"a02", a02}, {"b03", b03}};
  } else if (family == "eqG1") {
    std::map<std::string, double> f = free;
    const double a2 = take(f, "a2", eqG1_c3_a2());
    reject_leftovers(f, family);
    const double r2 = std::sqrt(2.0), r7 = std::sqrt(7.0);
    const double a1 = -128.0 * (2.0 * (-1.0 + r2) + std::cbrt(2.0) * (-8.0 + std::pow(2.0, 1.0 / 6.0)) * a2) /
                      (128.0 * r2 - 343.0 * r7);
    const double b1 = -116625.0 / (784.0 * (-343.0 + 32.0 * r7));
    t.free = {{"a1", a1}, {"a2", a2}, {"b1", b1}};
    out.values = {{"a1", a1}, {"b1", b1}};
  } else {
    throw GConstraintError("Hopf equilibrium coefficients exist only for eqG and eqG1");
  }
  out.g = solve_g_constraints(t);
  out.residual = out.g.value(2.0, 7.0 / 4.0);
  out.ok = std::fabs(out.residual[0]) < tol && std::fabs(out.residual[1]) < tol;
  return out;
}

RegularizedField::RegularizedField(PiecewiseSystem sys, RegularizationSpec spec)
    : sys_(std::move(sys)), spec_(std::move(spec)) {
  const double R = sys_.domain_radius();
  if (!(spec_.epsilon > 0.0 && spec_.epsilon < R))
    throw std::invalid_argument("epsilon must lie in (0, domain_radius)");
  if (!(spec_.eta > 0.0 && spec_.eta < R))
    throw std::invalid_argument("eta must lie in (0, domain_radius)");
  if (spec_.phi.pieces().empty() || spec_.psi.pieces().empty())
    throw std::invalid_argument("transition functions are not set");
  const double res = spec_.g.corner_residual();
  if (!(res < 1e-10)) throw GConstraintError("G does not vanish at the corners (+-1, +-1)");
}

Vec2 RegularizedField::operator()(const Point& p) const {
  auto z = eval<0>(Jet<0>(p[0]), Jet<0>(p[1]));
  return {z[0].v, z[1].v};
}

std::array<Dual2, 2> RegularizedField::eval2(const Point& p) const {
  return eval<2>(Dual2::variable(p[0], 0), Dual2::variable(p[1], 1));
}

std::array<double, 4> RegularizedField::jacobian(const Point& p) const {
  auto z = eval<1>(Jet<1>::variable(p[0], 0), Jet<1>(p[1]));
  auto w = eval<1>(Jet<1>(p[0]), Jet<1>::variable(p[1], 0));
  return {z[0].g[0], w[0].g[0], z[1].g[0], w[1].g[0]};
}

Vec2 RegularizedField::quadrant_limit(const Point& p) const { return sys_.quadrant_field(p); }

Vec2 RegularizedField::edge_eta(int sign1, const Point& p) const {
  const auto sl = sys_.slots<0>(p[0], p[1]);
  auto z = combine<0>(sys_.evalX<0>(sl), sys_.evalY<0>(sl), Jet<0>(sign1 > 0 ? 1.0 : -1.0),
                      spec_.psi.eval<0>(Jet<0>(p[1] / spec_.eta)));
  return {z[0].v, z[1].v};
}

Vec2 RegularizedField::edge_eps(int sign2, const Point& p) const {
  const auto sl = sys_.slots<0>(p[0], p[1]);
  auto z = combine<0>(sys_.evalX<0>(sl), sys_.evalY<0>(sl),
                      spec_.phi.eval<0>(Jet<0>(p[0] / spec_.epsilon)), Jet<0>(sign2 > 0 ? 1.0 : -1.0));
  return {z[0].v, z[1].v};
}

}  // namespace crossreg
