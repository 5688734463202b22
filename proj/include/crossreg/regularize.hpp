#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "crossreg/system.hpp"
#include "crossreg/transition.hpp"

namespace crossreg {

// How one coordinate enters a G term: r^p (p a non-negative integer), |r|^p,
// or sgn(r)|r|^p.
enum class PowMode { Power, Abs, SignedAbs };

struct GTerm {
  double coef = 0.0;
  double p = 0.0, q = 0.0;
  PowMode mode_r = PowMode::Power, mode_s = PowMode::Power;
  std::string name;  // coefficient label for reports, e.g. "a02"
};

template <int N>
Jet<N> pow_mode(const Jet<N>& x, double p, PowMode m) {
  switch (m) {
    case PowMode::Power: return detail::pow_const(x, p);
    case PowMode::Abs: return abs_pow(x, p, false);
    case PowMode::SignedAbs: return abs_pow(x, p, true);
  }
  return Jet<N>(0.0);
}

// Perturbation G(r, s) evaluated at (phi_eps(x1), psi_eta(x2)).
struct GSpec {
  enum class Kind { Zero, PolynomialHomogeneous, PolynomialSum, FractionalPower, Custom };
  Kind kind = Kind::Zero;
  std::string family = "zero";  // zero | homogeneous | eqG | eqG1 | terms | custom
  std::array<std::vector<GTerm>, 2> terms;
  std::array<std::string, 2> custom_src;
  std::array<Expr, 2> custom;  // variables r, s
  std::map<std::string, double> coefficients;

  template <int N>
  std::array<Jet<N>, 2> eval(const Jet<N>& r, const Jet<N>& s) const {
    if (kind == Kind::Zero) return {Jet<N>(0.0), Jet<N>(0.0)};
    if (kind == Kind::Custom) {
      const Jet<N> rs[2] = {r, s};
      return {custom[0].eval<N>(rs), custom[1].eval<N>(rs)};
    }
    std::array<Jet<N>, 2> out{Jet<N>(0.0), Jet<N>(0.0)};
    for (int c = 0; c < 2; ++c)
      for (const GTerm& t : terms[c])
        out[c] = out[c] + t.coef * pow_mode(r, t.p, t.mode_r) * pow_mode(s, t.q, t.mode_s);
    return out;
  }

  Vec2 value(double r, double s) const {
    auto g = eval<0>(Jet<0>(r), Jet<0>(s));
    return {g[0].v, g[1].v};
  }

  // Largest |G_k| over the four corners (+-1, +-1).
  double corner_residual() const;
  std::string kind_name() const;
};

// Free-coefficient template for solve_g_constraints.
//   homogeneous: m1, m2 and free coefficients keyed "a<m-i><i>" / "b<m-i><i>"
//                for the coefficient of r^{m-i} s^i, i >= 2 (i = 0, 1 are dependent).
//   eqG:   free a02, a31, b03, b12.
//   eqG1:  free a1, a2, b1.
//   terms: explicit term lists (checked, not solved).
//   custom: expression pair in (r, s).
struct GTemplate {
  std::string family = "zero";
  int m1 = 0, m2 = 0;
  std::map<std::string, double> free;
  std::array<std::vector<GTerm>, 2> terms;
  std::array<std::string, 2> custom;
};

struct GConstraintError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

GSpec solve_g_constraints(const GTemplate& t, double tol = 1e-10);

struct HopfGCoefficients {
  std::map<std::string, double> values;  // the assigned coefficients
  Vec2 residual{};                       // G(W, T)
  bool ok = false;
  GSpec g;
};

// Coefficients that keep the origin an equilibrium of the regularized Hopf
// system for xi != 0, i.e. G(phi(0), psi(0)) = G(2, 7/4) = 0.
//   eqG:  a02 = (8/5)(-4 + 7 a31), b03 = (-54425 - 512 b12)/448; free a31, b12.
//   eqG1: closed-form a1(a2), b1; free a2 (a2 = "c3" selects the a0 = 0 value).
HopfGCoefficients hopf_g_equilibrium_coefficients(const std::string& family,
                                                  const std::map<std::string, double>& free,
                                                  double tol = 1e-9);

// a2 value for which a0 = 0 in eqG1 (G is C^3 at the origin).
double eqG1_c3_a2();

struct RegularizationSpec {
  double epsilon = 0.01, eta = 0.01, xi = 0.0;
  TransitionFunction phi, psi;
  GSpec g;
};

// Z^R(p) = 1/2 (1 + phi psi) X + 1/2 (1 - phi psi) Y + xi G(phi, psi),
// phi = phi(x1/eps), psi = psi(x2/eta).
class RegularizedField {
 public:
  RegularizedField() = default;
  RegularizedField(PiecewiseSystem sys, RegularizationSpec spec);

  const PiecewiseSystem& system() const { return sys_; }
  const RegularizationSpec& spec() const { return spec_; }

  template <int N>
  std::array<Jet<N>, 2> eval(const Jet<N>& x1, const Jet<N>& x2, const std::string& seeded = {},
                             const Jet<N>& param_jet = Jet<N>()) const {
    const auto sl = sys_.slots<N>(x1, x2, seeded, param_jet);
    const auto X = sys_.evalX<N>(sl), Y = sys_.evalY<N>(sl);
    const Jet<N> phi = spec_.phi.eval<N>(x1 / spec_.epsilon);
    const Jet<N> psi = spec_.psi.eval<N>(x2 / spec_.eta);
    return combine<N>(X, Y, phi, psi);
  }

  template <int N>
  std::array<Jet<N>, 2> combine(const std::array<Jet<N>, 2>& X, const std::array<Jet<N>, 2>& Y,
                                const Jet<N>& phi, const Jet<N>& psi) const {
    const Jet<N> w = phi * psi;
    std::array<Jet<N>, 2> z;
    for (int c = 0; c < 2; ++c) z[c] = 0.5 * (1.0 + w) * X[c] + 0.5 * (1.0 - w) * Y[c];
    if (spec_.xi != 0.0) {
      const auto g = spec_.g.eval<N>(phi, psi);
      for (int c = 0; c < 2; ++c) z[c] = z[c] + spec_.xi * g[c];
    }
    return z;
  }

  Vec2 operator()(const Point& p) const;
  std::array<Dual2, 2> eval2(const Point& p) const;
  // Row-major Jacobian entries [d1/dx1, d1/dx2, d2/dx1, d2/dx2].
  std::array<double, 4> jacobian(const Point& p) const;

  // X or Y according to the open quadrant of p.
  Vec2 quadrant_limit(const Point& p) const;
  // phi replaced by sign1 (switching curve Sigma_2^{sign1}) or psi by sign2.
  Vec2 edge_eta(int sign1, const Point& p) const;
  Vec2 edge_eps(int sign2, const Point& p) const;

  double scale() const { return sys_.scale(); }

 private:
  PiecewiseSystem sys_;
  RegularizationSpec spec_;
};

}  // namespace crossreg
