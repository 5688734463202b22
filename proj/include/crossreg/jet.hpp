#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <utility>

namespace crossreg {

// Forward-mode jet truncated at second order in N variables.
// The Hessian is stored as the packed upper triangle, so symmetry is structural.
// `kink` marks values computed exactly on a non-smooth point (abs at 0,
// a transition piece boundary, a fractional power at 0); derivatives carried
// by such a jet are one-sided and should not be trusted blindly.
template <int N>
struct Jet {
  static constexpr int kHess = N * (N + 1) / 2;

  double v = 0.0;
  std::array<double, N> g{};
  std::array<double, kHess> h{};
  bool kink = false;

  constexpr Jet() = default;
  constexpr Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly

  static Jet variable(double value, int index) {
    Jet j(value);
    j.g[index] = 1.0;
    return j;
  }

  static constexpr int hidx(int i, int j) {
    if (i > j) std::swap(i, j);
    return i * N - i * (i - 1) / 2 + (j - i);
  }

  double hess(int i, int j) const { return h[hidx(i, j)]; }
  double& hess(int i, int j) { return h[hidx(i, j)]; }
};

using Dual2 = Jet<2>;

namespace detail {

// r = f(a) given f(a.v), f'(a.v), f''(a.v).
template <int N>
Jet<N> chain(const Jet<N>& a, double f0, double f1, double f2) {
  Jet<N> r(f0);
  r.kink = a.kink;
  for (int i = 0; i < N; ++i) r.g[i] = f1 * a.g[i];
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j)
      r.h[Jet<N>::hidx(i, j)] = f1 * a.h[Jet<N>::hidx(i, j)] + f2 * a.g[i] * a.g[j];
  return r;
}

}  // namespace detail

template <int N>
Jet<N> operator+(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r(a.v + b.v);
  r.kink = a.kink || b.kink;
  for (int i = 0; i < N; ++i) r.g[i] = a.g[i] + b.g[i];
  for (int k = 0; k < Jet<N>::kHess; ++k) r.h[k] = a.h[k] + b.h[k];
  return r;
}

template <int N>
Jet<N> operator-(const Jet<N>& a) {
  Jet<N> r(-a.v);
  r.kink = a.kink;
  for (int i = 0; i < N; ++i) r.g[i] = -a.g[i];
  for (int k = 0; k < Jet<N>::kHess; ++k) r.h[k] = -a.h[k];
  return r;
}

template <int N>
Jet<N> operator-(const Jet<N>& a, const Jet<N>& b) {
  return a + (-b);
}

template <int N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r(a.v * b.v);
  r.kink = a.kink || b.kink;
  for (int i = 0; i < N; ++i) r.g[i] = a.v * b.g[i] + b.v * a.g[i];
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      const int k = Jet<N>::hidx(i, j);
      r.h[k] = a.v * b.h[k] + b.v * a.h[k] + a.g[i] * b.g[j] + a.g[j] * b.g[i];
    }
  return r;
}

template <int N>
Jet<N> reciprocal(const Jet<N>& a) {
  const double inv = 1.0 / a.v;
  return detail::chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}

template <int N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) {
  return a * reciprocal(b);
}

template <int N> Jet<N> operator+(const Jet<N>& a, double b) { return a + Jet<N>(b); }
template <int N> Jet<N> operator+(double a, const Jet<N>& b) { return Jet<N>(a) + b; }
template <int N> Jet<N> operator-(const Jet<N>& a, double b) { return a - Jet<N>(b); }
template <int N> Jet<N> operator-(double a, const Jet<N>& b) { return Jet<N>(a) - b; }
template <int N> Jet<N> operator*(const Jet<N>& a, double b) { return a * Jet<N>(b); }
template <int N> Jet<N> operator*(double a, const Jet<N>& b) { return Jet<N>(a) * b; }
template <int N> Jet<N> operator/(const Jet<N>& a, double b) { return a * Jet<N>(1.0 / b); }
template <int N> Jet<N> operator/(double a, const Jet<N>& b) { return Jet<N>(a) / b; }

template <int N>
Jet<N> sqrt(const Jet<N>& a) {
  const double s = std::sqrt(a.v);
  if (a.v == 0.0) {
    Jet<N> r = detail::chain(a, 0.0, std::numeric_limits<double>::infinity(),
                             -std::numeric_limits<double>::infinity());
    r.kink = true;
    return r;
  }
  return detail::chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

template <int N>
Jet<N> exp(const Jet<N>& a) {
  const double e = std::exp(a.v);
  return detail::chain(a, e, e, e);
}

template <int N>
Jet<N> log(const Jet<N>& a) {
  return detail::chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}

template <int N>
Jet<N> sin(const Jet<N>& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return detail::chain(a, s, c, -s);
}

template <int N>
Jet<N> cos(const Jet<N>& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return detail::chain(a, c, -s, -c);
}

// abs takes the right-hand derivative at 0 and flags the kink.
template <int N>
Jet<N> abs(const Jet<N>& a) {
  if (a.v > 0.0) return a;
  if (a.v < 0.0) return -a;
  Jet<N> r = a;
  r.kink = true;
  return r;
}

// sgn(0) = 0; derivative is 0 everywhere.
template <int N>
Jet<N> sgn(const Jet<N>& a) {
  Jet<N> r(a.v > 0.0 ? 1.0 : (a.v < 0.0 ? -1.0 : 0.0));
  r.kink = a.kink || a.v == 0.0;
  return r;
}

// |a|^p, optionally multiplied by sgn(a). At a = 0 the one-sided limits of the
// derivatives are used (infinite when p < 1 or 1 < p < 2) and the kink is flagged.
template <int N>
Jet<N> abs_pow(const Jet<N>& a, double p, bool signed_form) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (p == 0.0) {
    if (signed_form) return sgn(a);
    return Jet<N>(1.0);
  }
  if (a.v != 0.0) {
    const double m = std::fabs(a.v);
    const double s = a.v > 0.0 ? 1.0 : -1.0;
    const double f0 = std::pow(m, p);
    const double d1 = p * std::pow(m, p - 1.0);
    const double d2 = p * (p - 1.0) * std::pow(m, p - 2.0);
    if (signed_form) return detail::chain(a, s * f0, d1, s * d2);
    return detail::chain(a, f0, s * d1, d2);
  }
  const double d1 = p > 1.0 ? 0.0 : (p == 1.0 ? 1.0 : inf);
  const double d2 = p > 2.0 ? 0.0 : (p == 2.0 ? 2.0 : (p == 1.0 ? 0.0 : (p > 1.0 ? inf : -inf)));
  Jet<N> r = detail::chain(a, 0.0, d1, d2);
  r.kink = true;
  return r;
}

}  // namespace crossreg
