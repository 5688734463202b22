#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crossreg/jet.hpp"

namespace crossreg {

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

// ln of non-positive, sqrt of negative, division by zero, 0^negative.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Op { Const, Var, Neg, Abs, Sgn, Sqrt, Exp, Ln, Sin, Cos, Add, Sub, Mul, Div, Pow };

struct Node {
  Op op = Op::Const;
  double value = 0.0;  // Const only
  int slot = -1;       // Var only: index into Expr::variables()
  int a = -1, b = -1;  // children (indices into the node array, always smaller)
};

using ParamMap = std::map<std::string, double>;
using Point = std::array<double, 2>;

// Immutable expression. Nodes are stored children-first, so evaluation is a
// single forward pass.
class Expr {
 public:
  Expr() = default;
  Expr(std::vector<Node> nodes, std::vector<std::string> variables)
      : nodes_(std::move(nodes)), vars_(std::move(variables)) {}

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::string>& variables() const { return vars_; }
  bool empty() const { return nodes_.empty(); }

  // True when some node references variable slot `s`.
  bool uses(int s) const;
  int slot_of(std::string_view name) const;

  template <int N>
  Jet<N> eval(const Jet<N>* slots) const;

  double value(const double* slots) const;

  std::string str() const;

  friend bool operator==(const Expr& x, const Expr& y);

 private:
  std::vector<Node> nodes_;
  std::vector<std::string> vars_;
};

// Variables are x1, x2 followed by `params` in order.
Expr parse(std::string_view source, const std::vector<std::string>& params);
Expr parse_with_variables(std::string_view source, const std::vector<std::string>& names);

// Value, gradient and Hessian in (x1, x2). Every parameter must be bound.
Dual2 eval2(const Expr& e, const Point& x, const ParamMap& params);

// d^3 e / dx_i dx_j dx_k by central differences of the AD Hessian with one
// Richardson level.
double third_derivative(const Expr& e, const Point& x, const ParamMap& params, int i, int j,
                        int k);

// Same scheme for any callable Point -> Dual2.
template <class F>
double third_derivative_fd(const F& f, const Point& x, int i, int j, int k) {
  const double h = std::cbrt(2.220446049250313e-16) * std::fmax(1.0, std::fabs(x[i]));
  auto central = [&](double step) {
    Point xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    return (f(xp).hess(j, k) - f(xm).hess(j, k)) / (2.0 * step);
  };
  const double d1 = central(h);
  const double d2 = central(0.5 * h);
  return (4.0 * d2 - d1) / 3.0;
}

// ---- evaluation ----

namespace detail {

[[noreturn]] void domain(const char* what, double v);

template <int N>
Jet<N> pow_const(const Jet<N>& a, double p) {
  const double v = a.v;
  const bool integral = std::floor(p) == p && std::fabs(p) < 1e15;
  if (p == 0.0) return Jet<N>(1.0);
  if (v == 0.0 && p < 0.0) domain("0 raised to a negative power", p);
  if (v < 0.0 && !integral) domain("negative base with non-integer exponent", v);
  if (integral) {
    Jet<N> r = chain(a, std::pow(v, p), p * std::pow(v, p - 1.0),
                     p * (p - 1.0) * std::pow(v, p - 2.0));
    return r;
  }
  if (v == 0.0) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    Jet<N> r = chain(a, 0.0, p > 1.0 ? 0.0 : inf, p > 2.0 ? 0.0 : (p > 1.0 ? inf : -inf));
    r.kink = true;
    return r;
  }
  return chain(a, std::pow(v, p), p * std::pow(v, p - 1.0), p * (p - 1.0) * std::pow(v, p - 2.0));
}

}  // namespace detail

template <int N>
Jet<N> Expr::eval(const Jet<N>* slots) const {
  std::vector<Jet<N>> t(nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const Node& n = nodes_[k];
    switch (n.op) {
      case Op::Const: t[k] = Jet<N>(n.value); break;
      case Op::Var: t[k] = slots[n.slot]; break;
      case Op::Neg: t[k] = -t[n.a]; break;
      case Op::Abs: t[k] = abs(t[n.a]); break;
      case Op::Sgn: t[k] = sgn(t[n.a]); break;
      case Op::Sqrt:
        if (t[n.a].v < 0.0) detail::domain("sqrt of negative", t[n.a].v);
        t[k] = sqrt(t[n.a]);
        break;
      case Op::Exp: t[k] = exp(t[n.a]); break;
      case Op::Ln:
        if (t[n.a].v <= 0.0) detail::domain("ln of non-positive", t[n.a].v);
        t[k] = log(t[n.a]);
        break;
      case Op::Sin: t[k] = sin(t[n.a]); break;
      case Op::Cos: t[k] = cos(t[n.a]); break;
      case Op::Add: t[k] = t[n.a] + t[n.b]; break;
      case Op::Sub: t[k] = t[n.a] - t[n.b]; break;
      case Op::Mul: t[k] = t[n.a] * t[n.b]; break;
      case Op::Div:
        if (t[n.b].v == 0.0) detail::domain("division by zero", 0.0);
        t[k] = t[n.a] / t[n.b];
        break;
      case Op::Pow: {
        const Jet<N>& ex = t[n.b];
        bool constant_exp = true;
        for (double gi : ex.g) constant_exp = constant_exp && gi == 0.0;
        if (constant_exp) {
          t[k] = detail::pow_const(t[n.a], ex.v);
          t[k].kink = t[k].kink || ex.kink;
        } else {
          if (t[n.a].v <= 0.0) detail::domain("variable exponent needs a positive base", t[n.a].v);
          t[k] = exp(ex * log(t[n.a]));
        }
        break;
      }
    }
  }
  return t.back();
}

}  // namespace crossreg
