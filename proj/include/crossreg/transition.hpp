#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "crossreg/expr.hpp"

namespace crossreg {

struct Piece {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  std::string source;  // expression in `s`
  Expr expr;
  // The boundary at `hi` belongs to this piece instead of the next one.
  bool closed_hi = false;
};

struct PieceSpec {
  double lo, hi;
  std::string expr;
  bool closed_hi = false;
};

struct ScaledValue {
  double value = 0.0;
  double d1 = 0.0;  // d/ds t(s/scale)
  double d2 = 0.0;
  bool on_kink = false;
};

// Piecewise scalar function of one variable. Pieces partition the real line;
// a boundary point belongs to the right-hand piece unless the left piece is
// marked closed_hi.
class TransitionFunction {
 public:
  TransitionFunction() = default;
  TransitionFunction(std::string name, const std::vector<PieceSpec>& pieces, bool monotone,
                     bool sotomayor_teixeira);

  const std::string& name() const { return name_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  bool monotone() const { return monotone_; }
  bool sotomayor_teixeira() const { return st_; }
  bool is_builtin() const { return builtin_; }

  std::size_t piece_index(double s) const;
  bool on_boundary(double s) const;

  template <int N>
  Jet<N> eval(const Jet<N>& s) const {
    const Piece& p = pieces_[piece_index(s.v)];
    Jet<N> r = p.expr.eval<N>(&s);
    r.kink = r.kink || on_boundary(s.v);
    return r;
  }

  double operator()(double s) const { return eval<0>(Jet<0>(s)).v; }
  Jet<1> d1(double s) const { return eval<1>(Jet<1>::variable(s, 0)); }
  ScaledValue eval_scaled(double s, double scale) const;

  // Value of piece k's expression at s (used for one-sided limits).
  double piece_value(std::size_t k, double s) const;

 private:
  friend TransitionFunction builtin(std::string_view);
  std::string name_;
  std::vector<Piece> pieces_;
  bool monotone_ = false;
  bool st_ = false;
  bool builtin_ = false;
};

// Unknown names throw std::invalid_argument.
TransitionFunction builtin(std::string_view name);
const std::vector<std::string>& builtin_names();

struct ContractReport {
  bool continuous = true;
  bool limits_ok = true;
  bool monotone = true;  // sampled
  bool sotomayor_teixeira = true;  // sampled: sgn outside [-1,1], positive derivative inside
  double limit_minus = 0.0;  // value at -1e6
  double limit_plus = 0.0;   // value at +1e6
  double max_gap = 0.0;
  std::vector<std::string> violations;
  bool ok() const { return continuous && limits_ok; }
};

ContractReport check_contract(const TransitionFunction& t);

}  // namespace crossreg
