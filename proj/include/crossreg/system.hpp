#pragma once

#include <array>
#include <string>
#include <vector>

#include "crossreg/expr.hpp"

namespace crossreg {

using Vec2 = std::array<double, 2>;

struct PlanarField {
  std::string src1, src2;
  Expr f1, f2;
};

// Branch of the switching set: axis 1 is Sigma_1 = {x1 = 0}, axis 2 is
// Sigma_2 = {x2 = 0}; sign is the sign of the free coordinate.
struct Branch {
  int axis = 1;
  int sign = 1;
  Point at(double s) const { return axis == 1 ? Point{0.0, sign * s} : Point{sign * s, 0.0}; }
  std::string name() const;
  friend bool operator==(const Branch&, const Branch&) = default;
};

constexpr Branch kBranches[4] = {{1, 1}, {1, -1}, {2, 1}, {2, -1}};

// Z = (X, Y) on the cross. Quadrants I and III carry X, II and IV carry Y.
class PiecewiseSystem {
 public:
  PiecewiseSystem() = default;
  PiecewiseSystem(const std::string& X1, const std::string& X2, const std::string& Y1,
                  const std::string& Y2, ParamMap params = {}, double domain_radius = 1.0);

  const PlanarField& X() const { return X_; }
  const PlanarField& Y() const { return Y_; }
  const ParamMap& params() const { return params_; }
  const std::vector<std::string>& param_names() const { return names_; }
  double domain_radius() const { return radius_; }

  // Copy with some parameter values replaced (names must already exist).
  PiecewiseSystem with_params(const ParamMap& overrides) const;

  // Slot vector for the expressions: x1, x2, then parameters. `seeded`, when
  // non-empty, names a parameter that takes `param_jet` instead of its value.
  template <int N>
  std::vector<Jet<N>> slots(const Jet<N>& x1, const Jet<N>& x2, const std::string& seeded = {},
                            const Jet<N>& param_jet = Jet<N>()) const {
    std::vector<Jet<N>> s;
    s.reserve(2 + values_.size());
    s.push_back(x1);
    s.push_back(x2);
    for (std::size_t k = 0; k < values_.size(); ++k)
      s.push_back(!seeded.empty() && names_[k] == seeded ? param_jet : Jet<N>(values_[k]));
    return s;
  }

  template <int N>
  std::array<Jet<N>, 2> evalX(const std::vector<Jet<N>>& slots) const {
    return {X_.f1.eval<N>(slots.data()), X_.f2.eval<N>(slots.data())};
  }
  template <int N>
  std::array<Jet<N>, 2> evalY(const std::vector<Jet<N>>& slots) const {
    return {Y_.f1.eval<N>(slots.data()), Y_.f2.eval<N>(slots.data())};
  }

  Vec2 X(const Point& p) const;
  Vec2 Y(const Point& p) const;
  std::array<Dual2, 2> X2(const Point& p) const;
  std::array<Dual2, 2> Y2(const Point& p) const;

  // Field of the open quadrant containing p (sign of x1 x2 > 0 gives X).
  Vec2 quadrant_field(const Point& p) const;

  // Max field magnitude over a 33x33 grid of U (the tolerance scale S).
  double scale() const { return scale_; }
  double tau_rel() const { return tau_rel_; }
  void set_tau_rel(double t) { tau_rel_ = t; }
  double tau_zero() const { return tau_rel_ * scale_; }

 private:
  void compute_scale();
  PlanarField X_, Y_;
  ParamMap params_;
  std::vector<std::string> names_;
  std::vector<double> values_;
  double radius_ = 1.0;
  double scale_ = 1.0;
  double tau_rel_ = 1e-9;
};

enum class RegionKind { Crossing, Sliding, Escaping, Tangency };
const char* to_string(RegionKind k);

struct RegionVerdict {
  Branch branch;
  RegionKind kind = RegionKind::Crossing;
  double Xf = 0.0, Yf = 0.0;  // normal components X_i(p), Y_i(p)
  double margin = 0.0;        // min(|Xf|, |Yf|) - tau_zero
};

// Throws std::invalid_argument for points off the switching set or at the origin.
RegionVerdict classify_point(const PiecewiseSystem& sys, const Point& p);

// Region kind from normal components on a given branch.
RegionKind region_from_normals(const Branch& b, double Xf, double Yf, double tau);

struct SlidingSample {
  Point p{};
  double value = 0.0;   // d(free coordinate)/dt
  double alpha = 0.0;   // Xf / (Xf - Yf)
  double normal_residual = 0.0;  // normal component of (1-alpha) X + alpha Y
  bool degenerate = false;       // Y_i = X_i within tau_zero
};

// Sliding field at distance s > 0 along branch b.
SlidingSample sliding_field(const PiecewiseSystem& sys, const Branch& b, double s);

// d/ds of the sliding component (free coordinate derivative) by AD.
double sliding_derivative(const PiecewiseSystem& sys, const Branch& b, double s);

struct PseudoEquilibrium {
  Branch branch;
  Point p{};
  double s = 0.0;
  RegionKind kind = RegionKind::Sliding;
  double derivative = 0.0;
  bool hyperbolic = false;
};

std::vector<PseudoEquilibrium> find_pseudo_equilibria(const PiecewiseSystem& sys, const Branch& b,
                                                      int n_grid = 512);

struct FoldReport {
  Point p{};
  int axis = 1;
  char field = 'X';
  double normal = 0.0;             // X_i(p)
  double second_order_value = 0.0; // X_j (X_i)_{x_j}(p)
  bool fold = false;
  bool regular_fold = false;
};

std::vector<FoldReport> fold_scan(const PiecewiseSystem& sys, int n_grid = 512);

}  // namespace crossreg
