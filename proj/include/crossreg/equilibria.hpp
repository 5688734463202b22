#pragma once

#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossreg/regularize.hpp"

namespace crossreg {

struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- Equilibrium-locus scan ----------------------------------------------

struct Locus {
  std::vector<Point> cells;  // centers of flagged grid cells
  Point centroid{};
  Point lo{}, hi{};          // bounding box
};

struct EquilibriumScan {
  int h_index = 2;  // H_2 unless X2(0) = 0
  int grid = 0;
  double cell = 0.0;
  bool g_filter = false;  // xi != 0
  std::vector<Locus> loci;
};

// Grid cells over [-half, half]^2 where det[Z] and H_i both vanish (sign
// change across the cell corners or a corner within tolerance), filtered by
// G(phi_eps, psi_eta) = 0 when xi != 0. half <= 0 selects domain_radius.
EquilibriumScan equilibrium_scan(const RegularizedField& f, int n = 200, double half = 0.0);

// H_i(p) = phi_eps psi_eta (X_i - Y_i)(p) + (X_i + Y_i)(p).
double h_function(const RegularizedField& f, int i, const Point& p);

// ---- Newton search --------------------------------------------------------

struct Equilibrium {
  Point p{};
  std::array<double, 4> jacobian{};  // row-major
  std::complex<double> lambda1, lambda2;
  double residual = 0.0;
};

std::array<std::complex<double>, 2> eigenvalues(const std::array<double, 4>& J);

// Newton with pseudo-inverse steps from an n x n seed grid over
// [-half, half]^2, plus one over [-4 max(eps, eta), 4 max(eps, eta)]^2 when
// that box is much smaller; deduplicated at distance `dedupe`.
std::vector<Equilibrium> find_equilibria(const RegularizedField& f, double half = 0.0, int n = 64,
                                         int max_iter = 50, double dedupe = 1e-7);

// ---- Origin data and closed forms -----------------------------------------

struct OriginData {
  double X1 = 0, X2 = 0, Y1 = 0, Y2 = 0;
  std::array<double, 4> DX{}, DY{};  // row-major partials at 0
  double detZ = 0, detZ_x1 = 0, detZ_x2 = 0;
  double trDX = 0, trDY = 0, detDX = 0, detDY = 0, detDXY = 0;
  double phi = 0, dphi = 0, psi = 0, dpsi = 0;  // transition values at 0 (unscaled)
  double f = 0;                                  // X1(0)/X2(0)
  Vec2 G{}, G_W{}, G_T{};                        // G and its partials at (W, T) = (phi(0), psi(0))
  double detDG = 0;
  double epsilon = 0, eta = 0, xi = 0;
  double scale = 1;  // S of the piecewise system
};

OriginData origin_data(const RegularizedField& f);

struct ClosedForm {
  double det = 0.0, tr = 0.0;
  std::map<std::string, double> terms;  // every intermediate of the displays
};

// Throws PreconditionError unless the origin is an equilibrium with
// detZ(0) = 0, H_2(0) = 0 (and G(W, T) = 0 for xi != 0) and X2(0) != Y2(0).
ClosedForm origin_jacobian_closed_form(const OriginData& d);

void check_origin_preconditions(const OriginData& d);

// ---- Hyperbolicity tables -------------------------------------------------

enum class Hyperbolicity { Hyperbolic, NonHyperbolic };
const char* to_string(Hyperbolicity h);

struct HyperbolicityVerdict {
  std::string gate;          // "A0" or "B1"
  bool gate_boundary = false;  // phi psi(0) = +-1
  std::string det_case, tr_case;  // base table labels
  std::string det_xi_case, tr_xi_case;  // xi table labels, empty if not walked
  bool real_eigenvalues = true;
  Hyperbolicity table_verdict = Hyperbolicity::Hyperbolic;  // from the tables
  Hyperbolicity verdict = Hyperbolicity::Hyperbolic;        // from the eigenvalues
  bool almost_every_point = false;
  double det_value = 0.0, tr_value = 0.0;  // closed form
  std::complex<double> lambda1, lambda2;   // AD Jacobian
  std::vector<std::string> notes;
};

// Class gate: A0 with phi psi(0) outside [-1, 1], or B1 with phi psi(0) in
// (-1, 1). Throws PreconditionError on gate failure.
HyperbolicityVerdict tables_decision(const RegularizedField& f);

}  // namespace crossreg
