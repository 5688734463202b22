#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossreg/regularize.hpp"

namespace crossreg {

struct BifurcationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Planar field depending on one parameter; jets carry (x1, x2, mu) as
// variables 0, 1, 2.
using ParamField = std::function<std::array<Jet<3>, 2>(const Jet<3>& x1, const Jet<3>& x2, const Jet<3>& mu)>;

// Expression pair in the variables x1, x2, mu.
ParamField expr_param_field(const std::string& g1, const std::string& g2);
// Regularized field with `param` as the bifurcation parameter.
ParamField regularized_param_field(const RegularizedField& f, const std::string& param);

// g~(u, mu) = M^-1 g(M u + c(mu), mu + mu_shift), with c(mu) = c0 + c1 mu.
// M is row-major.
ParamField affine_chart(ParamField g, const std::array<double, 4>& M, const Vec2& c0, const Vec2& c1 = {0, 0},
                        double mu_shift = 0.0);

struct SotomayorInput {
  ParamField g;
  Point u0{};
  double mu0 = 0.0;
};

enum class BifurcationKind { SaddleNode, Transcritical, Hopf, None };
const char* to_string(BifurcationKind k);

struct Condition {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct BifurcationCertificate {
  BifurcationKind kind = BifurcationKind::None;
  std::vector<Condition> conditions;
  std::complex<double> lambda1, lambda2;
  Vec2 v{}, w{};  // unit right / left null vectors, largest component positive
  Point u0{};
  double mu0 = 0.0;
  std::map<std::string, double> values;  // derived quantities (alpha0, cross-checks, ...)
  std::vector<std::string> notes;
  const Condition* find(const std::string& name) const;
};

// Throws BifurcationError when no eigenvalue is near zero or both are.
BifurcationCertificate sotomayor_check(const SotomayorInput& in);

// w.g_mu, w.(Dg_mu v) and w.D2g(v, v) for given (unnormalized) v, w.
struct SotomayorValues {
  double wg_mu = 0.0, wDg_mu_v = 0.0, wD2g_vv = 0.0;
};
SotomayorValues sotomayor_values(const SotomayorInput& in, const Vec2& v, const Vec2& w);

// ---- Sign-tuple families --------------------------------------------------

struct SignTuple {
  int a = 1, b = 1, c1 = 1, c2 = 1;
};

// X~_alpha = (a - b c2 x1, b + a alpha), Y~ = (-a, -b + a c1 x2).
PiecewiseSystem transcritical_family(const SignTuple& s);
// X^_beta = (a - b c1 x1 - b c2 x2, b + a beta), Y^ = (-a, -b + x2^2).
PiecewiseSystem saddlenode_family(const SignTuple& s);

struct FamilyTranscritical {
  BifurcationCertificate cert;
  double alpha0 = 0.0;
  double line_residual = 0.0;  // max |Z^R(0, -alpha/c1)| over the alpha samples
  double A5 = 0.0, A5_ref = 0.0, A5_ad = 0.0;
  double A6 = 0.0, A6_ad = 0.0;
};

// Needs phi(0) = 0, xi = 0 and 0 < eps < 2 phi'(0).
FamilyTranscritical certify_family_transcritical(const SignTuple& s, const RegularizationSpec& spec);

struct FamilySaddleNode {
  BifurcationCertificate cert;
  // reference normalization v = (-c2/c1, 1), w = (0, 1)
  double wg_mu = 0.0, wD2g_vv = 0.0;
  double wg_mu_ref = 0.0, wD2g_vv_ref = 0.0;
  double wD2g_vv_exact = 0.0;  // reference value + 1 (x2^2 term of Y^)
};

// Needs phi(0) = psi(0) = 0 and xi = 0.
FamilySaddleNode certify_family_saddlenode(const SignTuple& s, const RegularizationSpec& spec);

struct FixedEtaSaddleNode {
  BifurcationCertificate cert;
  double p0 = 0.0, eta0 = 0.0, alpha0 = 0.0;
  double B1 = 0.0, B2 = 0.0, B3 = 0.0;
  double wg_mu = 0.0;  // in the reference chart, w = (0, 1)
  double B5_ref = 0.0, B5_ad = 0.0;
};

// Family transcritical_family with phi(0) != 0; spec.eta is replaced by eta0.
FixedEtaSaddleNode certify_fixed_eta_saddlenode(const SignTuple& s, const RegularizationSpec& spec);

// ---- Hopf -------------------------------------------------------------------

struct HopfAnalysis {
  double mu_star = 0.0;
  double omega = 0.0;
  std::complex<double> lambda1, lambda2;
  double trace_slope = 0.0;         // d tr / d mu at mu*
  double lyapunov_estimate = 0.0;   // 2 pi times the normal-form coefficient
  std::optional<double> formula_value;  // reference u3(2 pi), Hopf system only
  std::vector<std::string> notes;
};

// The reference closed form u3(2 pi) for the Hopf example.
double hopf_u3_ref(double eps, double eta);

// First Lyapunov quantity (2 pi a) of a planar field at an equilibrium with
// purely imaginary eigenvalues. Third derivatives by central differences of
// AD Hessians with step h.
double lyapunov_estimate(const std::function<std::array<Dual2, 2>(const Point&)>& f, const Point& p0, double h);

HopfAnalysis hopf_analysis(const RegularizedField& f, const std::string& param, double mu_lo, double mu_hi);

// True when f is the Hopf example (up to the value of mu) with phi1/psi1, xi = 0.
bool is_hopf_example(const RegularizedField& f, const std::string& param = "mu");

// Fixed point of the smooth return map on {x2 = 0, x1 < 0} between -x_hi and
// -x_lo (0 < x_lo < x_hi). Returns the radius |x1|, or nullopt.
std::optional<double> find_limit_cycle(const RegularizedField& f, double x_lo, double x_hi, int n = 24);

}  // namespace crossreg
