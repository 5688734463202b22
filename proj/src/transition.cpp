#include "crossreg/transition.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace crossreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Entry {
  const char* name;
  std::vector<PieceSpec> pieces;
  bool monotone;
  bool st;
};

const std::vector<Entry>& catalog() {
  static const std::vector<Entry> entries = {
      {"st_linear", {{-kInf, -1, "-1"}, {-1, 1, "s"}, {1, kInf, "1"}}, true, true},
      {"st_cubic", {{-kInf, -1, "-1"}, {-1, 1, "3*s/2 - s^3/2"}, {1, kInf, "1"}}, true, true},
      {"phiB", {{-kInf, -0.5, "-1/s - 1"}, {-0.5, kInf, "1"}}, true, false},
      {"psi_nonmono_quintic",
       {{-kInf, -1, "-1"},
        {-1, 1, "1/10 - 349/576*s - s^2/5 + 1069/288*s^3 + s^4/10 - 1213/576*s^5"},
        {1, kInf, "1"}},
       false, false},
      {"atan_like", {{-kInf, kInf, "s/sqrt(s^2 + 1)"}}, true, false},
      {"psiC01", {{-kInf, -1, "-1"}, {-1, 0, "s"}, {0, 1, "3*s/2 - s^3/2"}, {1, kInf, "1"}}, true,
       true},
      // Same values as -sgn(s) e^{-sgn(s) s} + sgn(s), split so both one-sided
      // derivatives at 0 are exact.
      {"psiC02", {{-kInf, 0, "exp(s) - 1"}, {0, kInf, "1 - exp(-s)"}}, true, false},
      {"phi1_hopf",
       {{-kInf, -1, "-1/s - 1"},
        {-1, 1, "2 - 3/2*s^2 + 5/2*s^3 + s^4/2 - 3/2*s^5"},
        {1, kInf, "1/s + 1"}},
       false, false},
      {"psi1_hopf",
       {{-kInf, -1, "-1/s - 1"}, {-1, 1, "7/4 - 9/4*s^2 + s^3 + s^4 - s^5/2"}, {1, kInf, "1"}},
       false, false},
      // Inner piece owns s = 1 and reads -s^2 + s + 2 (its `x` read as the variable).
      {"psi2_curve",
       {{-kInf, -1, "1/s + 1"}, {-1, 1, "-s^2 + s + 2", true}, {1, kInf, "-1/s - 1"}},
       false, false},
  };
  return entries;
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

}  // namespace

TransitionFunction::TransitionFunction(std::string name, const std::vector<PieceSpec>& pieces,
                                       bool monotone, bool sotomayor_teixeira)
    : name_(std::move(name)), monotone_(monotone), st_(sotomayor_teixeira) {
  if (pieces.empty()) throw std::invalid_argument("transition '" + name_ + "' has no pieces");
  double expect_lo = -kInf;
  for (const auto& ps : pieces) {
    if (ps.lo != expect_lo)
      throw std::invalid_argument("transition '" + name_ + "': pieces must partition the line (gap or overlap at " +
                                  fmt("%g", ps.lo) + ")");
    if (!(ps.hi > ps.lo)) throw std::invalid_argument("transition '" + name_ + "': empty piece");
    Piece p;
    p.lo = ps.lo;
    p.hi = ps.hi;
    p.source = ps.expr;
    p.expr = parse_with_variables(ps.expr, {"s"});
    p.closed_hi = ps.closed_hi;
    pieces_.push_back(std::move(p));
    expect_lo = ps.hi;
  }
  if (expect_lo != kInf)
    throw std::invalid_argument("transition '" + name_ + "': last piece must extend to +inf");
}

std::size_t TransitionFunction::piece_index(double s) const {
  for (std::size_t k = 0; k + 1 < pieces_.size(); ++k) {
    const Piece& p = pieces_[k];
    if (s < p.hi || (s == p.hi && p.closed_hi)) return k;
  }
  return pieces_.size() - 1;
}

bool TransitionFunction::on_boundary(double s) const {
  for (std::size_t k = 0; k + 1 < pieces_.size(); ++k)
    if (s == pieces_[k].hi) return true;
  return false;
}

double TransitionFunction::piece_value(std::size_t k, double s) const {
  return pieces_[k].expr.value(&s);
}

ScaledValue TransitionFunction::eval_scaled(double s, double scale) const {
  if (!(scale > 0.0)) throw std::invalid_argument("transition scale must be positive");
  const Jet<1> r = eval<1>(Jet<1>::variable(s, 0) / scale);
  return {r.v, r.g[0], r.hess(0, 0), r.kink};
}

TransitionFunction builtin(std::string_view name) {
  for (const auto& e : catalog()) {
    if (name != e.name) continue;
    TransitionFunction t(e.name, e.pieces, e.monotone, e.st);
    t.builtin_ = true;
    return t;
  }
  throw std::invalid_argument("unknown transition function '" + std::string(name) + "'");
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& e : catalog()) n.emplace_back(e.name);
    return n;
  }();
  return names;
}

ContractReport check_contract(const TransitionFunction& t) {
  ContractReport rep;
  const auto& ps = t.pieces();
  for (std::size_t k = 0; k + 1 < ps.size(); ++k) {
    const double b = ps[k].hi;
    const double gap = std::fabs(t.piece_value(k, b) - t.piece_value(k + 1, b));
    rep.max_gap = std::fmax(rep.max_gap, gap);
    if (!(gap < 1e-12)) {
      rep.continuous = false;
      rep.violations.push_back(fmt("jump of %.6g at s = %.6g", gap, b));
    }
  }

  // 1/s tails reach the limit only to 1e-6 at |s| = 1e6; allow for the rounding of 1 - 1e-6.
  const double lim_tol = 1e-6 * (1.0 + 1e-6);
  rep.limit_minus = t(-1e6);
  rep.limit_plus = t(1e6);
  if (!(std::fabs(rep.limit_minus + 1.0) <= lim_tol)) {
    rep.limits_ok = false;
    rep.violations.push_back(fmt("value %.6g at s = -1e6, expected -1", rep.limit_minus));
  }
  if (!(std::fabs(rep.limit_plus - 1.0) <= lim_tol)) {
    rep.limits_ok = false;
    rep.violations.push_back(fmt("value %.6g at s = +1e6, expected +1", rep.limit_plus));
  }

  constexpr int kSamples = 40000;
  double prev = t(-20.0);
  for (int k = 1; k <= kSamples; ++k) {
    const double s = -20.0 + 40.0 * k / kSamples;
    const double v = t(s);
    if (v < prev - 1e-12) rep.monotone = false;
    prev = v;
  }

  for (int k = 0; k <= kSamples; ++k) {
    const double s = -20.0 + 40.0 * k / kSamples;
    if (std::fabs(s) >= 1.0) {
      if (t(s) != (s > 0 ? 1.0 : -1.0)) {
        rep.sotomayor_teixeira = false;
        break;
      }
    } else if (!(t.d1(s).g[0] > 0.0)) {
      rep.sotomayor_teixeira = false;
      break;
    }
  }
  if (t.monotone() && !rep.monotone) rep.violations.push_back("declared monotone but sampled non-monotone");
  if (t.sotomayor_teixeira() && !rep.sotomayor_teixeira)
    rep.violations.push_back("declared Sotomayor-Teixeira but sampling disagrees");
  return rep;
}

}  // namespace crossreg
