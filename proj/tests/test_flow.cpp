#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "crossreg/flow.hpp"

using namespace crossreg;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<EventKind> kinds(const Trajectory& t) {
  std::vector<EventKind> k;
  for (const auto& e : t.events) k.push_back(e.kind);
  return k;
}

void check_invariants(const Trajectory& tr) {
  for (std::size_t k = 1; k < tr.samples.size(); ++k) {
    REQUIRE(tr.samples[k].t > tr.samples[k - 1].t);
    const Sample& s = tr.samples[k];
    if (s.regime == Regime::Sliding1) CHECK(std::fabs(s.x[0]) < 1e-9);
    if (s.regime == Regime::Sliding2) CHECK(std::fabs(s.x[1]) < 1e-9);
  }
  // every regime change happens at an event time
  for (std::size_t k = 1; k < tr.samples.size(); ++k) {
    if (tr.samples[k].regime == tr.samples[k - 1].regime) continue;
    const double t0 = tr.samples[k - 1].t;
    const bool at_event = std::any_of(tr.events.begin(), tr.events.end(),
                                      [&](const FlowEvent& e) { return e.t == t0; });
    CHECK(at_event);
  }
}

RegularizationSpec hopf_spec(double eps, double eta) {
  RegularizationSpec s;
  s.epsilon = eps;
  s.eta = eta;
  s.phi = builtin("phi1_hopf");
  s.psi = builtin("psi1_hopf");
  return s;
}

PiecewiseSystem hopf(double mu) {
  return PiecewiseSystem("-x2 + (mu - x2^2)*x1 + 5/9", "x1 + 5/9", "1", "1", {{"mu", mu}});
}

}  // namespace

TEST_CASE("A0 orbit crosses both axes", "[flow]") {
  const PiecewiseSystem s("1", "2", "2", "1");
  const Trajectory tr = integrate_filippov(s, {-0.5, -0.5}, 2.0);
  check_invariants(tr);
  REQUIRE(tr.events.size() >= 3);
  CHECK(tr.events[0].kind == EventKind::CrossSigma2);
  CHECK(tr.events[1].kind == EventKind::CrossSigma1);
  CHECK(tr.events.back().kind == EventKind::LeaveDomain);
  // closed-form event times: x2 = -0.5 + 2t hits 0 at 0.25, then x1 = -0.25 + 2t at 0.125 more
  CHECK_THAT(tr.events[0].t, WithinAbs(0.25, 1e-10));
  CHECK_THAT(tr.events[1].t, WithinAbs(0.375, 1e-10));
  CHECK(tr.samples.front().regime == Regime::X);
}

TEST_CASE("B0 orbit slides into the origin and stops", "[flow]") {
  const PiecewiseSystem s("2", "1", "-1", "-2");
  const Trajectory tr = integrate_filippov(s, {-0.5, -0.2}, 5.0);
  check_invariants(tr);
  const auto k = kinds(tr);
  REQUIRE(k.size() == 2);
  CHECK(k[0] == EventKind::EnterSliding);
  CHECK(k[1] == EventKind::ReachOrigin);
  CHECK_THAT(tr.events[0].t, WithinAbs(0.2, 1e-10));
  // sliding speed on Sigma2- is 1, from x1 = -0.1
  CHECK_THAT(tr.events[1].t, WithinAbs(0.3, 1e-10));
  CHECK(tr.end() == Point{0.0, 0.0});
}

TEST_CASE("C0 orbit slides along Sigma2+", "[flow]") {
  // Sigma1 crossing, Sigma2 sliding on + side: X = (1,-2), Y = (2,1)
  const PiecewiseSystem s("1", "-2", "2", "1");
  const Trajectory tr = integrate_filippov(s, {0.3, 0.2}, 2.0);
  check_invariants(tr);
  CHECK(tr.events[0].kind == EventKind::EnterSliding);
  // sliding component on Sigma2+: (Y2 X1 - X2 Y1)/(Y2 - X2) = (1 + 4)/3
  const double v = 5.0 / 3.0;
  CHECK_THAT(tr.events[0].t, WithinAbs(0.1, 1e-10));
  bool left = false;
  for (const auto& e : tr.events) left = left || e.kind == EventKind::LeaveDomain;
  CHECK(left);
  CHECK(tr.end()[1] == 0.0);
  CHECK_THAT(tr.end()[0], WithinAbs(1.0, 1e-9));
  CHECK_THAT(tr.end_time(), WithinAbs(0.1 + (1.0 - 0.4) / v, 1e-9));
}

TEST_CASE("escaping orbit passes the origin by (ii0)", "[flow]") {
  // Sigma1 crossing at 0, Sigma2- escaping with component 5/3 toward the origin
  const PiecewiseSystem s("1", "-2", "2", "1");
  const Trajectory tr = integrate_filippov(s, {-0.5, 0.0}, 5.0);
  check_invariants(tr);
  const auto k = kinds(tr);
  REQUIRE(k.size() == 3);
  CHECK(k[0] == EventKind::EnterSliding);
  CHECK(k[1] == EventKind::OriginContinue);
  CHECK(k[2] == EventKind::LeaveDomain);
  CHECK_THAT(tr.events[1].t, WithinAbs(0.3, 1e-10));
  CHECK_THAT(tr.end_time(), WithinAbs(0.9, 1e-9));
}

TEST_CASE("exit from sliding at a tangency", "[flow]") {
  // X1 = x2 - 0.5 vanishes at x2 = 0.5 on Sigma1+; sliding component drives x2 upward.
  const PiecewiseSystem s("x2 - 0.5", "1", "1", "1");
  const Trajectory tr = integrate_filippov(s, {0.0, 0.1}, 3.0);
  check_invariants(tr);
  const auto k = kinds(tr);
  REQUIRE(k.size() >= 2);
  CHECK(k[0] == EventKind::EnterSliding);
  CHECK(k[1] == EventKind::ExitSliding);
  CHECK_THAT(tr.events[1].x[1], WithinAbs(0.5, 1e-9));
}

TEST_CASE("piecewise return map", "[flow]") {
  const PiecewiseSystem s("1", "-2", "2", "1");
  const ReturnResult r = return_map(s, -0.1);
  REQUIRE(r.ok);
  CHECK_THAT(r.x_out, WithinAbs(-0.1 / 16.0, 1e-9));
  CHECK(r.hits.size() == 5);
  CHECK_THAT(constant_field_return_slope({1, -2}, {2, 1}), WithinAbs(1.0 / 16.0, 1e-15));

  const PiecewiseSystem id("1", "-1", "1", "1");
  const ReturnResult q = return_map(id, -0.2);
  REQUIRE(q.ok);
  CHECK_THAT(q.x_out, WithinAbs(-0.2, 1e-9));

  // non-transient input fails to complete the circuit
  const ReturnResult n = return_map(PiecewiseSystem("1", "2", "2", "-1"), -0.1);
  CHECK_FALSE(n.ok);
  CHECK_FALSE(n.error.empty());
}

TEST_CASE("return-map slope matches the composed linear slopes", "[flow][property]") {
  const Vec2 cases[][2] = {{{1, -2}, {2, 1}}, {{1, -1}, {1, 1}}, {{2, -1}, {1, 3}}, {{0.5, -3}, {4, 0.7}}};
  for (const auto& c : cases) {
    char b[4][32];
    for (int i = 0; i < 2; ++i) {
      std::snprintf(b[i], 32, "%.17g", c[0][i]);
      std::snprintf(b[2 + i], 32, "%.17g", c[1][i]);
    }
    const PiecewiseSystem s(b[0], b[1], b[2], b[3]);
    const double h = 1e-3;
    const double d = (return_map(s, -h).x_out - return_map(s, -2 * h).x_out) / h;
    const double alpha = c[0][0] * c[1][1] / (c[0][1] * c[1][0]);
    CHECK_THAT(d, WithinAbs(alpha * alpha, 1e-6));
    CHECK_THAT(constant_field_return_slope(c[0], c[1]), WithinAbs(alpha * alpha, 1e-12));
  }
}

TEST_CASE("regularized Hopf flow", "[flow]") {
  const auto run = [](double mu) {
    const RegularizedField f(hopf(mu), hopf_spec(0.1, 0.1));
    const Trajectory tr = integrate_smooth(f, {0.0, -1e-4}, 30.0);
    REQUIRE_FALSE(tr.failed);
    for (const auto& s : tr.samples) CHECK(s.regime == Regime::Regularized);
    const Point a = tr.samples.front().x, b = tr.end();
    return std::hypot(b[0], b[1]) / std::hypot(a[0], a[1]);
  };
  CHECK(run(-0.05) < 0.9);
  CHECK(run(0.05) > 1.1);
}

TEST_CASE("far-field regularized flow equals the X flow", "[flow]") {
  const PiecewiseSystem s("1 + x2^2", "0.5", "2", "1");
  RegularizationSpec sp;
  sp.epsilon = sp.eta = 0.01;
  sp.phi = builtin("st_linear");
  sp.psi = builtin("st_cubic");
  const RegularizedField f(s, sp);
  const Trajectory a = integrate_smooth(f, {0.1, 0.1}, 0.5);
  const Trajectory b = integrate_filippov(s, {0.1, 0.1}, 0.5);
  CHECK(std::fabs(a.end()[0] - b.end()[0]) < 1e-9);
  CHECK(std::fabs(a.end()[1] - b.end()[1]) < 1e-9);
}

TEST_CASE("regularized return map near the Hopf point", "[flow]") {
  const RegularizedField f(hopf(0.0), hopf_spec(0.1, 0.1));
  const ReturnResult r = return_map(f, -0.001);
  REQUIRE(r.ok);
  const double ratio = r.x_out / -0.001;
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
}

TEST_CASE("CSV export", "[flow]") {
  const Trajectory tr = integrate_filippov(PiecewiseSystem("1", "2", "2", "1"), {-0.5, -0.5}, 0.1);
  std::ostringstream os;
  write_csv(os, tr);
  const std::string s = os.str();
  CHECK(s.find(",X\n") != std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(tr.samples.size()));
}
