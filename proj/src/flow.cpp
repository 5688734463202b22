#include "crossreg/flow.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace crossreg {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::X: return "X";
    case Regime::Y: return "Y";
    case Regime::Sliding1: return "Sliding-Sigma1";
    case Regime::Sliding2: return "Sliding-Sigma2";
    case Regime::Regularized: return "Regularized";
  }
  return "?";
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::CrossSigma1: return "cross-Sigma1";
    case EventKind::CrossSigma2: return "cross-Sigma2";
    case EventKind::EnterSliding: return "enter-sliding";
    case EventKind::ExitSliding: return "exit-sliding";
    case EventKind::ReachOrigin: return "reach-origin";
    case EventKind::LeaveDomain: return "leave-domain";
    case EventKind::SingularTangency: return "singular-tangency";
    case EventKind::OriginContinue: return "origin-continue";
  }
  return "?";
}

bool Trajectory::has_event(EventKind k) const {
  return std::any_of(events.begin(), events.end(), [&](const FlowEvent& e) { return e.kind == k; });
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

struct StepOut {
  Point y;
  Point err;
};

StepOut dp5_step(const Rhs& f, const Point& y, double h) {
  auto at = [&](double w1, const Vec2& k1, double w2 = 0, const Vec2& k2 = {}, double w3 = 0,
                const Vec2& k3 = {}, double w4 = 0, const Vec2& k4 = {}, double w5 = 0,
                const Vec2& k5 = {}) {
    Point p;
    for (int i = 0; i < 2; ++i)
      p[i] = y[i] + h * (w1 * k1[i] + w2 * k2[i] + w3 * k3[i] + w4 * k4[i] + w5 * k5[i]);
    return p;
  };
  const Vec2 k1 = f(y);
  const Vec2 k2 = f(at(a21, k1));
  const Vec2 k3 = f(at(a31, k1, a32, k2));
  const Vec2 k4 = f(at(a41, k1, a42, k2, a43, k3));
  const Vec2 k5 = f(at(a51, k1, a52, k2, a53, k3, a54, k4));
  const Vec2 k6 = f(at(a61, k1, a62, k2, a63, k3, a64, k4, a65, k5));
  StepOut o;
  for (int i = 0; i < 2; ++i)
    o.y[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  const Vec2 k7 = f(o.y);
  for (int i = 0; i < 2; ++i)
    o.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  (void)c2; (void)c3; (void)c4; (void)c5;  // autonomous: stage times unused
  return o;
}

}  // namespace

OdeOutcome integrate_ode(const Rhs& f, Point x0, double t0, double t_end, const FlowOptions& opt,
                         const std::vector<OdeEvent>& events,
                         const std::function<void(double, const Point&)>& on_step) {
  OdeOutcome out;
  out.x = x0;
  out.t = t0;
  const double dir = t_end >= t0 ? 1.0 : -1.0;
  double h = dir * std::min(opt.initial_step, opt.max_step);
  std::vector<double> g0(events.size());
  try {
    for (std::size_t k = 0; k < events.size(); ++k) g0[k] = events[k].g(x0);
    for (long n = 0; n < opt.max_steps; ++n) {
      if (dir * (t_end - out.t) <= 0.0) return out;
      if (dir * (out.t + h - t_end) > 0.0) h = t_end - out.t;
      if (std::fabs(h) > opt.max_step) h = dir * opt.max_step;
      if (std::fabs(h) < 1e-14 * std::max(1.0, std::fabs(out.t))) {
        out.failed = true;
        char buf[160];
        std::snprintf(buf, sizeof buf, "step-size underflow at t = %.6g, x = (%.6g, %.6g)", out.t,
                      out.x[0], out.x[1]);
        out.error = buf;
        return out;
      }
      const StepOut s = dp5_step(f, out.x, h);
      double err = 0.0;
      for (int i = 0; i < 2; ++i) {
        const double sc = opt.atol + opt.rtol * std::max(std::fabs(out.x[i]), std::fabs(s.y[i]));
        err = std::max(err, std::fabs(s.err[i]) / sc);
      }
      if (!std::isfinite(err)) {
        h *= 0.25;
        continue;
      }
      if (err > 1.0) {
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        continue;
      }
      // Accepted: find the earliest event that fires inside the step.
      int fired = -1;
      double best = 2.0;
      Point best_x{};
      for (std::size_t k = 0; k < events.size(); ++k) {
        const double g1 = events[k].g(s.y);
        if (!(g0[k] > 0.0 && g1 <= 0.0)) continue;
        double lo = 0.0, hi = 1.0;
        Point xhi = s.y;
        while ((hi - lo) * std::fabs(h) > opt.event_tol) {
          const double mid = 0.5 * (lo + hi);
          const Point xm = dp5_step(f, out.x, mid * h).y;
          if (events[k].g(xm) > 0.0) {
            lo = mid;
          } else {
            hi = mid;
            xhi = xm;
          }
        }
        if (hi < best) {
          best = hi;
          fired = static_cast<int>(k);
          best_x = xhi;
        }
      }
      if (fired >= 0) {
        out.t += best * h;
        out.x = best_x;
        out.event = events[fired].id;
        if (on_step) on_step(out.t, out.x);
        return out;
      }
      out.t += h;
      out.x = s.y;
      for (std::size_t k = 0; k < events.size(); ++k) g0[k] = events[k].g(out.x);
      if (on_step) on_step(out.t, out.x);
      h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
    }
    out.failed = true;
    out.error = "maximum number of steps exceeded";
  } catch (const std::exception& e) {
    out.failed = true;
    char buf[96];
    std::snprintf(buf, sizeof buf, " near t = %.6g, x = (%.6g, %.6g)", out.t, out.x[0], out.x[1]);
    out.error = std::string("field evaluation failed: ") + e.what() + buf;
  }
  return out;
}

namespace {

struct Quad {
  int s1, s2;
  bool uses_X() const { return s1 * s2 > 0; }
  friend bool operator==(const Quad&, const Quad&) = default;
};

int sgn_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// Piecewise flow state machine.
class FilippovRunner {
 public:
  FilippovRunner(const PiecewiseSystem& sys, const FlowOptions& opt, double t_end)
      : sys_(sys), opt_(opt), t_end_(t_end), R_(sys.domain_radius()), tau_(sys.tau_zero()) {}

  Trajectory run(Point p0) {
    p_ = p0;
    if (std::max(std::fabs(p0[0]), std::fabs(p0[1])) > R_)
      throw std::invalid_argument("initial point outside the domain");
    const double tp = 1e-12 * R_;
    const bool on1 = std::fabs(p0[0]) <= tp, on2 = std::fabs(p0[1]) <= tp;
    if (on1 && on2) {
      p_ = {0.0, 0.0};
      sample(Regime::X);  // regime at a point of rest is immaterial; overwritten if the orbit moves
      at_origin();
    } else if (on1 || on2) {
      if (on1) p_[0] = 0.0;
      if (on2) p_[1] = 0.0;
      const Branch b = on1 ? Branch{1, sgn_of(p_[1])} : Branch{2, sgn_of(p_[0])};
      sample(b.axis == 1 ? Regime::Sliding1 : Regime::Sliding2);
      on_axis(b, std::nullopt);
    } else {
      mode_ = Mode::Quadrant;
      q_ = {sgn_of(p_[0]), sgn_of(p_[1])};
      sample(q_.uses_X() ? Regime::X : Regime::Y);
    }
    int stalls = 0;
    while (mode_ != Mode::Stop && t_ < t_end_) {
      const double t_before = t_;
      if (mode_ == Mode::Quadrant)
        quadrant_leg();
      else
        sliding_leg();
      stalls = t_ - t_before <= 1e-14 * std::max(1.0, std::fabs(t_)) ? stalls + 1 : 0;
      if (stalls > 8 && mode_ != Mode::Stop) {
        event(EventKind::SingularTangency, "no progress at the switching set");
        mode_ = Mode::Stop;
      }
    }
    return std::move(tr_);
  }

 private:
  enum class Mode { Quadrant, Sliding, Stop };

  void sample(Regime r) {
    if (!tr_.samples.empty() && tr_.samples.back().t >= t_) {
      tr_.samples.back().x = p_;
      return;
    }
    tr_.samples.push_back({t_, p_, r});
  }
  void event(EventKind k, std::string note = {}) { tr_.events.push_back({t_, k, p_, std::move(note)}); }
  void fail(const std::string& msg) {
    tr_.failed = true;
    tr_.error = msg;
    mode_ = Mode::Stop;
  }

  Vec2 field_of(const Quad& q, const Point& p) const { return q.uses_X() ? sys_.X(p) : sys_.Y(p); }

  void quadrant_leg() {
    const Quad q = q_;
    const Regime reg = q.uses_X() ? Regime::X : Regime::Y;
    Rhs f = [&](const Point& p) { return field_of(q, p); };
    std::vector<OdeEvent> ev = {
        {[q](const Point& p) { return q.s1 * p[0]; }, 1},
        {[q](const Point& p) { return q.s2 * p[1]; }, 2},
        {[this](const Point& p) { return R_ - std::max(std::fabs(p[0]), std::fabs(p[1])); }, 3},
    };
    const OdeOutcome o = integrate_ode(f, p_, t_, t_end_, opt_, ev, [&](double t, const Point& x) {
      t_ = t;
      p_ = x;
      sample(reg);
    });
    t_ = o.t;
    p_ = o.x;
    if (o.failed) return fail(o.error);
    if (o.event < 0) return stop_at_end();
    if (o.event == 3) {
      event(EventKind::LeaveDomain);
      mode_ = Mode::Stop;
      return;
    }
    const double to = 1e-9 * R_;
    if (o.event == 1) p_[0] = 0.0;
    if (o.event == 2) p_[1] = 0.0;
    if (std::fabs(p_[0]) <= to && std::fabs(p_[1]) <= to) {
      p_ = {0.0, 0.0};
      sample(reg);
      return at_origin();
    }
    sample(reg);
    const Branch b = o.event == 1 ? Branch{1, sgn_of(p_[1])} : Branch{2, sgn_of(p_[0])};
    on_axis(b, q);
  }

  // Decide the continuation at a point of branch b (p_ already snapped).
  void on_axis(const Branch& b, std::optional<Quad> from) {
    const int i = b.axis - 1;
    const double Xf = sys_.X(p_)[i], Yf = sys_.Y(p_)[i];
    const RegionKind kind = region_from_normals(b, Xf, Yf, tau_);
    // X side of Sigma_i^sigma has x_i of sign sigma, Y side the opposite.
    const Quad qX = b.axis == 1 ? Quad{b.sign, b.sign} : Quad{b.sign, b.sign};
    const Quad qY = b.axis == 1 ? Quad{-b.sign, b.sign} : Quad{b.sign, -b.sign};
    const EventKind cross = b.axis == 1 ? EventKind::CrossSigma1 : EventKind::CrossSigma2;
    switch (kind) {
      case RegionKind::Crossing: {
        const Quad dest = sgn_of(Xf) == (b.axis == 1 ? qX.s1 : qX.s2) ? qX : qY;
        event(cross);
        mode_ = Mode::Quadrant;
        q_ = dest;
        return;
      }
      case RegionKind::Sliding:
      case RegionKind::Escaping: {
        if (sliding_field(sys_, b, 1.0).degenerate && std::fabs(Yf - Xf) <= tau_) {
          event(EventKind::SingularTangency, "degenerate sliding field");
          mode_ = Mode::Stop;
          return;
        }
        event(EventKind::EnterSliding, kind == RegionKind::Escaping ? "escaping" : "sliding");
        mode_ = Mode::Sliding;
        slide_ = b;
        return;
      }
      case RegionKind::Tangency: {
        const bool tX = std::fabs(Xf) <= tau_, tY = std::fabs(Yf) <= tau_;
        if (tX && tY) {
          event(EventKind::SingularTangency);
          mode_ = Mode::Stop;
          return;
        }
        Quad dest;
        if (from) {
          const bool arrival_tangent = from->uses_X() ? tX : tY;
          // Arrival-side field tangent: follow it back into its quadrant.
          // Otherwise the opposite field is tangent and the orbit crosses.
          dest = arrival_tangent ? *from : (*from == qX ? qY : qX);
        } else {
          // Starting point: take the side whose field leaves the axis transversally.
          const int sX = b.axis == 1 ? qX.s1 : qX.s2;
          const int sY = b.axis == 1 ? qY.s1 : qY.s2;
          if (!tX && sgn_of(Xf) == sX)
            dest = qX;
          else if (!tY && sgn_of(Yf) == sY)
            dest = qY;
          else
            dest = tX ? qX : qY;
        }
        event(cross, "tangency");
        mode_ = Mode::Quadrant;
        q_ = dest;
        return;
      }
    }
  }

  void sliding_leg() {
    const Branch b = slide_;
    const int i = b.axis - 1, j = 1 - i;
    const Regime reg = b.axis == 1 ? Regime::Sliding1 : Regime::Sliding2;
    const double sX = sgn_of(sys_.X(p_)[i]), sY = sgn_of(sys_.Y(p_)[i]);
    Rhs f = [&](const Point& p) {
      const Vec2 x = sys_.X(p), y = sys_.Y(p);
      Vec2 v{0.0, 0.0};
      v[j] = (y[i] * x[j] - x[i] * y[j]) / (y[i] - x[i]);
      return v;
    };
    std::vector<OdeEvent> ev = {
        {[&](const Point& p) { return sX * sys_.X(p)[i]; }, 1},
        {[&](const Point& p) { return sY * sys_.Y(p)[i]; }, 2},
        {[&](const Point& p) { return b.sign * p[j]; }, 3},
        {[this](const Point& p) { return R_ - std::max(std::fabs(p[0]), std::fabs(p[1])); }, 4},
    };
    const OdeOutcome o = integrate_ode(f, p_, t_, t_end_, opt_, ev, [&](double t, const Point& x) {
      t_ = t;
      p_ = x;
      sample(reg);
    });
    t_ = o.t;
    p_ = o.x;
    p_[i] = 0.0;
    if (o.failed) return fail(o.error);
    if (o.event < 0) return stop_at_end();
    if (o.event == 3) p_ = {0.0, 0.0};
    sample(reg);
    if (o.event == 4) {
      event(EventKind::LeaveDomain);
      mode_ = Mode::Stop;
      return;
    }
    if (o.event == 3) return at_origin();
    // A normal component vanished: follow that field into its own quadrant.
    const Quad qX = b.axis == 1 ? Quad{b.sign, b.sign} : Quad{b.sign, b.sign};
    const Quad qY = b.axis == 1 ? Quad{-b.sign, b.sign} : Quad{b.sign, -b.sign};
    event(EventKind::ExitSliding, o.event == 1 ? "X tangent" : "Y tangent");
    mode_ = Mode::Quadrant;
    q_ = o.event == 1 ? qX : qY;
  }

  // (i0) both axes crossing: the unique quadrant trajectory through 0.
  // (ii0) exactly one axis i sliding or escaping: follow Z_i^s through 0.
  // (iii0) both axes sliding or escaping: the orbit is {0}.
  void at_origin() {
    const Point o{0.0, 0.0};
    const Vec2 X0 = sys_.X(o), Y0 = sys_.Y(o);
    for (int i = 0; i < 2; ++i)
      if (std::fabs(X0[i]) <= tau_ || std::fabs(Y0[i]) <= tau_) {
        event(EventKind::SingularTangency, "tangency at the origin");
        mode_ = Mode::Stop;
        return;
      }
    const bool c1 = X0[0] * Y0[0] > 0.0, c2 = X0[1] * Y0[1] > 0.0;
    if (c1 && c2) {
      std::vector<Quad> out;
      for (const Quad q : {Quad{1, 1}, Quad{-1, 1}, Quad{-1, -1}, Quad{1, -1}}) {
        const Vec2 F = q.uses_X() ? X0 : Y0;
        if (sgn_of(F[0]) == q.s1 && sgn_of(F[1]) == q.s2) out.push_back(q);
      }
      if (out.size() == 1) {
        event(EventKind::OriginContinue, "(i0) crossing through the origin");
        mode_ = Mode::Quadrant;
        q_ = out[0];
        return;
      }
      event(EventKind::ReachOrigin, "(i0) no unique continuation");
      mode_ = Mode::Stop;
      return;
    }
    if (c1 != c2) {
      const int axis = c1 ? 2 : 1;
      const int i = axis - 1, j = 1 - i;
      const double z = (Y0[i] * X0[j] - X0[i] * Y0[j]) / (Y0[i] - X0[i]);
      if (std::fabs(z) > tau_) {
        const Branch nb{axis, sgn_of(z)};
        event(EventKind::OriginContinue, "(ii0) sliding continues on " + nb.name());
        mode_ = Mode::Sliding;
        slide_ = nb;
        return;
      }
      event(EventKind::ReachOrigin, "(ii0) pseudo-equilibrium at the origin");
      mode_ = Mode::Stop;
      return;
    }
    event(EventKind::ReachOrigin, "(iii0) orbit stops at the origin");
    mode_ = Mode::Stop;
  }

  void stop_at_end() { mode_ = Mode::Stop; }

  const PiecewiseSystem& sys_;
  FlowOptions opt_;
  double t_end_;
  double R_, tau_;
  Trajectory tr_;
  Mode mode_ = Mode::Stop;
  Quad q_{1, 1};
  Branch slide_;
  Point p_{};
  double t_ = 0.0;
};

}  // namespace

Trajectory integrate_filippov(const PiecewiseSystem& sys, Point p0, double t_end,
                              const FlowOptions& opt) {
  FilippovRunner r(sys, opt, t_end);
  return r.run(p0);
}

Trajectory integrate_smooth(const RegularizedField& field, Point p0, double t_end, FlowOptions opt) {
  Trajectory tr;
  const double R = field.system().domain_radius();
  opt.max_step = std::min(opt.max_step, std::min(field.spec().epsilon, field.spec().eta) / 4.0);
  tr.samples.push_back({0.0, p0, Regime::Regularized});
  Rhs f = [&](const Point& p) { return field(p); };
  std::vector<OdeEvent> ev = {
      {[R](const Point& p) { return R - std::max(std::fabs(p[0]), std::fabs(p[1])); }, 1}};
  const OdeOutcome o = integrate_ode(f, p0, 0.0, t_end, opt, ev, [&](double t, const Point& x) {
    tr.samples.push_back({t, x, Regime::Regularized});
  });
  if (o.failed) {
    tr.failed = true;
    tr.error = o.error;
  }
  if (o.event == 1) tr.events.push_back({o.t, EventKind::LeaveDomain, o.x, {}});
  return tr;
}

namespace {

// One quadrant leg: from the axis `from` to the axis `to` inside quadrant q.
bool leg(const std::function<Vec2(const Point&)>& F, Quad q, int from, int to, Point& p,
         double& time, double R, double tau, const FlowOptions& opt, std::string& err) {
  const int nf = from - 1;
  const double normal = F(p)[nf];
  const int side = nf == 0 ? q.s1 : q.s2;
  if (std::fabs(normal) <= tau) {
    err = "field tangent to the section at the start of a leg";
    return false;
  }
  const double dir = sgn_of(normal) == side ? 1.0 : -1.0;
  std::vector<OdeEvent> ev = {
      {[q, to](const Point& x) { return (to == 1 ? q.s1 : q.s2) * x[to - 1]; }, 1},
      {[q, from](const Point& x) { return (from == 1 ? q.s1 : q.s2) * x[from - 1]; }, 2},
      {[R](const Point& x) { return R - std::max(std::fabs(x[0]), std::fabs(x[1])); }, 3},
  };
  // Budget: many domain crossings at the slowest plausible speed.
  const double S = std::max(1e-300, std::hypot(F(p)[0], F(p)[1]));
  const double T = 1e3 * R / S;
  const OdeOutcome o = integrate_ode(F, p, 0.0, dir * T, opt, ev);
  if (o.failed) {
    err = o.error;
    return false;
  }
  if (o.event != 1) {
    err = o.event == 2   ? "orbit returned to its starting axis"
          : o.event == 3 ? "orbit left the domain"
                         : "orbit did not reach the next section";
    return false;
  }
  p = o.x;
  p[to - 1] = 0.0;
  time += std::fabs(o.t);
  return true;
}

}  // namespace

ReturnResult return_map(const PiecewiseSystem& sys, double x, const FlowOptions& opt) {
  ReturnResult r;
  if (!(x < 0.0)) {
    r.error = "return map needs a point x < 0 on Sigma2-";
    return r;
  }
  const double R = sys.domain_radius(), tau = sys.tau_zero();
  auto Xf = [&](const Point& p) { return sys.X(p); };
  auto Yf = [&](const Point& p) { return sys.Y(p); };
  Point p{x, 0.0};
  r.hits.push_back(p);
  struct L {
    Quad q;
    int from, to;
  };
  const L legs[4] = {{{-1, 1}, 2, 1}, {{1, 1}, 1, 2}, {{1, -1}, 2, 1}, {{-1, -1}, 1, 2}};
  try {
    for (const L& l : legs) {
      const std::function<Vec2(const Point&)> F =
          l.q.uses_X() ? std::function<Vec2(const Point&)>(Xf) : std::function<Vec2(const Point&)>(Yf);
      if (!leg(F, l.q, l.from, l.to, p, r.time, R, tau, opt, r.error)) return r;
      r.hits.push_back(p);
    }
  } catch (const std::exception& e) {
    r.error = e.what();
    return r;
  }
  r.ok = true;
  r.x_out = p[0];
  return r;
}

ReturnResult return_map(const RegularizedField& field, double x, FlowOptions opt, double t_max) {
  ReturnResult r;
  const double R = field.system().domain_radius();
  opt.max_step = std::min(opt.max_step, std::min(field.spec().epsilon, field.spec().eta) / 4.0);
  Point p{x, 0.0};
  r.hits.push_back(p);
  Rhs f = [&](const Point& q) { return field(q); };
  try {
    const double v0 = f(p)[1];
    if (std::fabs(v0) <= field.system().tau_zero()) {
      r.error = "flow tangent to the section at the starting point";
      return r;
    }
    double sign = sgn_of(v0);  // sign of x2 right after leaving the section
    double t = 0.0;
    for (int crossings = 0; crossings < 16; ++crossings) {
      std::vector<OdeEvent> ev = {
          {[sign](const Point& q) { return sign * q[1]; }, 1},
          {[R](const Point& q) { return R - std::max(std::fabs(q[0]), std::fabs(q[1])); }, 2}};
      const OdeOutcome o = integrate_ode(f, p, t, t_max, opt, ev);
      if (o.failed) {
        r.error = o.error;
        return r;
      }
      if (o.event != 1) {
        r.error = o.event == 2 ? "orbit left the domain" : "no return within the time budget";
        return r;
      }
      t = o.t;
      p = o.x;
      r.hits.push_back(p);
      sign = -sign;
      // Back to the starting crossing direction on the negative x1 half-line.
      if (sgn_of(v0) == sign && p[0] < 0.0) {
        r.ok = true;
        r.x_out = p[0];
        r.time = t;
        return r;
      }
    }
    r.error = "too many section crossings without returning";
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

double constant_field_return_slope(const Vec2& X, const Vec2& Y) {
  // Leg slopes: Sigma2- -> Sigma1+ under Y maps x1 = x to x2 = -x Y2/Y1, etc.
  const double l1 = -Y[1] / Y[0];  // II: x2 = l1 * x1_start
  const double l2 = -X[0] / X[1];  // I:  x1 = l2 * x2
  const double l3 = -Y[1] / Y[0];  // IV: x2 = l3 * x1
  const double l4 = -X[0] / X[1];  // III: x1 = l4 * x2
  return l1 * l2 * l3 * l4;
}

void write_csv(std::ostream& os, const Trajectory& tr, int id) {
  char buf[160];
  for (const Sample& s : tr.samples) {
    if (id >= 0)
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%s\n", id, s.t, s.x[0], s.x[1],
                    to_string(s.regime));
    else
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s\n", s.t, s.x[0], s.x[1], to_string(s.regime));
    os << buf;
  }
}

}  // namespace crossreg
