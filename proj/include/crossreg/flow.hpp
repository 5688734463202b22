#pragma once

#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "crossreg/regularize.hpp"
#include "crossreg/system.hpp"

namespace crossreg {

enum class Regime { X, Y, Sliding1, Sliding2, Regularized };
enum class EventKind {
  CrossSigma1,
  CrossSigma2,
  EnterSliding,
  ExitSliding,
  ReachOrigin,
  LeaveDomain,
  SingularTangency,
  OriginContinue,
};
const char* to_string(Regime r);
const char* to_string(EventKind k);

struct Sample {
  double t;
  Point x;
  Regime regime;
};

struct FlowEvent {
  double t;
  EventKind kind;
  Point x;
  std::string note;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<FlowEvent> events;
  bool failed = false;
  std::string error;
  Point end() const { return samples.empty() ? Point{0, 0} : samples.back().x; }
  double end_time() const { return samples.empty() ? 0.0 : samples.back().t; }
  bool has_event(EventKind k) const;
};

struct FlowOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 1e-3;
  double event_tol = 1e-12;
  long max_steps = 2000000;
};

using Rhs = std::function<Vec2(const Point&)>;

// Event functions are positive on the allowed side; an event fires on the
// step where one becomes <= 0 and is located by bisection in time.
struct OdeEvent {
  std::function<double(const Point&)> g;
  int id;
};

struct OdeOutcome {
  Point x{};
  double t = 0.0;
  int event = -1;  // id of the event that stopped the integration, -1 = reached t_end
  bool failed = false;
  std::string error;
};

// Adaptive Dormand-Prince 5(4). t_end < t0 integrates backward.
OdeOutcome integrate_ode(const Rhs& f, Point x0, double t0, double t_end, const FlowOptions& opt,
                         const std::vector<OdeEvent>& events,
                         const std::function<void(double, const Point&)>& on_step = {});

// Filippov flow of Z = (X, Y) with the sliding and origin conventions.
Trajectory integrate_filippov(const PiecewiseSystem& sys, Point p0, double t_end,
                              const FlowOptions& opt = {});

// Flow of Z^R; max step defaults to min(eps, eta)/4.
Trajectory integrate_smooth(const RegularizedField& field, Point p0, double t_end,
                            FlowOptions opt = {});

struct ReturnResult {
  bool ok = false;
  double x_out = 0.0;
  double time = 0.0;
  std::vector<Point> hits;  // section points visited, starting point first
  std::string error;
};

// Circuit Sigma2- -(II, Y)-> Sigma1+ -(I, X)-> Sigma2+ -(IV, Y)-> Sigma1- -(III, X)-> Sigma2-.
// Each leg runs in the time direction that makes its field enter the quadrant.
ReturnResult return_map(const PiecewiseSystem& sys, double x, const FlowOptions& opt = {});

// First return of the smooth flow to {x2 = 0, x1 < 0} crossing in the starting direction.
ReturnResult return_map(const RegularizedField& field, double x, FlowOptions opt = {},
                        double t_max = 200.0);

// Exact return map for constant fields: composition of the four leg slopes.
double constant_field_return_slope(const Vec2& X, const Vec2& Y);

void write_csv(std::ostream& os, const Trajectory& tr, int id = -1);

}  // namespace crossreg
