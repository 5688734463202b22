#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossreg/bifurcation.hpp"
#include "crossreg/regularize.hpp"

namespace crossreg {

// Input error with the offending file and 1-based line (0 when unknown).
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, std::string file = {}, int line = 0);
  std::string file;
  int line = 0;
};

// {builtin: name} or {name, pieces: [{lo, hi, expr, closed_hi}], monotone, sotomayor_teixeira}.
struct TransitionConfig {
  std::string builtin;
  std::string name;
  std::vector<PieceSpec> pieces;
  bool monotone = true;
  bool sotomayor_teixeira = false;
  TransitionFunction build() const;
};

// G: {kind, degrees: [m1, m2], free: {...}, terms: {G1: [...], G2: [...]},
//     custom: [e1, e2], hopf_equilibrium}.
// With hopf_equilibrium the dependent eqG/eqG1 coefficients are solved so
// that G(2, 7/4) = 0.
struct GConfig {
  std::string kind = "zero";
  int m1 = 0, m2 = 0;
  std::map<std::string, double> free;
  std::array<std::vector<GTerm>, 2> terms;
  std::array<std::string, 2> custom;
  bool hopf_equilibrium = false;
  GSpec build() const;
};

struct RegularizationConfig {
  double epsilon = 0.015, eta = 0.012, xi = 0.0;
  TransitionConfig phi, psi;
  GConfig g;
  RegularizationSpec build() const;
};

// kind: transcritical | saddlenode | fixed_eta | hopf | sotomayor.
// The first three build their own system from `signs` and the regularization;
// hopf sweeps `param` over [lo, hi]; sotomayor checks g1, g2 in (x1, x2, mu).
struct BifurcationConfig {
  std::string kind;
  SignTuple signs{1, 1, 1, 1};
  std::string param = "mu";
  double lo = -0.05, hi = 0.05;
  std::array<std::string, 2> g;
  Point u0{0, 0};
  double mu0 = 0.0;
};

struct SystemConfig {
  std::string name;
  std::string description;
  std::array<std::string, 4> fields;  // X1, X2, Y1, Y2
  ParamMap params;
  double domain_radius = 1.0;
  std::optional<double> tau_rel;
  std::optional<RegularizationConfig> regularization;
  std::optional<BifurcationConfig> bifurcation;
  std::string source;  // file the config came from, not serialized

  // Overrides must name declared parameters.
  PiecewiseSystem system(const ParamMap& overrides = {}) const;
  RegularizedField regularized(const ParamMap& overrides = {}) const;  // throws ConfigError without a regularization block
};

SystemConfig parse_config(const std::string& text, const std::string& source = "<string>");
SystemConfig load_config(const std::string& path);
std::string dump_config(const SystemConfig& c);

bool operator==(const SystemConfig& a, const SystemConfig& b);

}  // namespace crossreg
