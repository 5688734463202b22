#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crossreg/system.hpp"

namespace crossreg {

enum class ClassLabel { A0, B0, C0, A1, B1, C1, Unclassified };
const char* to_string(ClassLabel c);

// A named scalar test. margin > 0 means the inequality holds with room to
// spare; for "= 0" tests margin = tol - |value|.
struct Witness {
  std::string name;
  double value = 0.0;
  double margin = 0.0;
};

struct FirstReturnExpansion {
  bool ok = false;
  std::string error;
  double alpha = 0.0;     // (X1 Y2 / (X2 Y1))(0)
  double c2 = 0.0;        // fitted x^2 coefficient, = (alpha + alpha^2) beta
  double beta_fit = 0.0;  // NaN when alpha = -1 (unidentifiable)
  double eta_fit = 0.0;   // fitted x^3 coefficient
  double fit_residual = 0.0;  // max |model - map| over the samples
  double radius = 0.0;        // samples at x = -r k/16, k = 1..16
};

struct ClassificationResult {
  ClassLabel label = ClassLabel::Unclassified;
  std::vector<Witness> witnesses;
  std::vector<std::string> matched;  // every class whose hypotheses passed
  std::vector<std::string> diagnostics;
  bool transient = false;
  std::optional<FirstReturnExpansion> first_return;
  const Witness* find(const std::string& name) const;
};

ClassificationResult classify_origin(const PiecewiseSystem& sys);

// X1 X2(0) < 0. Throws std::invalid_argument unless the C sign pattern holds.
bool is_transient(const PiecewiseSystem& sys);

// Flow check: from sample points in each quadrant the quadrant field reaches
// both axes in finite (forward or backward) time while staying in the quadrant.
struct TransienceCheck {
  bool all_reach = true;
  int samples = 0;
  std::vector<std::string> failures;
};
TransienceCheck transience_numeric(const PiecewiseSystem& sys, int per_quadrant = 8);

// Least-squares fit of the numeric return map on Sigma2- with the linear
// coefficient fixed at alpha^2. r <= 0 selects 0.1 domain_radius.
FirstReturnExpansion first_return_coefficients(const PiecewiseSystem& sys, double r = 0.0);

// Tolerances shared with the other modules.
double product_tol(const PiecewiseSystem& sys);     // tau_rel S^2
double derivative_tol(const PiecewiseSystem& sys);  // tau_rel S^2 / R

}  // namespace crossreg
