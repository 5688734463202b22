#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "crossreg/regularize.hpp"

namespace crossreg {

// Random system and regularization whose origin satisfies the closed-form
// preconditions: det[Z](0) = 0, H_2(0) = 0, G(phi(0), psi(0)) = 0, X2 != Y2.
// The transitions are polynomial inside [-1, 1] with nonzero phi'(0), psi'(0).
struct OracleCase {
  PiecewiseSystem sys;
  RegularizationSpec spec;
};
OracleCase jacobian_oracle_case(std::mt19937_64& rng, bool with_xi);

// Random constant transient system (X1 X2 < 0, mixed product signs).
PiecewiseSystem random_constant_transient(std::mt19937_64& rng);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;  // runtime budget in seconds
};

// Check names: jacobian-oracle, hopf-eigenvalues, ... (ids 1..10).
const char* criterion_name(int id);
int criterion_id(const std::string& name_or_id);  // 0 when unknown

CriterionResult acceptance_criterion(int id, std::uint64_t seed);
std::vector<CriterionResult> run_acceptance(std::uint64_t seed = 20240611);

}  // namespace crossreg
