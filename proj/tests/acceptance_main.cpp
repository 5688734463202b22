// Runs acceptance criteria 1-10 and prints one PASS/FAIL line for each.
// A FAIL line is a result, not a crash. Criteria whose reference formula
// cannot hold are reported as FAIL with their measured values. The exit code is
// nonzero only when the suite itself could not run.
#include <cstdio>
#include <exception>

#include "crossreg/acceptance.hpp"

int main() {
  try {
    int passed = 0;
    const auto results = crossreg::run_acceptance();
    for (const auto& r : results) {
      std::printf("%s %2d %-24s %6.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                  r.detail.c_str());
      passed += r.pass;
    }
    std::printf("%d/%zu criteria passed\n", passed, results.size());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance suite aborted: %s\n", e.what());
    return 2;
  }
}
