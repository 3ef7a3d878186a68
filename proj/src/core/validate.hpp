#pragma once

// Cross-validation suites wired to the CLI: closed-form checks of the
// analytic pipeline plus Monte Carlo comparisons against the moment ODE and
// the dissipative moment bounds. `quick` skips the 10^4-path suites.

#include <string>
#include <vector>

namespace msbif {

struct ValidationCheck {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;  // human-readable "measured vs expected" line
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  int n_failed = 0;
};

ValidationReport run_validation(bool quick);

}  // namespace msbif
