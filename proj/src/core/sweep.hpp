#pragma once

// Full pipeline over a parameter range: equilibria per parameter value,
// moment analysis per equilibrium, and sign-change refinement for the
// stability fields, producing bifurcation tables.

#include <iosfwd>
#include <optional>
#include <string>

#include "equilibria.hpp"
#include "linearization.hpp"

namespace msbif {

struct SweepRow {
  std::string param_name;
  double param_value = 0.0;
  std::string branch_id;
  Vector x_star;
  double det_lambda_max = 0.0;
  bool det_stable = false;
  std::optional<double> lambda_max_A;
  std::optional<double> beta_sq;  // absent on unstable or failed rows
  std::optional<double> mu;
  std::optional<bool> linear_ms_stable;
  std::optional<bool> nonlinear_ms_stable;
};

struct CrossingEvent {
  std::string branch_id;
  std::string field;  // "lambda_max_A" or "mu"
  double param_value = 0.0;
  double lo = 0.0, hi = 0.0;  // final bracket
  bool refined = true;        // false when the bracket was lost near a fold
};

struct SweepResult {
  std::string param_name;
  double delta1 = 1e-3, delta2 = 1e-3;
  std::vector<SweepRow> rows;       // sorted by (branch_id, param_value)
  std::vector<Branch> branches;
};

SweepResult run_sweep(const ModelSpec& model, const std::string& param_name,
                      double from, double to, std::size_t n_steps,
                      double delta1 = 1e-3, double delta2 = 1e-3);

// Sign changes of the field along each branch, bisected by re-running the
// per-value analysis until the bracket is below 1e-8 * (1 + |param|). A
// branch that terminates at a fold is also probed against its fold endpoint.
std::vector<CrossingEvent> detect_crossings(const ModelSpec& model,
                                            const SweepResult& sweep,
                                            const std::string& field);

// sweep.csv; booleans as 0/1, absent values as empty fields.
void write_sweep_csv(std::ostream& os, const ModelSpec& model,
                     const SweepResult& sweep);

}  // namespace msbif
