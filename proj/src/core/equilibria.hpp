#pragma once

// Finding and continuing deterministic equilibria F(x; theta) = 0 along a
// parameter, with fold detection and deterministic stability classification
// from the spectrum of DF.

#include <optional>
#include <string>
#include <vector>

#include "model.hpp"

namespace msbif {

struct EquilibriumPoint {
  Vector x_star;
  double param_value = 0.0;
  std::string branch_id;
  double det_lambda_max = 0.0;  // max real part of spectrum(DF(x*))
  bool det_stable = false;
};

struct Branch {
  std::string id;
  std::vector<EquilibriumPoint> points;  // ordered along the continuation
  std::vector<double> fold_params;       // parameter values where det(DF) -> 0
};

// Newton iteration on F at the model's current parameters. Throws
// no_convergence after max_iter and singular_matrix when the Jacobian pivots
// vanish (typical near folds).
EquilibriumPoint newton(const ModelSpec& model, const Vector& x0,
                        double tol = 1e-12, int max_iter = 50);

// (det_lambda_max, det_stable) for an equilibrium.
std::pair<double, bool> det_classify(const ModelSpec& model,
                                     const Vector& x_star);

// Equilibria at the current parameter values: analytic ones verbatim when the
// model provides them, otherwise Newton from the seeds (default: a coarse
// 5^min(d,3) grid in [-2,2]^d), deduplicated and labeled deterministically.
std::vector<EquilibriumPoint> find_equilibria(
    const ModelSpec& model, const std::vector<Vector>& seeds = {});

struct ContinuationOptions {
  std::vector<Vector> seeds;  // overrides default seeding for the Newton path
  bool force_newton = false;  // skip analytic equilibria (exercises the
                              // predictor/corrector machinery)
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
};

std::vector<Branch> continue_branches(const ModelSpec& model,
                                      const std::string& param_name,
                                      double from, double to,
                                      std::size_t n_steps,
                                      const ContinuationOptions& opts = {});

// The branch's equilibrium at an off-grid parameter value (used by crossing
// refinement). For analytic models the branch label selects the root; for
// Newton branches the hint seeds the solve. nullopt when the branch does not
// exist there.
std::optional<EquilibriumPoint> branch_point_at(const ModelSpec& model,
                                                const std::string& param_name,
                                                double value,
                                                const std::string& branch_id,
                                                const Vector& hint);

}  // namespace msbif
