#include "validate.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "dissipativity.hpp"
#include "linearization.hpp"
#include "model.hpp"
#include "simulate.hpp"
#include "sweep.hpp"

namespace msbif {

namespace {

void add_check(ValidationReport& report, const std::string& name,
               double measured, double expected, double tolerance,
               bool smaller_is_pass = false) {
  ValidationCheck c;
  c.name = name;
  c.measured = measured;
  c.expected = expected;
  c.tolerance = tolerance;
  c.pass = smaller_is_pass ? measured <= expected + tolerance
                           : std::fabs(measured - expected) <= tolerance;
  char buf[160];
  std::snprintf(buf, sizeof buf, "measured %.10g vs expected %.10g (tol %.2g)",
                measured, expected, tolerance);
  c.detail = buf;
  if (!c.pass) ++report.n_failed;
  report.checks.push_back(std::move(c));
}

double crossing_param(const ModelSpec& model, const std::string& param,
                      double from, double to, std::size_t steps,
                      const std::string& branch, const std::string& field) {
  const SweepResult sweep = run_sweep(model, param, from, to, steps);
  for (const CrossingEvent& ev : detect_crossings(model, sweep, field))
    if (ev.branch_id == branch && ev.refined) return ev.param_value;
  return std::numeric_limits<double>::quiet_NaN();
}

// Simple deterministic uniform for the random-identity checks.
double lcg_uniform(std::uint64_t& state) {
  state = state * 6364136223846793005ull + 1442695040888963407ull;
  return static_cast<double>(state >> 11) * 0x1.0p-53;
}

}  // namespace

ValidationReport run_validation(bool quick) {
  ValidationReport report;
  const bool sabotage_beta =
      std::getenv("MSBIF_VALIDATE_FORCE_WRONG_BETA") != nullptr;

  // closed-form beta^2 for the additive pitchfork
  {
    ModelSpec m = builtin("pitchfork", {.variant = "additive"});
    const double gamma = m.params.get("gamma"), sigma = m.params.get("sigma");
    const StabilityReport rep =
        analyze_equilibrium(m, {std::sqrt(gamma)});
    double expected = sigma * sigma / (4.0 * gamma);
    if (sabotage_beta) expected *= 2.0;  // negative-control hook for tests
    add_check(report, "beta_sq pitchfork additive (sigma^2/(4 gamma))",
              rep.beta_sq.value_or(-1.0), expected, 1e-10);
    add_check(report, "mu pitchfork additive (2 lambda_max + delta1)", rep.mu,
              -4.0 * gamma + 1e-3, 1e-12);
  }
  // closed-form beta^2 for the linear-multiplicative pitchfork
  {
    ModelSpec m = builtin("pitchfork", {.variant = "linear"});
    const double gamma = m.params.get("gamma"), sigma = m.params.get("sigma");
    const StabilityReport rep = analyze_equilibrium(m, {std::sqrt(gamma)});
    const double expected =
        sigma * sigma * gamma / (4.0 * gamma - sigma * sigma);
    add_check(report, "beta_sq pitchfork linear (sigma^2 gamma/(4 gamma - sigma^2))",
              rep.beta_sq.value_or(-1.0), expected, 1e-10);
  }
  // lambda_max crossing of the trivial branch under linear noise
  {
    ModelSpec m = builtin("pitchfork", {.variant = "linear"});
    const double sigma = m.params.get("sigma");
    add_check(report, "lambda_max crossing at gamma = -sigma^2/2",
              crossing_param(m, "gamma", -0.2, 0.2, 97, "0", "lambda_max_A"),
              -sigma * sigma / 2.0, 1e-7);
  }
  // mu crossing for the CIR model in sigma
  {
    ModelSpec m = builtin("cir");
    const double kappa = m.params.get("kappa"), theta = m.params.get("theta");
    const double expected =
        std::sqrt(4.0 * theta * (2.0 * kappa - 1e-3) / (1.0 + 1e-3));
    add_check(report, "mu crossing for cir in sigma",
              crossing_param(m, "sigma", 0.1, 0.8, 71, "theta", "mu"),
              expected, 1e-7);
  }
  // mu crossing of the stable pitchfork branches
  {
    ModelSpec m = builtin("pitchfork", {.variant = "additive"});
    add_check(report, "mu crossing at gamma = delta1/4",
              crossing_param(m, "gamma", 1e-4, 1e-2, 100, "+", "mu"),
              1e-3 / 4.0, 1e-7);
  }
  // Kronecker vectorization identity on random triples
  {
    std::uint64_t state = 0x5eedu;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + trial % 3;
      DenseMatrix a(n, n), b(n, n), c(n, n);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
          a(i, j) = 2.0 * lcg_uniform(state) - 1.0;
          b(i, j) = 2.0 * lcg_uniform(state) - 1.0;
          c(i, j) = 2.0 * lcg_uniform(state) - 1.0;
        }
      const Vector lhs = vec(a * b * c);
      const Vector rhs = kron(transpose(c), a) * vec(b);
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < lhs.size(); ++k) {
        num += (lhs[k] - rhs[k]) * (lhs[k] - rhs[k]);
        den += lhs[k] * lhs[k];
      }
      worst = std::max(worst, std::sqrt(num) / std::max(1e-300, std::sqrt(den)));
    }
    add_check(report, "vec(ABC) = (C^T (x) A) vec(B), 100 random triples",
              worst, 0.0, 1e-12, /*smaller_is_pass=*/true);
  }
  // reduced-system solution matches the full system
  {
    ModelSpec m = builtin("lorenz");
    const Vector x_star = m.analytic_equilibria()[1].x;
    const MomentSystem ms = build_moment_system(linearize(m, x_star));
    const StationaryMoments st = stationary_moments(ms);
    Vector rhs = ms.s;
    for (double& v : rhs) v = -v;
    const Vector q_full = solve_linear(ms.big_a, rhs);
    double diff = 0.0;
    for (std::size_t k = 0; k < q_full.size(); ++k)
      diff = std::max(diff, std::fabs(q_full[k] - st.q_infinity[k]));
    add_check(report, "reduced vs full Q_inf (lorenz)", diff, 0.0, 1e-10,
              /*smaller_is_pass=*/true);
  }
  // propagated moments approach Q_inf
  {
    ModelSpec m = builtin("pitchfork", {.variant = "additive"});
    const double gamma = m.params.get("gamma");
    const MomentSystem ms =
        build_moment_system(linearize(m, {std::sqrt(gamma)}));
    const StationaryMoments st = stationary_moments(ms);
    const Vector q0(ms.s.size(), 0.0);
    const auto prop = propagate_moments(
        ms.big_a, ms.s, q0, 50.0, default_propagation_steps(50.0, ms.big_a));
    double diff = 0.0;
    for (std::size_t k = 0; k < q0.size(); ++k)
      diff = std::max(diff, std::fabs(prop.state[k] - st.q_infinity[k]));
    add_check(report, "Q(50) vs -A^{-1}S (pitchfork additive)", diff, 0.0,
              1e-6, /*smaller_is_pass=*/true);
  }

  if (quick) return report;

  // Monte Carlo second moments vs the moment ODE at T = 1
  {
    ModelSpec m = builtin("pitchfork", {.variant = "linear"});
    const double gamma = m.params.get("gamma");
    const Vector x_star{std::sqrt(gamma)};
    const Linearization lin = linearize(m, x_star);
    const MomentSystem ms = build_moment_system(lin);

    SimConfig cfg;
    cfg.t_final = 1.0;
    cfg.dt = 1e-3;
    cfg.n_paths = 10000;
    cfg.seed = 2024;
    cfg.x0 = Vector{0.05};
    cfg.output_stride = 1000;
    const PathEnsemble ens = simulate_linearization(lin, cfg);
    const MomentEstimate est = mc_moments(ens, true);

    Vector q0(ms.s.size(), 0.0);
    q0[0] = cfg.x0[0] * cfg.x0[0];
    q0[1] = cfg.x0[0];
    const auto prop = propagate_moments(ms.big_a, ms.s, q0, 1.0,
                                        default_propagation_steps(1.0, ms.big_a));
    const double p11 = prop.state[0];
    const std::size_t last = est.times.size() - 1;
    const double se = std::max(est.second_moment_se[last](0, 0), 1e-12);
    add_check(report, "moment ODE vs MC second moment (3 SE units)",
              std::fabs(est.second_moment[last](0, 0) - p11) / se, 3.0, 0.0,
              /*smaller_is_pass=*/true);
  }
  // dissipative moment bound from the certified constants
  {
    ModelSpec m = builtin("pitchfork", {.variant = "additive"});
    const auto meta = m.meta(2.0).value();
    SimConfig cfg;
    cfg.t_final = 10.0;
    cfg.dt = 0.01;
    cfg.n_paths = 10000;
    cfg.seed = 7;
    cfg.x0 = Vector{2.0};
    cfg.output_stride = 100;
    const MomentEstimate est = mc_moments(tamed_em(m, cfg));
    double worst = -1e300;
    for (std::size_t k = 0; k < est.times.size(); ++k) {
      const double t = est.times[k];
      if (t < 0.999) continue;
      const MomentBound mb = moment_bound(1.0, meta.alpha2, meta.alpha3, 2.0, t);
      const double slack = 3.0 * std::max(est.second_moment_norm_se[k], 1e-12);
      worst = std::max(worst, est.second_moment_norm[k] - mb.bound - slack);
    }
    add_check(report, "E||X(t)||^2 within dissipative bound + 3 SE", worst, 0.0,
              0.0, /*smaller_is_pass=*/true);
  }
  // CIR mean reversion and stationary variance
  {
    ModelSpec m = builtin("cir");
    const double kappa = m.params.get("kappa"), theta = m.params.get("theta"),
                 sigma = m.params.get("sigma");
    SimConfig cfg;
    cfg.t_final = 10.0;
    cfg.dt = 0.005;
    cfg.n_paths = 10000;
    cfg.seed = 11;
    cfg.x0 = Vector{0.05};
    cfg.output_stride = 200;
    const MomentEstimate est = mc_moments(tamed_em(m, cfg));
    std::size_t k1 = 0;
    for (std::size_t k = 0; k < est.times.size(); ++k)
      if (std::fabs(est.times[k] - 1.0) < 1e-9) k1 = k;
    const double mean_expected =
        0.05 * std::exp(-kappa) + theta * (1.0 - std::exp(-kappa));
    const double mean_se = std::max(
        std::sqrt(std::max(0.0, est.second_moment_norm[k1] -
                                    est.mean[k1][0] * est.mean[k1][0]) /
                  static_cast<double>(cfg.n_paths)),
        1e-12);
    add_check(report, "CIR mean at t=1 (3 SE units)",
              std::fabs(est.mean[k1][0] - mean_expected) / mean_se, 3.0, 0.0,
              /*smaller_is_pass=*/true);
    const std::size_t last = est.times.size() - 1;
    const double var_expected = theta * sigma * sigma / (2.0 * kappa);
    const double var_measured =
        est.second_moment_norm[last] - est.mean[last][0] * est.mean[last][0];
    add_check(report, "CIR long-run variance (3 SE units)",
              std::fabs(var_measured - var_expected) /
                  std::max(est.second_moment_norm_se[last], 1e-12),
              3.0, 0.0, /*smaller_is_pass=*/true);
  }
  // short-horizon linearization error stays small when mu < 0
  {
    ModelSpec m = builtin("pitchfork", {.variant = "additive"});
    const double gamma = m.params.get("gamma");
    const Vector x_star{std::sqrt(gamma)};
    const Vector x0{std::sqrt(gamma) + 0.01};
    const CoupledErrorSeries series =
        coupled_linearization_error(m, x_star, x0, 1.0, 1e-3, 10000, 99, 2);
    add_check(report, "E||Z(1)||^2 small under mu < 0",
              series.mean_sq_error.back(), 1e-4, 0.0,
              /*smaller_is_pass=*/true);
  }
  return report;
}

}  // namespace msbif
