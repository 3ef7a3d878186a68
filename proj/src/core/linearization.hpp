#pragma once

// Affine-noise linearization at a deterministic equilibrium and the linear
// moment ODE Q' = bigA Q + S built from it, together with the stability
// quantities extracted from that system: lambda_max(bigA), the stationary
// moments Q_inf and beta^2, the diffusion-Jacobian tensor norm, and the
// linearization-validity exponent mu.

#include <cstdint>
#include <optional>

#include "equilibria.hpp"
#include "linalg.hpp"
#include "model.hpp"

namespace msbif {

struct Linearization {
  Vector x_star;
  DenseMatrix A;                // DF(x*), d x d
  std::vector<DenseMatrix> B;   // DG_i(x*), m of them
  std::vector<Vector> Gamma;    // G_i(x*), m columns
  // Lambda is identically zero for centered linearizations.
  std::size_t d() const { return x_star.size(); }
  std::size_t m() const { return B.size(); }
};

struct MomentSystem {
  DenseMatrix big_a;  // (d^2+d) x (d^2+d), block upper triangular
  Vector s;           // length d^2+d; mean block is zero
  std::size_t d = 0;
  SymmetricIndexMap map;
  DenseMatrix reduced_a;  // d(d+1)/2 + d unknowns
  Vector reduced_s;
};

struct StabilityReport {
  double lambda_max_A = 0.0;
  std::optional<double> beta_sq;  // present iff linearly mean-square stable
  double mu = 0.0;
  double delta1 = 1e-3, delta2 = 1e-3;
  double dg_tensor_norm_sq = 0.0;
  bool linear_ms_stable = false;
  bool nonlinear_ms_stable = false;
  bool nonnormality_warning = false;
};

struct TailBound {
  double rho = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double bound_value = 0.0;
};

// Requires check_equilibrium(model, x_star, 1e-8).
Linearization linearize(const ModelSpec& model, const Vector& x_star);

MomentSystem build_moment_system(const Linearization& lin);

// Max real part over the spectrum of the reduced system (identical to the
// full system restricted to symmetric second-moment states). Exploits the
// block triangular structure: eigenvalues of the second-moment block union
// those of A.
double lambda_max_ms(const MomentSystem& ms);

struct StationaryMoments {
  Vector q_infinity;  // full (d^2 + d) indexing
  double beta_sq = 0.0;
};

// Solves bigA Q_inf = -S on the reduced system. Throws
// not_mean_square_stable when lambda_max >= 0 or within 1e-10 of it.
StationaryMoments stationary_moments(const MomentSystem& ms);

// Sum over i of ||DG_i(x*)||_F^2.
double dg_tensor_norm_sq(const Linearization& lin);

// mu = 2 lambda_max{DF(x*)} + delta1 + (1 + delta2) ||DG(x*)||_{T3}^2, with
// lambda_max taken as the max real part of the spectrum. nonnormality is set
// when ||DF - DF^T||_F > 1e-8 ||DF||_F (the diagonalization hypothesis behind
// the exponent is strained for nonnormal DF).
double compute_mu(const ModelSpec& model, const Vector& x_star,
                  double delta1 = 1e-3, double delta2 = 1e-3,
                  bool* nonnormality_warning = nullptr);

// P(||X(t)||^{2q} > rho) <= (R_q + ||X0||^{2q}) / rho for all t. With rho
// omitted, returns the smallest rho achieving the requested epsilon.
TailBound markov_tail_dissipative(double q, double alpha2, double alpha3,
                                  double norm_x0, double epsilon,
                                  std::optional<double> rho = std::nullopt);

// P(||Y(t)||^2 > rho) <= (2 beta^2 + delta)/rho + 2 epsilon/rho for large t.
TailBound markov_tail_stationary(double beta_sq, double delta, double epsilon,
                                 double rho);

// Full pipeline at one equilibrium.
StabilityReport analyze_equilibrium(const ModelSpec& model,
                                    const Vector& x_star, double delta1 = 1e-3,
                                    double delta2 = 1e-3);

struct CoupledErrorSeries {
  std::vector<double> times;
  std::vector<double> mean_sq_error;   // estimate of E||Y - Ytilde||^2
  std::vector<double> standard_error;
};

// Nonlinear centered paths and linearized paths driven by identical Brownian
// increments; the estimator is the ensemble mean of ||Y - Ytilde||^2.
CoupledErrorSeries coupled_linearization_error(const ModelSpec& model,
                                               const Vector& x_star,
                                               const Vector& x0, double t_final,
                                               double dt, std::size_t n_paths,
                                               std::uint64_t seed,
                                               std::size_t n_records = 11);

}  // namespace msbif
