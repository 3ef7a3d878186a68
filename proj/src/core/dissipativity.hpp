#pragma once

// Sampled certificates for the dissipativity inequality
//   <x, F(x)> + ((p-1)/2) ||G(x)||_F^2 <= -alpha2 ||x||^2 + alpha3,
// the long-time moment bound constants R_q, and the remainder-moment bounds
// that control the linearization error. A finite sample is evidence, not a
// proof; certificates record the sample size and radius.

#include <cstdint>
#include <optional>

#include "model.hpp"

namespace msbif {

enum class CertStatus {
  certified,   // inequality held on every sample point of R^d
  violated,    // some sample point failed
  not_applicable_domain_restricted,  // model is dissipative only on its
                                     // invariant domain; sampled there
};

struct DissipativityCertificate {
  double p = 2.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  double test_radius = 0.0;
  std::size_t n_samples = 0;
  double max_violation = 0.0;  // <= 0 when the inequality held everywhere
  CertStatus status = CertStatus::violated;
};

// alpha2/alpha3 resolution order: explicit arguments, then model metadata,
// then a coarse grid search over alpha2 in {2^-6 .. 2^4} picking the largest
// certified alpha2 with minimal alpha3.
DissipativityCertificate check_dissipative(
    const ModelSpec& model, double p = 2.0,
    std::optional<double> alpha2 = std::nullopt,
    std::optional<double> alpha3 = std::nullopt, double radius = 10.0,
    std::size_t n_samples = 4096, std::uint64_t seed = 0);

struct MomentBound {
  double bound = 0.0;  // ||X0||^{2q} e^{-q a2 t} + R_q (e^{-2 a2 t} for q = 1)
  double r_q = 0.0;
};

MomentBound moment_bound(double q, double alpha2, double alpha3,
                         double norm_x0, double t);

double r_q_constant(double q, double alpha2, double alpha3);

struct RemainderBound {
  double k_xstar = 0.0;  // max of the per-channel constants below
  double k_f = 0.0, k_g = 0.0;
  double q1 = 0.0, q2 = 0.0;
  double r_q1p2 = 0.0, r_q2p2 = 0.0;  // R_{q1+2}, R_{q2+2}
  double bound_f = 0.0, bound_g = 0.0;
};

// Constants bounding E||R_F(Y(t))||^2 and E||R_G(Y(t))||_F^2 uniformly in t:
//   bound_F = K_F (1 + R_{q1+2} + ||X0||^{2(q1+2)}),  bound_G analogous.
// Needs remainder metadata and certified dissipativity constants.
RemainderBound remainder_bounds(const ModelSpec& model, const Vector& x_star,
                                double norm_x0, double p = 2.0);

}  // namespace msbif
