#include "dissipativity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rng.hpp"

namespace msbif {

namespace {

constexpr double kE = 2.718281828459045235360287;

constexpr std::size_t kPrimes[64] = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,
    43,  47,  53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101,
    103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167,
    173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239,
    241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

double halton(std::size_t index, std::size_t dim) {
  // Past the prime table, fall back to a scrambled counter stream.
  if (dim >= 64) {
    PathNoise aux(0x9E3779B97F4A7C15ull, dim);
    return aux.uniform(static_cast<std::uint32_t>(index), 0);
  }
  const std::size_t base = kPrimes[dim];
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

// Deterministic sample of the radius-R ball: Halton directions through the
// inverse normal map plus a u^(1/d) radial law, then 64 axis-aligned extreme
// points. `seed` offsets the sequence.
std::vector<Vector> ball_samples(std::size_t d, double radius,
                                 std::size_t n_samples, std::uint64_t seed) {
  std::vector<Vector> pts;
  pts.reserve(n_samples + 64);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const std::size_t idx = k + 1 + static_cast<std::size_t>(seed);
    Vector x(d);
    double nrm = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double u = std::min(std::max(halton(idx, j), 1e-15), 1.0 - 1e-15);
      x[j] = inverse_normal_cdf(u);
      nrm += x[j] * x[j];
    }
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) continue;
    const double u_r = std::min(std::max(halton(idx, d), 1e-15), 1.0 - 1e-15);
    const double r = radius * std::pow(u_r, 1.0 / static_cast<double>(d));
    for (std::size_t j = 0; j < d; ++j) x[j] *= r / nrm;
    pts.push_back(std::move(x));
  }
  std::size_t emitted = 0;
  for (int level = 0; level < 4 && emitted < 64; ++level) {
    const double mag = radius / static_cast<double>(1 << level);
    for (std::size_t j = 0; j < d && emitted < 64; ++j) {
      for (double sgn : {1.0, -1.0}) {
        if (emitted >= 64) break;
        Vector x(d, 0.0);
        x[j] = sgn * mag;
        pts.push_back(std::move(x));
        ++emitted;
      }
    }
  }
  return pts;
}

double default_form(const ModelSpec& model, double p, double a2, double a3,
                    const Vector& x) {
  const Vector f = model.F(x);
  const DenseMatrix g = model.G(x);
  double xf = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) xf += x[i] * f[i];
  const double gf = fro_norm(g);
  double xx = 0.0;
  for (double v : x) xx += v * v;
  return xf + 0.5 * (p - 1.0) * gf * gf + a2 * xx - a3;
}

double form_value(const ModelSpec& model, double p, double a2, double a3,
                  const Vector& x) {
  if (model.dissipativity_form)
    return model.dissipativity_form(model.params, p, a2, a3, x);
  return default_form(model, p, a2, a3, x);
}

}  // namespace

double r_q_constant(double q, double alpha2, double alpha3) {
  if (!(q >= 1.0) || !(alpha2 > 0.0) || alpha3 < 0.0)
    fail(ErrorCode::invalid_argument, "R_q needs q >= 1, a2 > 0, a3 >= 0");
  if (q == 1.0) return alpha3 / (kE * alpha2);
  return (1.0 / (q * kE)) * std::pow(2.0 * alpha3 / alpha2, q) *
         std::pow((q - 1.0) / q, q - 1.0);
}

DissipativityCertificate check_dissipative(const ModelSpec& model, double p,
                                           std::optional<double> alpha2,
                                           std::optional<double> alpha3,
                                           double radius,
                                           std::size_t n_samples,
                                           std::uint64_t seed) {
  if (!(p >= 2.0) || !(radius > 0.0))
    fail(ErrorCode::invalid_argument, "certificate needs p >= 2, radius > 0");

  std::vector<Vector> pts = ball_samples(model.d, radius, n_samples, seed);
  const bool restricted =
      model.invariant_domain != InvariantDomain::unrestricted ||
      static_cast<bool>(model.sample_restriction);
  if (model.invariant_domain == InvariantDomain::positive_cone) {
    for (Vector& x : pts)
      for (double& v : x) v = std::fabs(v);
  }
  if (model.sample_restriction) {
    std::vector<Vector> kept;
    kept.reserve(pts.size());
    for (Vector& x : pts)
      if (model.sample_restriction(model.params, x)) kept.push_back(std::move(x));
    pts = std::move(kept);
  }

  DissipativityCertificate cert;
  cert.p = p;
  cert.test_radius = radius;
  cert.n_samples = pts.size();

  auto max_violation_for = [&](double a2, double a3) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const Vector& x : pts)
      worst = std::max(worst, form_value(model, p, a2, a3, x));
    return worst;
  };

  if (!alpha2 || !alpha3) {
    const auto meta = model.meta(p);
    if (meta) {
      if (!alpha2) alpha2 = meta->alpha2;
      if (!alpha3) alpha3 = meta->alpha3;
    }
  }

  if (alpha2 && alpha3) {
    cert.alpha2 = *alpha2;
    cert.alpha3 = *alpha3;
    cert.max_violation = max_violation_for(*alpha2, *alpha3);
  } else {
    // Grid search: alpha3 is fitted on the inner half of the ball, then the
    // pair is validated on the full sample including the extreme points, so
    // genuinely non-dissipative systems still register violations.
    double best_a2 = std::ldexp(1.0, -6);
    double best_a3 = 0.0;
    double best_violation = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int k = 4; k >= -6; --k) {
      const double a2 = std::ldexp(1.0, k);
      double a3 = 0.0;
      for (const Vector& x : pts) {
        double xx = 0.0;
        for (double v : x) xx += v * v;
        if (xx > 0.25 * radius * radius) continue;  // fit on ||x|| <= R/2
        a3 = std::max(a3, form_value(model, p, a2, 0.0, x));
      }
      const double violation = max_violation_for(a2, a3);
      if (violation <= 0.0) {
        best_a2 = a2;
        best_a3 = a3;
        best_violation = violation;
        found = true;
        break;
      }
      if (violation < best_violation) {
        best_a2 = a2;
        best_a3 = a3;
        best_violation = violation;
      }
    }
    cert.alpha2 = best_a2;
    cert.alpha3 = best_a3;
    cert.max_violation = best_violation;
    (void)found;
  }

  if (cert.max_violation <= 0.0)
    cert.status = restricted ? CertStatus::not_applicable_domain_restricted
                             : CertStatus::certified;
  else
    cert.status = CertStatus::violated;
  return cert;
}

MomentBound moment_bound(double q, double alpha2, double alpha3, double norm_x0,
                         double t) {
  if (t < 0.0) fail(ErrorCode::invalid_argument, "moment bound needs t >= 0");
  MomentBound mb;
  mb.r_q = r_q_constant(q, alpha2, alpha3);
  const double rate = q == 1.0 ? 2.0 * alpha2 : q * alpha2;
  mb.bound = std::pow(norm_x0, 2.0 * q) * std::exp(-rate * t) + mb.r_q;
  return mb;
}

RemainderBound remainder_bounds(const ModelSpec& model, const Vector& x_star,
                                double norm_x0, double p) {
  const auto rm = model.remainder();
  if (!rm)
    fail(ErrorCode::missing_remainder_meta,
         "model '" + model.name + "' carries no remainder metadata");

  std::optional<DissipativityMeta> meta = model.meta(p);
  double a2, a3;
  if (meta) {
    a2 = meta->alpha2;
    a3 = meta->alpha3;
  } else {
    const auto cert = check_dissipative(model, p);
    if (cert.status == CertStatus::violated)
      fail(ErrorCode::missing_inputs,
           "no certified dissipativity constants for remainder bounds");
    a2 = cert.alpha2;
    a3 = cert.alpha3;
  }

  // Constant chain, channel F (channel G is identical with c2, q2 and an
  // extra factor m from summing the columns of R_G):
  //   ||R_F(y)||^2 <= (c1^2/3) (1 + ||x*+tau y||^{q1})^2 ||y||^4
  //               <= (2 c1^2/3)(1 + s(1 + ||x*||^{2q1}) + s||y||^{2q1}) ||y||^4
  //      with s = max(1, 2^{2q1-1})
  //               <= K2 (1 + ||y||^{2q1+4}),  K2 = (2 c1^2/3)(1 + s(1 + ||x*||^{2q1}))
  //   E||Y||^{r} <= 2^{r-1}(E||X||^r + ||x*||^r), r = 2q1+4, and Lemma-style
  //   moment bounds give E||X||^{2(q1+2)} <= ||X0||^{2(q1+2)} + R_{q1+2}; so
  //   K_F = K2 * 2^{r-1} (1 + ||x*||^r) makes
  //   E||R_F||^2 <= K_F (1 + R_{q1+2} + ||X0||^{2(q1+2)}).
  const double xs = norm2(x_star);
  auto channel_constant = [&](double c, double q, double extra) {
    if (c == 0.0) return 0.0;
    const double s = std::max(1.0, std::pow(2.0, 2.0 * q - 1.0));
    const double k2 =
        (2.0 * c * c / 3.0) * (1.0 + s * (1.0 + std::pow(xs, 2.0 * q)));
    const double r = 2.0 * q + 4.0;
    return extra * k2 * std::pow(2.0, r - 1.0) * (1.0 + std::pow(xs, r));
  };

  RemainderBound rb;
  rb.q1 = rm->q1;
  rb.q2 = rm->q2;
  rb.k_f = channel_constant(rm->c1, rm->q1, 1.0);
  rb.k_g = channel_constant(rm->c2, rm->q2, static_cast<double>(model.m));
  rb.k_xstar = std::max(rb.k_f, rb.k_g);
  rb.r_q1p2 = r_q_constant(rm->q1 + 2.0, a2, a3);
  rb.r_q2p2 = r_q_constant(rm->q2 + 2.0, a2, a3);
  rb.bound_f =
      rb.k_f * (1.0 + rb.r_q1p2 + std::pow(norm_x0, 2.0 * (rm->q1 + 2.0)));
  rb.bound_g =
      rb.k_g * (1.0 + rb.r_q2p2 + std::pow(norm_x0, 2.0 * (rm->q2 + 2.0)));
  return rb;
}

}  // namespace msbif
