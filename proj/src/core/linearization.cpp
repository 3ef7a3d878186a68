#include "linearization.hpp"

#include <cmath>

#include "dissipativity.hpp"

namespace msbif {

Linearization linearize(const ModelSpec& model, const Vector& x_star) {
  if (!check_equilibrium(model, x_star, 1e-8))
    fail(ErrorCode::invalid_argument,
         "linearize called at a point that is not an equilibrium");
  Linearization lin;
  lin.x_star = x_star;
  lin.A = jacobian(model, x_star, JacobianTarget::drift);
  const DenseMatrix g = model.G(x_star);
  lin.B.reserve(model.m);
  lin.Gamma.reserve(model.m);
  for (std::size_t i = 0; i < model.m; ++i) {
    lin.B.push_back(
        jacobian(model, x_star, JacobianTarget::diffusion_column, i));
    Vector gi(model.d);
    for (std::size_t r = 0; r < model.d; ++r) gi[r] = g(r, i);
    lin.Gamma.push_back(std::move(gi));
  }
  return lin;
}

MomentSystem build_moment_system(const Linearization& lin) {
  const std::size_t d = lin.d();
  const std::size_t m = lin.m();
  const std::size_t n = d * d + d;
  const DenseMatrix eye = DenseMatrix::identity(d);

  MomentSystem ms;
  ms.d = d;
  ms.big_a = DenseMatrix(n, n);
  ms.s = Vector(n, 0.0);

  // Upper-left block: (I (x) A) + (A (x) I) + sum_i B_i (x) B_i.
  DenseMatrix ul = kron(eye, lin.A) + kron(lin.A, eye);
  for (std::size_t i = 0; i < m; ++i)
    ul = ul + kron(lin.B[i], lin.B[i]);
  for (std::size_t c = 0; c < d * d; ++c)
    for (std::size_t r = 0; r < d * d; ++r) ms.big_a(r, c) = ul(r, c);

  // Upper-right block: sum_i (Gamma_i (x) B_i) + (B_i (x) Gamma_i); the
  // (I (x) Lambda) + (Lambda (x) I) terms vanish since Lambda = 0.
  for (std::size_t i = 0; i < m; ++i) {
    const DenseMatrix gi = unvec(lin.Gamma[i], d, 1);
    const DenseMatrix bt = kron(gi, lin.B[i]) + kron(lin.B[i], gi);
    for (std::size_t c = 0; c < d; ++c)
      for (std::size_t r = 0; r < d * d; ++r)
        ms.big_a(r, d * d + c) += bt(r, c);
  }

  // Lower-right block: A. Lower-left stays zero.
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t r = 0; r < d; ++r)
      ms.big_a(d * d + r, d * d + c) = lin.A(r, c);

  // Source: sum_i (Gamma_i (x) I) Gamma_i stacked over the zero mean block.
  for (std::size_t i = 0; i < m; ++i) {
    const Vector ci = kron(unvec(lin.Gamma[i], d, 1), eye) * lin.Gamma[i];
    for (std::size_t r = 0; r < d * d; ++r) ms.s[r] += ci[r];
  }

  ms.map = SymmetricIndexMap(d);
  auto [ra, rs] = reduce_moment_system(ms.big_a, ms.s, ms.map);
  ms.reduced_a = std::move(ra);
  ms.reduced_s = std::move(rs);
  return ms;
}

double lambda_max_ms(const MomentSystem& ms) {
  const std::size_t r = ms.map.reduced_size;
  const std::size_t d = ms.d;
  DenseMatrix moment_block(r, r);
  for (std::size_t c = 0; c < r; ++c)
    for (std::size_t i = 0; i < r; ++i) moment_block(i, c) = ms.reduced_a(i, c);
  DenseMatrix mean_block(d, d);
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t i = 0; i < d; ++i)
      mean_block(i, c) = ms.reduced_a(r + i, r + c);
  return std::max(max_real_part(spectrum(moment_block)),
                  max_real_part(spectrum(mean_block)));
}

StationaryMoments stationary_moments(const MomentSystem& ms) {
  const double lmax = lambda_max_ms(ms);
  if (!(lmax < 0.0) || std::fabs(lmax) < 1e-10)
    fail(ErrorCode::not_mean_square_stable,
         "stationary moments need lambda_max(A) strictly negative");
  Vector rhs = ms.reduced_s;
  for (double& v : rhs) v = -v;
  Vector q_red = solve_linear(ms.reduced_a, rhs);
  StationaryMoments out;
  out.q_infinity = expand_reduced(q_red, ms.map);
  double trace = 0.0;
  for (std::size_t i = 0; i < ms.d; ++i)
    trace += out.q_infinity[i * ms.d + i];
  out.beta_sq = trace;
  return out;
}

double dg_tensor_norm_sq(const Linearization& lin) {
  double s = 0.0;
  for (const DenseMatrix& b : lin.B) {
    const double f = fro_norm(b);
    s += f * f;
  }
  return s;
}

double compute_mu(const ModelSpec& model, const Vector& x_star, double delta1,
                  double delta2, bool* nonnormality_warning) {
  if (!(delta1 > 0.0) || !(delta2 > 0.0))
    fail(ErrorCode::invalid_argument, "mu needs delta1, delta2 > 0");
  const Linearization lin = linearize(model, x_star);
  const double lmax = max_real_part(spectrum(lin.A));
  if (nonnormality_warning) {
    const double asym = fro_norm(lin.A - transpose(lin.A));
    *nonnormality_warning = asym > 1e-8 * fro_norm(lin.A);
  }
  return 2.0 * lmax + delta1 + (1.0 + delta2) * dg_tensor_norm_sq(lin);
}

TailBound markov_tail_dissipative(double q, double alpha2, double alpha3,
                                  double norm_x0, double epsilon,
                                  std::optional<double> rho) {
  if (!(q >= 1.0) || !(alpha2 > 0.0) || alpha3 < 0.0)
    fail(ErrorCode::missing_inputs, "dissipative tail needs q >= 1, a2 > 0, a3 >= 0");
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    fail(ErrorCode::missing_inputs, "epsilon must lie in (0,1)");
  const double mass = r_q_constant(q, alpha2, alpha3) +
                      std::pow(norm_x0, 2.0 * q);
  TailBound tb;
  tb.epsilon = epsilon;
  if (rho) {
    if (!(*rho > 0.0)) fail(ErrorCode::missing_inputs, "rho must be positive");
    tb.rho = *rho;
    tb.bound_value = mass / *rho;
  } else {
    tb.rho = mass / epsilon;
    tb.bound_value = epsilon;
  }
  return tb;
}

TailBound markov_tail_stationary(double beta_sq, double delta, double epsilon,
                                 double rho) {
  if (!(rho > 0.0) || !(delta > 0.0) || !(epsilon > 0.0) || !(epsilon < 1.0))
    fail(ErrorCode::missing_inputs,
         "stationary tail needs rho > 0, delta > 0, epsilon in (0,1)");
  if (beta_sq < 0.0)
    fail(ErrorCode::missing_inputs, "beta^2 must be nonnegative");
  TailBound tb;
  tb.rho = rho;
  tb.epsilon = epsilon;
  tb.delta = delta;
  tb.bound_value = (2.0 * beta_sq + delta) / rho + 2.0 * epsilon / rho;
  return tb;
}

StabilityReport analyze_equilibrium(const ModelSpec& model,
                                    const Vector& x_star, double delta1,
                                    double delta2) {
  StabilityReport rep;
  rep.delta1 = delta1;
  rep.delta2 = delta2;
  const Linearization lin = linearize(model, x_star);
  const MomentSystem ms = build_moment_system(lin);
  rep.lambda_max_A = lambda_max_ms(ms);
  rep.linear_ms_stable = rep.lambda_max_A < 0.0;
  rep.dg_tensor_norm_sq = dg_tensor_norm_sq(lin);
  rep.mu = compute_mu(model, x_star, delta1, delta2, &rep.nonnormality_warning);
  rep.nonlinear_ms_stable = rep.linear_ms_stable && rep.mu < 0.0;
  if (rep.linear_ms_stable) {
    try {
      rep.beta_sq = stationary_moments(ms).beta_sq;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::not_mean_square_stable &&
          e.code() != ErrorCode::singular_matrix)
        throw;
      // boundary degeneracy: leave beta_sq absent
    }
  }
  return rep;
}

}  // namespace msbif
