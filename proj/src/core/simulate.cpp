#include "simulate.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "rng.hpp"
#include "threads.hpp"

namespace msbif {

namespace {

constexpr double kDivergenceRadius = 1e6;

std::size_t step_count(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0) || cfg.t_final < cfg.dt || cfg.n_paths < 1)
    fail(ErrorCode::invalid_argument,
         "simulation needs dt > 0, T >= dt, n_paths >= 1");
  const double raw = cfg.t_final / cfg.dt;
  std::size_t n = static_cast<std::size_t>(std::llround(raw));
  if (std::fabs(raw - static_cast<double>(n)) > 1e-9 * raw || n == 0)
    n = static_cast<std::size_t>(std::ceil(raw));
  return n;
}

std::vector<std::size_t> record_steps(std::size_t n_steps, std::size_t stride) {
  std::vector<std::size_t> recs;
  if (stride == 0) stride = 1;
  for (std::size_t k = 0; k <= n_steps; k += stride) recs.push_back(k);
  if (recs.back() != n_steps) recs.push_back(n_steps);
  return recs;
}

Vector sample_initial(const SimConfig& cfg, const PathNoise& noise) {
  Vector x = cfg.x0;
  if (cfg.radius <= 0.0) return x;
  const std::size_t d = x.size();
  Vector dir(d);
  double nrm = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    dir[i] = noise.normal(PathNoise::kInitStep, static_cast<std::uint32_t>(i));
    nrm += dir[i] * dir[i];
  }
  nrm = std::sqrt(nrm);
  if (nrm == 0.0) {
    dir[0] = 1.0;
    nrm = 1.0;
  }
  const double u =
      noise.uniform(PathNoise::kInitStep, static_cast<std::uint32_t>(d));
  const double r = cfg.radius * std::pow(u, 1.0 / static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i) x[i] += r * dir[i] / nrm;
  return x;
}

// Shared stepping core. `advance(x, dw, x_new)` performs one step from the
// pre-update state x with scaled increments dw.
template <typename AdvanceFn>
PathEnsemble run_paths(std::size_t d, std::size_t m, const SimConfig& cfg,
                       AdvanceFn&& advance) {
  const std::size_t n_steps = step_count(cfg);
  if (cfg.x0.size() != d)
    fail(ErrorCode::invalid_argument, "initial point has wrong dimension");

  PathEnsemble ens;
  ens.master_seed = cfg.seed;
  ens.d = d;
  const std::vector<std::size_t> recs = record_steps(n_steps, cfg.output_stride);
  ens.times.reserve(recs.size());
  for (std::size_t k : recs) ens.times.push_back(cfg.dt * static_cast<double>(k));
  ens.states.assign(cfg.n_paths, {});
  ens.valid_records.assign(cfg.n_paths, 0);
  ens.diverged.assign(cfg.n_paths, false);

  const double sqrt_dt = std::sqrt(cfg.dt);
  parallel_for(cfg.n_paths, [&](std::size_t p) {
    PathNoise noise(cfg.seed, p);
    Vector x = sample_initial(cfg, noise);
    Vector x_new(d), dw(m);
    auto& recorded = ens.states[p];
    recorded.reserve(recs.size());
    std::size_t next_rec = 0;
    bool dead = false;
    for (std::size_t step = 0; step <= n_steps; ++step) {
      if (next_rec < recs.size() && recs[next_rec] == step) {
        recorded.push_back(x);
        ++next_rec;
      }
      if (step == n_steps) break;
      noise.normals(static_cast<std::uint32_t>(step), dw.data(), m);
      for (double& w : dw) w *= sqrt_dt;
      advance(x, dw, x_new);
      std::swap(x, x_new);
      double nrm = 0.0;
      for (double v : x) nrm += v * v;
      if (!std::isfinite(nrm) || nrm > kDivergenceRadius * kDivergenceRadius) {
        dead = true;
        break;
      }
    }
    ens.diverged[p] = dead;
    ens.valid_records[p] = recorded.size();
  });
  return ens;
}

}  // namespace

PathEnsemble tamed_em(const ModelSpec& model, const SimConfig& cfg) {
  const std::size_t d = model.d, m = model.m;
  const double dt = cfg.dt;
  const bool tame = cfg.taming;
  return run_paths(d, m, cfg, [&](const Vector& x, const Vector& dw,
                                  Vector& x_new) {
    const Vector f = model.F(x);
    const DenseMatrix g = model.G(x);
    double factor = dt;
    if (tame) factor /= 1.0 + dt * norm2(f);
    for (std::size_t i = 0; i < d; ++i) x_new[i] = x[i] + factor * f[i];
    for (std::size_t j = 0; j < m; ++j) {
      const double wj = dw[j];
      if (wj == 0.0) continue;
      for (std::size_t i = 0; i < d; ++i) x_new[i] += g(i, j) * wj;
    }
  });
}

PathEnsemble simulate_linearization(const Linearization& lin,
                                    const SimConfig& cfg) {
  const std::size_t d = lin.d(), m = lin.m();
  const double dt = cfg.dt;
  return run_paths(d, m, cfg, [&](const Vector& x, const Vector& dw,
                                  Vector& x_new) {
    const Vector f = lin.A * x;
    for (std::size_t i = 0; i < d; ++i) x_new[i] = x[i] + dt * f[i];
    for (std::size_t j = 0; j < m; ++j) {
      const Vector bx = lin.B[j] * x;
      for (std::size_t i = 0; i < d; ++i)
        x_new[i] += (bx[i] + lin.Gamma[j][i]) * dw[j];
    }
  });
}

MomentEstimate mc_moments(const PathEnsemble& ens, bool with_matrix) {
  std::size_t usable = 0;
  for (std::size_t p = 0; p < ens.states.size(); ++p)
    if (!ens.diverged[p]) ++usable;
  if (usable < 2)
    fail(ErrorCode::too_few_paths,
         "moment estimation needs at least 2 non-diverged paths");

  const std::size_t d = ens.d;
  const std::size_t n_times = ens.times.size();
  MomentEstimate est;
  est.times = ens.times;
  est.mean.assign(n_times, Vector(d, 0.0));
  est.second_moment_norm.assign(n_times, 0.0);
  est.second_moment_norm_se.assign(n_times, 0.0);
  if (with_matrix) {
    est.second_moment.assign(n_times, DenseMatrix(d, d));
    est.second_moment_se.assign(n_times, DenseMatrix(d, d));
  }

  Vector sq_sum(n_times, 0.0);
  std::vector<std::size_t> counts(n_times, 0);
  std::vector<DenseMatrix> mat_sq;
  if (with_matrix) mat_sq.assign(n_times, DenseMatrix(d, d));

  for (std::size_t p = 0; p < ens.states.size(); ++p) {
    if (ens.diverged[p]) continue;
    for (std::size_t t = 0; t < ens.valid_records[p]; ++t) {
      const Vector& x = ens.states[p][t];
      ++counts[t];
      double nn = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        est.mean[t][i] += x[i];
        nn += x[i] * x[i];
      }
      est.second_moment_norm[t] += nn;
      sq_sum[t] += nn * nn;
      if (with_matrix) {
        for (std::size_t j = 0; j < d; ++j)
          for (std::size_t i = 0; i < d; ++i) {
            const double v = x[i] * x[j];
            est.second_moment[t](i, j) += v;
            mat_sq[t](i, j) += v * v;
          }
      }
    }
  }
  for (std::size_t t = 0; t < n_times; ++t) {
    const double n = static_cast<double>(counts[t]);
    if (counts[t] < 2) continue;
    for (std::size_t i = 0; i < d; ++i) est.mean[t][i] /= n;
    const double mean_nn = est.second_moment_norm[t] / n;
    est.second_moment_norm[t] = mean_nn;
    const double var =
        std::max(0.0, (sq_sum[t] / n - mean_nn * mean_nn) * n / (n - 1.0));
    est.second_moment_norm_se[t] = std::sqrt(var / n);
    if (with_matrix) {
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < d; ++i) {
          const double mean_v = est.second_moment[t](i, j) / n;
          est.second_moment[t](i, j) = mean_v;
          const double v =
              std::max(0.0, (mat_sq[t](i, j) / n - mean_v * mean_v) * n /
                                (n - 1.0));
          est.second_moment_se[t](i, j) = std::sqrt(v / n);
        }
    }
  }
  return est;
}

void write_paths_csv(
    std::ostream& os, const PathEnsemble& ens,
    const std::vector<std::pair<std::string, std::string>>& metadata) {
  char buf[64];
  for (const auto& [key, value] : metadata)
    os << "# " << key << "=" << value << "\n";
  os << "t,path_id";
  for (std::size_t i = 1; i <= ens.d; ++i) os << ",x_" << i;
  os << "\n";
  for (std::size_t t = 0; t < ens.times.size(); ++t) {
    for (std::size_t p = 0; p < ens.states.size(); ++p) {
      if (t >= ens.valid_records[p]) continue;
      std::snprintf(buf, sizeof buf, "%.17g", ens.times[t]);
      os << buf << "," << p;
      for (std::size_t i = 0; i < ens.d; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", ens.states[p][t][i]);
        os << "," << buf;
      }
      os << "\n";
    }
  }
}

CoupledErrorSeries coupled_linearization_error(const ModelSpec& model,
                                               const Vector& x_star,
                                               const Vector& x0, double t_final,
                                               double dt, std::size_t n_paths,
                                               std::uint64_t seed,
                                               std::size_t n_records) {
  const Linearization lin = linearize(model, x_star);
  const std::size_t d = model.d, m = model.m;
  if (x0.size() != d)
    fail(ErrorCode::invalid_argument, "initial point has wrong dimension");
  if (!(dt > 0.0) || t_final < dt || n_paths < 2 || n_records < 2)
    fail(ErrorCode::invalid_argument, "bad coupled-error configuration");

  const std::size_t n_steps =
      static_cast<std::size_t>(std::llround(t_final / dt));
  std::vector<std::size_t> recs(n_records);
  for (std::size_t k = 0; k < n_records; ++k)
    recs[k] = (k * n_steps) / (n_records - 1);

  CoupledErrorSeries out;
  out.times.reserve(n_records);
  for (std::size_t k : recs) out.times.push_back(dt * static_cast<double>(k));

  // per-path squared errors at each record, reduced serially afterwards
  std::vector<Vector> z_sq(n_paths, Vector(n_records, 0.0));
  const double sqrt_dt = std::sqrt(dt);

  parallel_for(n_paths, [&](std::size_t p) {
    PathNoise noise(seed, p);
    Vector x = x0;            // nonlinear state
    Vector y_lin(d);          // linearized centered state
    for (std::size_t i = 0; i < d; ++i) y_lin[i] = x0[i] - x_star[i];
    Vector f(d), dw(m), gi(d);
    std::size_t next_rec = 0;
    for (std::size_t step = 0; step <= n_steps; ++step) {
      while (next_rec < n_records && recs[next_rec] == step) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          const double z = (x[i] - x_star[i]) - y_lin[i];
          s += z * z;
        }
        z_sq[p][next_rec] = s;
        ++next_rec;
      }
      if (step == n_steps) break;
      noise.normals(static_cast<std::uint32_t>(step), dw.data(), m);
      for (double& w : dw) w *= sqrt_dt;

      // nonlinear tamed step
      f = model.F(x);
      const DenseMatrix g = model.G(x);
      const double factor = dt / (1.0 + dt * norm2(f));
      Vector x_new = x;
      for (std::size_t i = 0; i < d; ++i) x_new[i] += factor * f[i];
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < d; ++i) x_new[i] += g(i, j) * dw[j];

      // linearized (affine noise) plain Euler step
      Vector y_new = y_lin;
      f = lin.A * y_lin;
      for (std::size_t i = 0; i < d; ++i) y_new[i] += dt * f[i];
      for (std::size_t j = 0; j < m; ++j) {
        gi = lin.B[j] * y_lin;
        for (std::size_t i = 0; i < d; ++i)
          y_new[i] += (gi[i] + lin.Gamma[j][i]) * dw[j];
      }
      x = std::move(x_new);
      y_lin = std::move(y_new);
    }
  });

  out.mean_sq_error.assign(n_records, 0.0);
  out.standard_error.assign(n_records, 0.0);
  const double n = static_cast<double>(n_paths);
  for (std::size_t k = 0; k < n_records; ++k) {
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
      sum += z_sq[p][k];
      sum_sq += z_sq[p][k] * z_sq[p][k];
    }
    const double mean = sum / n;
    out.mean_sq_error[k] = mean;
    const double var = std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0));
    out.standard_error[k] = std::sqrt(var / n);
  }
  return out;
}

}  // namespace msbif
