#pragma once

// Tamed Euler-Maruyama path simulation and Monte Carlo moment estimation.
// Paths are embarrassingly parallel; per-path noise streams are derived from
// (master_seed, path_index) by a counter-based generator, so ensembles are
// bit-identical regardless of the worker count.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>

#include "linearization.hpp"
#include "model.hpp"

namespace msbif {

struct SimConfig {
  double t_final = 100.0;
  double dt = 0.01;
  std::size_t n_paths = 5;
  std::uint64_t seed = 0;
  Vector x0;            // center of the initial ball
  double radius = 0.0;  // 0 starts every path exactly at x0
  std::size_t output_stride = 1;  // steps between recorded samples
  bool taming = true;
};

struct PathEnsemble {
  std::vector<double> times;                // recorded time grid
  std::vector<std::vector<Vector>> states;  // [path][record]
  std::vector<std::size_t> valid_records;   // records before divergence
  std::vector<bool> diverged;               // ||X|| exceeded 1e6
  std::uint64_t master_seed = 0;
  std::size_t d = 0;
};

// X_{n+1} = X_n + dt F(X_n)/(1 + dt ||F(X_n)||) + G(X_n) dW_n.
PathEnsemble tamed_em(const ModelSpec& model, const SimConfig& cfg);

// The affine linearized SDE dY = A Y dt + sum_i (B_i Y + Gamma_i) dW_i.
// The drift is linear, so taming is off.
PathEnsemble simulate_linearization(const Linearization& lin,
                                    const SimConfig& cfg);

struct MomentEstimate {
  std::vector<double> times;
  std::vector<Vector> mean;
  std::vector<double> second_moment_norm;     // estimates of E||X||^2
  std::vector<double> second_moment_norm_se;
  std::vector<DenseMatrix> second_moment;     // E[X X^T] when requested
  std::vector<DenseMatrix> second_moment_se;  // entrywise standard errors
};

// Unbiased sample means; standard error = sample std / sqrt(n). Diverged
// paths are excluded. Throws too_few_paths below two usable paths.
MomentEstimate mc_moments(const PathEnsemble& ens, bool with_matrix = false);

// paths.csv: "t,path_id,x_1,...,x_d"; floats at 17 significant digits;
// metadata pairs become "# key=value" comment lines before the header.
void write_paths_csv(
    std::ostream& os, const PathEnsemble& ens,
    const std::vector<std::pair<std::string, std::string>>& metadata = {});

}  // namespace msbif
