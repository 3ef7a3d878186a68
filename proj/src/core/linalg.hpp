#pragma once

// Dense real matrices (column-major) plus the factorizations the moment
// analysis is built from: vec/kron, symmetric-index reduction of the
// second-moment block, LU solves, nonsymmetric spectra, and fixed-step
// propagation of the linear moment ODE.

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace msbif {

using Vector = std::vector<double>;

class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);
  // Row-wise initializer for literals in code and tests.
  static DenseMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[j * rows_ + i];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[j * rows_ + i];
  }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  // Column-major contiguous storage; col(j) points at rows_ entries.
  double* col(std::size_t j) noexcept { return data_.data() + j * rows_; }
  const double* col(std::size_t j) const noexcept {
    return data_.data() + j * rows_;
  }

  bool all_finite() const noexcept;

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
Vector operator*(const DenseMatrix& a, const Vector& x);
DenseMatrix transpose(const DenseMatrix& a);

double inf_norm(const DenseMatrix& a);   // max absolute row sum
double fro_norm(const DenseMatrix& a);
double norm2(const Vector& x);

// Column-stacking vectorization: result[j*rows + i] = M(i, j).
Vector vec(const DenseMatrix& m);
DenseMatrix unvec(const Vector& v, std::size_t rows, std::size_t cols);

// Block (i,j) of the result equals a(i,j) * B.
DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);

// Index bookkeeping between the full d^2 second-moment vector and its
// d(d+1)/2 symmetry-reduced form. Reduced slots are ordered column-major
// over the lower triangle: (0,0), (1,0), ..., (d-1,0), (1,1), ...
struct SymmetricIndexMap {
  std::size_t dim = 0;
  std::size_t full_size = 0;     // d^2
  std::size_t reduced_size = 0;  // d(d+1)/2
  std::vector<std::size_t> forward;  // full index -> reduced slot
  std::vector<std::pair<std::size_t, std::size_t>> representative;  // slot -> (row, col), row >= col

  SymmetricIndexMap() = default;
  explicit SymmetricIndexMap(std::size_t d);

  std::size_t slot(std::size_t i, std::size_t j) const {
    return forward[j * dim + i];
  }
};

// Collapses the (d^2+d)-dimensional moment system to d(d+1)/2 + d unknowns by
// merging the (i,j)/(j,i) columns and keeping representative rows. Throws
// inconsistent_symmetry if a dropped row disagrees with its representative
// beyond 1e-12 (scaled by the matrix magnitude) after column merging.
std::pair<DenseMatrix, Vector> reduce_moment_system(const DenseMatrix& big_a,
                                                    const Vector& s,
                                                    const SymmetricIndexMap& map);

// Expands a reduced-system vector back to full (d^2 + d) indexing.
Vector expand_reduced(const Vector& reduced, const SymmetricIndexMap& map);

// Eigenvalues of a square matrix: balance, reduce to upper Hessenberg form by
// stabilized elementary similarity transformations, then Francis double-shift
// QR with deflation. Sweep budget 100*n; throws no_convergence past it.
std::vector<std::complex<double>> spectrum(const DenseMatrix& a);

double max_real_part(const std::vector<std::complex<double>>& eigs);

// LU factorization with partial pivoting, reused for multiple solves.
class LuFactorization {
public:
  explicit LuFactorization(DenseMatrix a);
  Vector solve(Vector b) const;
  double determinant() const;

private:
  DenseMatrix lu_;
  std::vector<std::size_t> pivots_;
  int pivot_sign_ = 1;
};

// Throws singular_matrix on rank deficiency (which signals a lambda_max = 0
// degeneracy to moment-system callers).
Vector solve_linear(const DenseMatrix& a, const Vector& b);
double determinant(const DenseMatrix& a);

struct PropagationResult {
  Vector state;            // Q(T), or the state at truncation on overflow
  bool overflow = false;   // some component exceeded 1e300; integration stopped
  std::vector<double> times;          // sampled trajectory (when requested)
  std::vector<Vector> trajectory;
};

// Fixed-step classical 4th-order integration of Q' = A Q + S from Q(0) = q0.
// n_samples > 0 records that many evenly spaced trajectory points (plus t=0).
PropagationResult propagate_moments(const DenseMatrix& big_a, const Vector& s,
                                    const Vector& q0, double t_final,
                                    std::size_t steps,
                                    std::size_t n_samples = 0);

// Default step count 10*T*(1 + ||A||_inf), at least 1.
std::size_t default_propagation_steps(double t_final, const DenseMatrix& big_a);

}  // namespace msbif
