#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace msbif {

namespace {
constexpr double kOverflowLimit = 1e300;

double sign_with(double magnitude, double sign_source) {
  return sign_source >= 0.0 ? std::fabs(magnitude) : -std::fabs(magnitude);
}
}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  DenseMatrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c)
      fail(ErrorCode::invalid_argument, "ragged matrix initializer");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

bool DenseMatrix::all_finite() const noexcept {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorCode::invalid_argument, "matrix addition shape mismatch");
  DenseMatrix r(a.rows(), a.cols());
  const double* pa = a.data();
  const double* pb = b.data();
  double* pr = r.data();
  for (std::size_t k = 0; k < a.rows() * a.cols(); ++k) pr[k] = pa[k] + pb[k];
  return r;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorCode::invalid_argument, "matrix subtraction shape mismatch");
  DenseMatrix r(a.rows(), a.cols());
  const double* pa = a.data();
  const double* pb = b.data();
  double* pr = r.data();
  for (std::size_t k = 0; k < a.rows() * a.cols(); ++k) pr[k] = pa[k] - pb[k];
  return r;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
  DenseMatrix r(a.rows(), a.cols());
  const double* pa = a.data();
  double* pr = r.data();
  for (std::size_t k = 0; k < a.rows() * a.cols(); ++k) pr[k] = s * pa[k];
  return r;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    fail(ErrorCode::invalid_argument, "matrix product shape mismatch");
  DenseMatrix r(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    double* rj = r.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      if (bkj == 0.0) continue;
      const double* ak = a.col(k);
      for (std::size_t i = 0; i < a.rows(); ++i) rj[i] += ak[i] * bkj;
    }
  }
  return r;
}

Vector operator*(const DenseMatrix& a, const Vector& x) {
  if (a.cols() != x.size())
    fail(ErrorCode::invalid_argument, "matrix-vector shape mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    const double* aj = a.col(j);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += aj[i] * xj;
  }
  return y;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix r(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) r(j, i) = a(i, j);
  return r;
}

double inf_norm(const DenseMatrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += std::fabs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

double fro_norm(const DenseMatrix& a) {
  double s = 0.0;
  const double* p = a.data();
  for (std::size_t k = 0; k < a.rows() * a.cols(); ++k) s += p[k] * p[k];
  return std::sqrt(s);
}

double norm2(const Vector& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

Vector vec(const DenseMatrix& m) {
  if (m.empty()) fail(ErrorCode::invalid_argument, "vec of empty matrix");
  return Vector(m.data(), m.data() + m.rows() * m.cols());
}

DenseMatrix unvec(const Vector& v, std::size_t rows, std::size_t cols) {
  if (v.size() != rows * cols)
    fail(ErrorCode::invalid_argument, "unvec size mismatch");
  DenseMatrix m(rows, cols);
  std::copy(v.begin(), v.end(), m.data());
  return m;
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.empty() || b.empty())
    fail(ErrorCode::invalid_argument, "kron of empty matrix");
  DenseMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ja = 0; ja < a.cols(); ++ja)
    for (std::size_t jb = 0; jb < b.cols(); ++jb) {
      double* rcol = r.col(ja * b.cols() + jb);
      for (std::size_t ia = 0; ia < a.rows(); ++ia) {
        const double aij = a(ia, ja);
        if (aij == 0.0) continue;
        const double* bcol = b.col(jb);
        double* dst = rcol + ia * b.rows();
        for (std::size_t ib = 0; ib < b.rows(); ++ib) dst[ib] = aij * bcol[ib];
      }
    }
  return r;
}

SymmetricIndexMap::SymmetricIndexMap(std::size_t d)
    : dim(d), full_size(d * d), reduced_size(d * (d + 1) / 2) {
  forward.assign(full_size, 0);
  representative.reserve(reduced_size);
  std::size_t s = 0;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = j; i < d; ++i) {
      representative.emplace_back(i, j);
      forward[j * d + i] = s;
      forward[i * d + j] = s;
      ++s;
    }
}

std::pair<DenseMatrix, Vector> reduce_moment_system(const DenseMatrix& big_a,
                                                    const Vector& s,
                                                    const SymmetricIndexMap& map) {
  const std::size_t d = map.dim;
  const std::size_t full_n = d * d + d;
  if (big_a.rows() != full_n || big_a.cols() != full_n || s.size() != full_n)
    fail(ErrorCode::invalid_argument, "moment system size mismatch");
  const std::size_t red_n = map.reduced_size + d;
  const double tol = 1e-12 * std::max(1.0, inf_norm(big_a));

  DenseMatrix reduced(red_n, red_n);
  Vector reduced_s(red_n, 0.0);

  auto merge_row = [&](std::size_t full_row, Vector& out) {
    out.assign(red_n, 0.0);
    for (std::size_t c = 0; c < d * d; ++c)
      out[map.forward[c]] += big_a(full_row, c);
    for (std::size_t k = 0; k < d; ++k)
      out[map.reduced_size + k] = big_a(full_row, d * d + k);
  };

  Vector row, twin;
  for (std::size_t slot = 0; slot < map.reduced_size; ++slot) {
    const auto [i, j] = map.representative[slot];
    const std::size_t rep_row = j * d + i;
    merge_row(rep_row, row);
    if (i != j) {
      const std::size_t twin_row = i * d + j;
      merge_row(twin_row, twin);
      for (std::size_t c = 0; c < red_n; ++c)
        if (std::fabs(row[c] - twin[c]) > tol)
          fail(ErrorCode::inconsistent_symmetry,
               "moment-system rows for a symmetric pair disagree");
      if (std::fabs(s[rep_row] - s[twin_row]) > tol)
        fail(ErrorCode::inconsistent_symmetry,
             "moment-system source for a symmetric pair disagrees");
    }
    for (std::size_t c = 0; c < red_n; ++c) reduced(slot, c) = row[c];
    reduced_s[slot] = s[rep_row];
  }
  for (std::size_t k = 0; k < d; ++k) {
    merge_row(d * d + k, row);
    for (std::size_t c = 0; c < red_n; ++c)
      reduced(map.reduced_size + k, c) = row[c];
    reduced_s[map.reduced_size + k] = s[d * d + k];
  }
  return {std::move(reduced), std::move(reduced_s)};
}

Vector expand_reduced(const Vector& reduced, const SymmetricIndexMap& map) {
  const std::size_t d = map.dim;
  if (reduced.size() != map.reduced_size + d)
    fail(ErrorCode::invalid_argument, "reduced vector size mismatch");
  Vector full(d * d + d, 0.0);
  for (std::size_t slot = 0; slot < map.reduced_size; ++slot) {
    const auto [i, j] = map.representative[slot];
    full[j * d + i] = reduced[slot];
    full[i * d + j] = reduced[slot];
  }
  for (std::size_t k = 0; k < d; ++k)
    full[d * d + k] = reduced[map.reduced_size + k];
  return full;
}

namespace {

// Scaling-only balancing (radix 2); similarity, so eigenvalues are unchanged.
void balance(DenseMatrix& h) {
  const std::size_t n = h.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::fabs(h(j, i));
        r += std::fabs(h(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double sum = c + r;
      double g = r / 2.0;
      while (c < g) {
        f *= 2.0;
        c *= 4.0;
      }
      g = r * 2.0;
      while (c > g) {
        f /= 2.0;
        c /= 4.0;
      }
      if ((c + r) / f < 0.95 * sum) {
        done = false;
        const double inv = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) h(i, j) *= inv;
        for (std::size_t j = 0; j < n; ++j) h(j, i) *= f;
      }
    }
  }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transformations; entries below the first subdiagonal are zeroed.
void hessenberg(DenseMatrix& h) {
  const std::size_t n = h.rows();
  if (n < 3) return;
  for (std::size_t m = 1; m + 1 < n; ++m) {
    std::size_t pivot = m;
    double x = 0.0;
    for (std::size_t i = m; i < n; ++i) {
      if (std::fabs(h(i, m - 1)) > std::fabs(x)) {
        x = h(i, m - 1);
        pivot = i;
      }
    }
    if (pivot != m) {
      for (std::size_t j = 0; j < n; ++j) std::swap(h(pivot, j), h(m, j));
      for (std::size_t i = 0; i < n; ++i) std::swap(h(i, pivot), h(i, m));
    }
    if (x == 0.0) continue;
    for (std::size_t i = m + 1; i < n; ++i) {
      double y = h(i, m - 1);
      if (y == 0.0) continue;
      y /= x;
      h(i, m - 1) = 0.0;
      for (std::size_t j = m; j < n; ++j) h(i, j) -= y * h(m, j);
      double* cm = h.col(m);
      const double* ci = h.col(i);
      for (std::size_t j = 0; j < n; ++j) cm[j] += y * ci[j];
    }
  }
}

// Francis double-shift QR on an upper Hessenberg matrix, eigenvalues only.
void hqr(DenseMatrix& h, std::vector<std::complex<double>>& eigs) {
  const std::size_t n = h.rows();
  eigs.assign(n, {0.0, 0.0});
  if (n == 0) return;

  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = (i == 0 ? 0 : i - 1); j < n; ++j)
      norm += std::fabs(h(i, j));
  if (norm == 0.0) return;  // zero matrix

  long en = static_cast<long>(n) - 1;
  double t = 0.0;
  long budget = 100 * static_cast<long>(n);  // total sweep budget

  while (en >= 0) {
    long its = 0;
    for (;;) {
      // Look for a single small subdiagonal element.
      long l = en;
      while (l > 0) {
        double s = std::fabs(h(l - 1, l - 1)) + std::fabs(h(l, l));
        if (s == 0.0) s = norm;
        if (s + std::fabs(h(l, l - 1)) == s) break;
        --l;
      }
      double x = h(en, en);
      if (l == en) {  // one root found
        eigs[en] = {x + t, 0.0};
        --en;
        break;
      }
      double y = h(en - 1, en - 1);
      double w = h(en, en - 1) * h(en - 1, en);
      if (l == en - 1) {  // two roots found
        double p = (y - x) / 2.0;
        double q = p * p + w;
        double zz = std::sqrt(std::fabs(q));
        x += t;
        if (q >= 0.0) {
          zz = p + sign_with(zz, p);
          double wr1 = x + zz;
          double wr2 = (zz != 0.0) ? x - w / zz : wr1;
          eigs[en - 1] = {wr1, 0.0};
          eigs[en] = {wr2, 0.0};
        } else {
          eigs[en - 1] = {x + p, zz};
          eigs[en] = {x + p, -zz};
        }
        en -= 2;
        break;
      }
      if (budget <= 0)
        fail(ErrorCode::no_convergence, "QR iteration exceeded sweep budget");
      if (its == 10 || its == 20) {
        // Exceptional shift.
        t += x;
        for (long i = 0; i <= en; ++i) h(i, i) -= x;
        double s = std::fabs(h(en, en - 1)) + std::fabs(h(en - 1, en - 2));
        x = 0.75 * s;
        y = x;
        w = -0.4375 * s * s;
      }
      ++its;
      --budget;

      // Look for two consecutive small subdiagonal elements.
      long m = en - 2;
      double p = 0.0, q = 0.0, r = 0.0;
      while (m >= l) {
        const double zz = h(m, m);
        const double rr = x - zz;
        const double ss = y - zz;
        p = (rr * ss - w) / h(m + 1, m) + h(m, m + 1);
        q = h(m + 1, m + 1) - zz - rr - ss;
        r = h(m + 2, m + 1);
        const double scale = std::fabs(p) + std::fabs(q) + std::fabs(r);
        p /= scale;
        q /= scale;
        r /= scale;
        if (m == l) break;
        const double tst1 = std::fabs(p) * (std::fabs(h(m - 1, m - 1)) +
                                            std::fabs(zz) +
                                            std::fabs(h(m + 1, m + 1)));
        if (tst1 + std::fabs(h(m, m - 1)) * (std::fabs(q) + std::fabs(r)) ==
            tst1)
          break;
        --m;
      }
      for (long i = m + 2; i <= en; ++i) {
        h(i, i - 2) = 0.0;
        if (i > m + 2) h(i, i - 3) = 0.0;
      }

      // Double QR step on rows l..en, columns m..en.
      for (long k = m; k <= en - 1; ++k) {
        const bool notlast = (k != en - 1);
        double zz = 0.0;
        double xx = 0.0;
        if (k != m) {
          p = h(k, k - 1);
          q = h(k + 1, k - 1);
          r = notlast ? h(k + 2, k - 1) : 0.0;
          xx = std::fabs(p) + std::fabs(q) + std::fabs(r);
          if (xx == 0.0) continue;
          p /= xx;
          q /= xx;
          r /= xx;
        }
        double s = sign_with(std::sqrt(p * p + q * q + r * r), p);
        if (k != m) {
          h(k, k - 1) = -s * xx;
        } else if (l != m) {
          h(k, k - 1) = -h(k, k - 1);
        }
        p += s;
        const double fx = p / s;
        const double fy = q / s;
        zz = r / s;
        q /= p;
        r /= p;
        if (!notlast) {
          for (long j = k; j <= en; ++j) {  // row modification
            const double pp = h(k, j) + q * h(k + 1, j);
            h(k, j) -= pp * fx;
            h(k + 1, j) -= pp * fy;
          }
          const long imax = std::min(en, k + 3);
          for (long i = l; i <= imax; ++i) {  // column modification
            const double pp = fx * h(i, k) + fy * h(i, k + 1);
            h(i, k) -= pp;
            h(i, k + 1) -= pp * q;
          }
        } else {
          for (long j = k; j <= en; ++j) {
            const double pp = h(k, j) + q * h(k + 1, j) + r * h(k + 2, j);
            h(k, j) -= pp * fx;
            h(k + 1, j) -= pp * fy;
            h(k + 2, j) -= pp * zz;
          }
          const long imax = std::min(en, k + 3);
          for (long i = l; i <= imax; ++i) {
            const double pp = fx * h(i, k) + fy * h(i, k + 1) + zz * h(i, k + 2);
            h(i, k) -= pp;
            h(i, k + 1) -= pp * q;
            h(i, k + 2) -= pp * r;
          }
        }
      }
    }
  }
}

}  // namespace

std::vector<std::complex<double>> spectrum(const DenseMatrix& a) {
  if (a.rows() != a.cols())
    fail(ErrorCode::invalid_argument, "spectrum of a non-square matrix");
  if (!a.all_finite())
    fail(ErrorCode::invalid_argument, "spectrum of a non-finite matrix");
  const std::size_t n = a.rows();
  std::vector<std::complex<double>> eigs;
  if (n == 0) return eigs;
  if (n == 1) {
    eigs.emplace_back(a(0, 0), 0.0);
    return eigs;
  }
  DenseMatrix h = a;
  balance(h);
  hessenberg(h);
  hqr(h, eigs);
  return eigs;
}

double max_real_part(const std::vector<std::complex<double>>& eigs) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& e : eigs) best = std::max(best, e.real());
  return best;
}

LuFactorization::LuFactorization(DenseMatrix a) : lu_(std::move(a)) {
  if (lu_.rows() != lu_.cols())
    fail(ErrorCode::invalid_argument, "LU of a non-square matrix");
  const std::size_t n = lu_.rows();
  pivots_.resize(n);
  const double tiny =
      inf_norm(lu_) * static_cast<double>(n) *
      std::numeric_limits<double>::epsilon();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::fabs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::fabs(lu_(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    pivots_[k] = piv;
    if (piv != k) {
      pivot_sign_ = -pivot_sign_;
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
    }
    if (best <= tiny)
      fail(ErrorCode::singular_matrix, "rank-deficient matrix in LU solve");
    const double inv_pivot = 1.0 / lu_(k, k);
    double* ck = lu_.col(k);
    for (std::size_t i = k + 1; i < n; ++i) ck[i] *= inv_pivot;
    for (std::size_t j = k + 1; j < n; ++j) {
      const double akj = lu_(k, j);
      if (akj == 0.0) continue;
      double* cj = lu_.col(j);
      for (std::size_t i = k + 1; i < n; ++i) cj[i] -= ck[i] * akj;
    }
  }
}

Vector LuFactorization::solve(Vector b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n)
    fail(ErrorCode::invalid_argument, "LU solve size mismatch");
  for (std::size_t k = 0; k < n; ++k)
    if (pivots_[k] != k) std::swap(b[k], b[pivots_[k]]);
  for (std::size_t j = 0; j < n; ++j) {  // forward substitution, unit lower
    const double bj = b[j];
    if (bj == 0.0) continue;
    const double* cj = lu_.col(j);
    for (std::size_t i = j + 1; i < n; ++i) b[i] -= cj[i] * bj;
  }
  for (std::size_t jj = n; jj-- > 0;) {  // back substitution
    b[jj] /= lu_(jj, jj);
    const double bj = b[jj];
    if (bj == 0.0) continue;
    const double* cj = lu_.col(jj);
    for (std::size_t i = 0; i < jj; ++i) b[i] -= cj[i] * bj;
  }
  return b;
}

double LuFactorization::determinant() const {
  double det = pivot_sign_;
  for (std::size_t i = 0; i < lu_.rows(); ++i) det *= lu_(i, i);
  return det;
}

Vector solve_linear(const DenseMatrix& a, const Vector& b) {
  return LuFactorization(a).solve(b);
}

double determinant(const DenseMatrix& a) {
  try {
    return LuFactorization(a).determinant();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::singular_matrix) return 0.0;
    throw;
  }
}

PropagationResult propagate_moments(const DenseMatrix& big_a, const Vector& s,
                                    const Vector& q0, double t_final,
                                    std::size_t steps, std::size_t n_samples) {
  const std::size_t n = q0.size();
  if (big_a.rows() != n || big_a.cols() != n || s.size() != n)
    fail(ErrorCode::invalid_argument, "propagate_moments size mismatch");
  if (t_final < 0.0 || steps < 1)
    fail(ErrorCode::invalid_argument, "propagate_moments needs T >= 0, steps >= 1");

  PropagationResult result;
  Vector q = q0;
  const double h = t_final / static_cast<double>(steps);
  Vector k1(n), k2(n), k3(n), k4(n), tmp(n);

  auto deriv = [&](const Vector& state, Vector& out) {
    out = big_a * state;
    for (std::size_t i = 0; i < n; ++i) out[i] += s[i];
  };

  const std::size_t sample_stride =
      n_samples > 0 ? std::max<std::size_t>(1, steps / n_samples) : 0;
  if (n_samples > 0) {
    result.times.push_back(0.0);
    result.trajectory.push_back(q);
  }

  for (std::size_t step = 0; step < steps; ++step) {
    deriv(q, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = q[i] + 0.5 * h * k1[i];
    deriv(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = q[i] + 0.5 * h * k2[i];
    deriv(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = q[i] + h * k3[i];
    deriv(tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      q[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    for (double v : q) {
      if (!std::isfinite(v) || std::fabs(v) > kOverflowLimit) {
        result.overflow = true;
        break;
      }
    }
    if (result.overflow) break;
    if (sample_stride > 0 && (step + 1) % sample_stride == 0) {
      result.times.push_back(h * static_cast<double>(step + 1));
      result.trajectory.push_back(q);
    }
  }
  result.state = std::move(q);
  return result;
}

std::size_t default_propagation_steps(double t_final, const DenseMatrix& big_a) {
  const double suggested = 10.0 * t_final * (1.0 + inf_norm(big_a));
  if (!(suggested >= 1.0)) return 1;
  return static_cast<std::size_t>(std::ceil(suggested));
}

}  // namespace msbif
