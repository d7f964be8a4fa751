#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace nipstab {

using cscalar = std::complex<double>;

/// Largest square matrix the dense determinant routines accept. Everything
/// in this library is desk-scale; the cap keeps brute-force oracles cheap.
inline constexpr std::size_t max_matrix_dim = 8;

class cvector {
public:
  explicit cvector(std::size_t dim) : coords_(dim) {
    if (dim == 0) throw dimension_error("cvector: dim must be >= 1");
  }

  cvector(std::initializer_list<cscalar> init) : coords_(init) {
    if (coords_.empty()) throw dimension_error("cvector: dim must be >= 1");
  }

  static cvector zero(std::size_t dim) { return cvector(dim); }

  static cvector unit(std::size_t dim, std::size_t k) {
    cvector v(dim);
    if (k >= dim) throw dimension_error("cvector::unit: index out of range");
    v[k] = 1.0;
    return v;
  }

  std::size_t dim() const { return coords_.size(); }

  cscalar& operator[](std::size_t i) { return coords_[i]; }
  const cscalar& operator[](std::size_t i) const { return coords_[i]; }

  std::span<const cscalar> coords() const { return coords_; }

  bool is_zero() const {
    for (const auto& c : coords_)
      if (c != cscalar{}) return false;
    return true;
  }

  bool is_finite() const {
    for (const auto& c : coords_)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
  }

  double norm() const {
    double s = 0.0;
    for (const auto& c : coords_) s += std::norm(c);
    return std::sqrt(s);
  }

  cvector& operator+=(const cvector& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += o[i];
    return *this;
  }

  cvector& operator-=(const cvector& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= o[i];
    return *this;
  }

  cvector& operator*=(cscalar a) {
    for (auto& c : coords_) c *= a;
    return *this;
  }

  friend cvector operator+(cvector a, const cvector& b) { return a += b; }
  friend cvector operator-(cvector a, const cvector& b) { return a -= b; }
  friend cvector operator*(cscalar a, cvector v) { return v *= a; }
  friend cvector operator*(cvector v, cscalar a) { return v *= a; }
  friend cvector operator-(cvector v) { return v *= cscalar(-1.0); }

private:
  void require_same_dim(const cvector& o) const {
    if (o.dim() != dim())
      throw dimension_error("cvector arithmetic: dimension mismatch");
  }

  std::vector<cscalar> coords_;
};

/// Base inner product on coordinate space: sum_i u_i * conj(v_i).
/// Conjugate-linear in the SECOND argument; every module inherits this
/// convention.
inline cscalar inner(const cvector& u, const cvector& v) {
  if (u.dim() != v.dim()) throw dimension_error("inner: dimension mismatch");
  cscalar s{};
  for (std::size_t i = 0; i < u.dim(); ++i) s += u[i] * std::conj(v[i]);
  return s;
}

class cmatrix {
public:
  cmatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {
    if (rows == 0 || cols == 0)
      throw shape_error("cmatrix: rows and cols must be positive");
  }

  static cmatrix identity(std::size_t n) {
    cmatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cscalar& operator()(std::size_t i, std::size_t j) {
    return entries_[i * cols_ + j];
  }
  const cscalar& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  std::span<const cscalar> entries() const { return entries_; }

  cvector apply(const cvector& x) const {
    if (x.dim() != cols_) throw dimension_error("cmatrix::apply: dimension mismatch");
    cvector y(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      cscalar s{};
      for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  friend cmatrix operator*(const cmatrix& a, const cmatrix& b) {
    if (a.cols_ != b.rows_) throw shape_error("cmatrix product: shape mismatch");
    cmatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        cscalar aik = a(i, k);
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

private:
  std::size_t rows_, cols_;
  std::vector<cscalar> entries_;
};

/// Determinant via LU with partial pivoting. Square matrices up to
/// max_matrix_dim only.
inline cscalar det(const cmatrix& m) {
  if (m.rows() != m.cols()) throw shape_error("det: matrix is not square");
  if (m.rows() > max_matrix_dim) throw shape_error("det: matrix exceeds size cap");
  const std::size_t n = m.rows();
  cmatrix a = m;
  cscalar d = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      double mag = std::abs(a(i, k));
      if (mag > best) {
        best = mag;
        piv = i;
      }
    }
    if (best == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      d = -d;
    }
    d *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      cscalar factor = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= factor * a(k, j);
    }
  }
  return d;
}

/// Diagonal pivots of the pivoted Cholesky factorization of the Gram matrix
/// of `vectors` (Hermitian positive semidefinite). Sorted nonincreasing by
/// construction of the pivoting. Negative roundoff pivots are clamped to 0.
inline std::vector<double> gram_pivots(std::span<const cvector> vectors) {
  const std::size_t m = vectors.size();
  std::vector<double> pivots;
  if (m == 0) return pivots;
  const std::size_t d = vectors[0].dim();
  for (const auto& v : vectors)
    if (v.dim() != d) throw dimension_error("gram_pivots: mixed dimensions");

  // Dense Gram matrix, then greedy diagonal pivoting.
  std::vector<cscalar> g(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) g[i * m + j] = inner(vectors[i], vectors[j]);
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;

  auto at = [&](std::size_t i, std::size_t j) -> cscalar& {
    return g[order[i] * m + order[j]];
  };

  for (std::size_t k = 0; k < m; ++k) {
    std::size_t piv = k;
    double best = at(k, k).real();
    for (std::size_t i = k + 1; i < m; ++i)
      if (at(i, i).real() > best) {
        best = at(i, i).real();
        piv = i;
      }
    std::swap(order[k], order[piv]);
    double dk = std::max(at(k, k).real(), 0.0);
    pivots.push_back(dk);
    if (dk == 0.0) continue;
    for (std::size_t i = k + 1; i < m; ++i)
      for (std::size_t j = k + 1; j < m; ++j)
        at(i, j) -= at(i, k) * at(k, j) / at(k, k);
  }
  return pivots;
}

/// Number of Gram pivots above tol * (largest pivot); 0 for the empty list.
inline int numeric_rank(std::span<const cvector> vectors, double tol) {
  if (tol <= 0.0) throw config_error("numeric_rank: tol must be positive");
  auto pivots = gram_pivots(vectors);
  if (pivots.empty()) return 0;
  double largest = pivots.front();
  if (largest <= 0.0) return 0;
  int rank = 0;
  for (double p : pivots)
    if (p > tol * largest) ++rank;
  return rank;
}

inline int numeric_rank(const std::vector<cvector>& vectors, double tol) {
  return numeric_rank(std::span<const cvector>(vectors), tol);
}

/// Condition estimate of the Gram matrix from pivot ratios: largest over
/// smallest positive pivot. Infinity when a pivot vanished.
inline double gram_condition_estimate(std::span<const cvector> vectors) {
  auto pivots = gram_pivots(vectors);
  if (pivots.empty()) return 1.0;
  double largest = pivots.front();
  double smallest = pivots.back();
  if (largest <= 0.0) return std::numeric_limits<double>::infinity();
  if (smallest <= 0.0) return std::numeric_limits<double>::infinity();
  return largest / smallest;
}

/// Random vector with coordinates from the complex disc of given radius.
inline cvector random_vector(rng& r, std::size_t dim, double radius = 1.0) {
  cvector v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = r.disc(radius);
  return v;
}

/// Random nonzero vector rescaled to a norm drawn uniformly from
/// [norm_lo, norm_hi].
inline cvector random_vector_with_norm(rng& r, std::size_t dim, double norm_lo,
                                       double norm_hi) {
  for (;;) {
    cvector v = random_vector(r, dim, 1.0);
    double n = v.norm();
    if (n < 1e-12) continue; // essentially never
    double target = r.uniform(norm_lo, norm_hi);
    return (target / n) * v;
  }
}

/// Columns of a seeded random matrix orthonormalized by modified
/// Gram-Schmidt; the result is an isometry (unitary when rows == cols).
/// Requires rows >= cols.
inline cmatrix random_isometry(rng& r, std::size_t rows, std::size_t cols) {
  if (rows < cols)
    throw config_error("random_isometry: need codomain dim >= domain dim");
  for (;;) {
    std::vector<cvector> basis;
    bool ok = true;
    for (std::size_t j = 0; j < cols && ok; ++j) {
      cvector v = random_vector(r, rows, 2.0);
      for (const auto& b : basis) v -= inner(v, b) * b;
      double n = v.norm();
      if (n < 1e-6) {
        ok = false;
        break;
      }
      basis.push_back((1.0 / n) * v);
    }
    if (!ok) continue;
    cmatrix m(rows, cols);
    for (std::size_t j = 0; j < cols; ++j)
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = basis[j][i];
    return m;
  }
}

} // namespace nipstab
