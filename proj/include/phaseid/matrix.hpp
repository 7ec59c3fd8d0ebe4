// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "phaseid/errors.hpp"

namespace phaseid {

// Dense row-major matrix of doubles.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(size_t r, size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

  double& operator()(size_t i, size_t j) { return a[i * cols + j]; }
  double operator()(size_t i, size_t j) const { return a[i * cols + j]; }

  double* row(size_t i) { return a.data() + i * cols; }
  const double* row(size_t i) const { return a.data() + i * cols; }

  static Matrix identity(size_t n);
};

// Symmetric matrix, full row-major storage. Symmetry is an invariant of
// construction: set() writes both triangles, from_matrix() validates.
struct SymMatrix {
  size_t n = 0;
  std::vector<double> a;

  SymMatrix() = default;
  explicit SymMatrix(size_t dim, double fill = 0.0) : n(dim), a(dim * dim, fill) {}

  double operator()(size_t i, size_t j) const { return a[i * n + j]; }
  void set(size_t i, size_t j, double v) { a[i * n + j] = v; a[j * n + i] = v; }

  const double* row(size_t i) const { return a.data() + i * n; }

  static SymMatrix identity(size_t dim);
  static SymMatrix diag(const std::vector<double>& d);
  // Validates |m(i,j) - m(j,i)| <= tol and stores the symmetrized average.
  static SymMatrix from_matrix(const Matrix& m, double tol = 1e-12);

  Matrix to_matrix() const;
};

// Sorted set of unique 0-based indices.
struct IndexSet {
  std::vector<size_t> indices;

  IndexSet() = default;
  // Validates strict increase; throws OutOfRange on duplicates/disorder.
  static IndexSet of(std::vector<size_t> idx);

  size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  bool contains(size_t i) const;
  // All indices in {0..n-1} not in this set, ascending.
  IndexSet complement(size_t n) const;
};

// Deterministic dense products: every output element is accumulated
// serially in index order, so results are identical for any thread count.
Matrix matmul(const Matrix& a, const Matrix& b);        // A * B
Matrix matmul_nt(const Matrix& a, const Matrix& b);     // A * B^T
Matrix matmul_tn(const Matrix& a, const Matrix& b);     // A^T * B
Matrix transpose(const Matrix& m);

double frobenius_norm(const Matrix& m);
double frobenius_norm(const SymMatrix& m);
// ||a - b||_F / max(||b||_F, eps)
double relative_frobenius_distance(const Matrix& a, const Matrix& b);
double relative_frobenius_distance(const SymMatrix& a, const SymMatrix& b);

}  // namespace phaseid
