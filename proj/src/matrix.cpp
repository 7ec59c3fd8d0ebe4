// SPDX-License-Identifier: Apache-2.0
#include "phaseid/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace phaseid {

Matrix Matrix::identity(size_t n) {
  Matrix m(n, n);
  for (size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

SymMatrix SymMatrix::identity(size_t dim) {
  SymMatrix m(dim);
  for (size_t i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diag(const std::vector<double>& d) {
  SymMatrix m(d.size());
  for (size_t i = 0; i < d.size(); ++i) m.set(i, i, d[i]);
  return m;
}

SymMatrix SymMatrix::from_matrix(const Matrix& m, double tol) {
  if (m.rows != m.cols) throw ShapeMismatch("from_matrix: matrix not square");
  SymMatrix out(m.rows);
  for (size_t i = 0; i < m.rows; ++i) {
    for (size_t j = 0; j <= i; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol)
        throw ShapeMismatch("from_matrix: asymmetry beyond tolerance");
      out.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    }
  }
  return out;
}

Matrix SymMatrix::to_matrix() const {
  Matrix m(n, n);
  m.a = a;
  return m;
}

IndexSet IndexSet::of(std::vector<size_t> idx) {
  for (size_t i = 1; i < idx.size(); ++i) {
    if (idx[i] <= idx[i - 1])
      throw OutOfRange("IndexSet: indices must be strictly increasing");
  }
  IndexSet s;
  s.indices = std::move(idx);
  return s;
}

bool IndexSet::contains(size_t i) const {
  return std::binary_search(indices.begin(), indices.end(), i);
}

IndexSet IndexSet::complement(size_t n) const {
  IndexSet out;
  out.indices.reserve(n - indices.size());
  size_t p = 0;
  for (size_t i = 0; i < n; ++i) {
    if (p < indices.size() && indices[p] == i) {
      ++p;
    } else {
      out.indices.push_back(i);
    }
  }
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw ShapeMismatch("matmul: inner dimensions differ");
  Matrix c(a.rows, b.cols);
#pragma omp parallel for schedule(static)
  for (long long ii = 0; ii < static_cast<long long>(a.rows); ++ii) {
    const size_t i = static_cast<size_t>(ii);
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (size_t k = 0; k < a.cols; ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (size_t j = 0; j < b.cols; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols) throw ShapeMismatch("matmul_nt: inner dimensions differ");
  Matrix c(a.rows, b.rows);
#pragma omp parallel for schedule(static)
  for (long long ii = 0; ii < static_cast<long long>(a.rows); ++ii) {
    const size_t i = static_cast<size_t>(ii);
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (size_t j = 0; j < b.rows; ++j) {
      const double* bj = b.row(j);
      double s = 0.0;
      for (size_t k = 0; k < a.cols; ++k) s += ai[k] * bj[k];
      ci[j] = s;
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) throw ShapeMismatch("matmul_tn: inner dimensions differ");
  Matrix c(a.cols, b.cols);
#pragma omp parallel for schedule(static)
  for (long long ii = 0; ii < static_cast<long long>(a.cols); ++ii) {
    const size_t i = static_cast<size_t>(ii);
    double* ci = c.row(i);
    for (size_t k = 0; k < a.rows; ++k) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      const double* bk = b.row(k);
      for (size_t j = 0; j < b.cols; ++j) ci[j] += aki * bk[j];
    }
  }
  return c;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols, m.rows);
  for (size_t i = 0; i < m.rows; ++i)
    for (size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  return t;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return std::sqrt(s);
}

double frobenius_norm(const SymMatrix& m) {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return std::sqrt(s);
}

double relative_frobenius_distance(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw ShapeMismatch("relative_frobenius_distance: shape mismatch");
  double num = 0.0;
  for (size_t i = 0; i < a.a.size(); ++i) {
    const double d = a.a[i] - b.a[i];
    num += d * d;
  }
  const double den = std::max(frobenius_norm(b), 1e-300);
  return std::sqrt(num) / den;
}

double relative_frobenius_distance(const SymMatrix& a, const SymMatrix& b) {
  return relative_frobenius_distance(a.to_matrix(), b.to_matrix());
}

}  // namespace phaseid
