// SPDX-License-Identifier: Apache-2.0
#include "phaseid/reference.hpp"

#include <algorithm>
#include <cmath>

namespace phaseid::ref {

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw ShapeMismatch("ref::matmul: inner dimensions differ");
  Matrix c(a.rows, b.cols);
  for (size_t i = 0; i < a.rows; ++i)
    for (size_t j = 0; j < b.cols; ++j) {
      double s = 0.0;
      for (size_t k = 0; k < a.cols; ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

Matrix cholesky(const SymMatrix& m) {
  const size_t n = m.n;
  Matrix l(n, n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j <= i; ++j) {
      double s = m(i, j);
      for (size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0) throw NotPositiveDefinite("ref::cholesky: pivot <= 0");
        l(i, j) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

Matrix gauss_inverse(const Matrix& m) {
  if (m.rows != m.cols) throw ShapeMismatch("ref::gauss_inverse: matrix not square");
  const size_t n = m.rows;
  Matrix a = m;
  Matrix inv = Matrix::identity(n);
  for (size_t col = 0; col < n; ++col) {
    // Partial pivoting.
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (a(piv, col) == 0.0)
      throw NotPositiveDefinite("ref::gauss_inverse: singular matrix");
    if (piv != col) {
      for (size_t j = 0; j < n; ++j) {
        std::swap(a.a[piv * n + j], a.a[col * n + j]);
        std::swap(inv.a[piv * n + j], inv.a[col * n + j]);
      }
    }
    const double d = a(col, col);
    for (size_t j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

SymMatrix schur_by_elimination(const SymMatrix& m, const IndexSet& s) {
  const size_t n = m.n;
  if (s.empty()) throw BadCardinality("ref::schur_by_elimination: empty set");
  const IndexSet u = s.complement(n);
  if (u.empty()) throw EmptyComplement("ref::schur_by_elimination: full set");
  Matrix a = m.to_matrix();
  // Eliminate each selected pivot symmetrically; what remains on the
  // complement block is exactly K_UU - K_US K_SS^{-1} K_SU.
  std::vector<bool> eliminated(n, false);
  for (size_t p : s.indices) {
    const double piv = a(p, p);
    if (piv == 0.0)
      throw NotPositiveDefinite("ref::schur_by_elimination: zero pivot");
    for (size_t i = 0; i < n; ++i) {
      if (i == p || eliminated[i]) continue;
      const double f = a(i, p) / piv;
      if (f == 0.0) continue;
      for (size_t j = 0; j < n; ++j) {
        if (eliminated[j]) continue;
        a(i, j) -= f * a(p, j);
      }
    }
    eliminated[p] = true;
  }
  SymMatrix out(u.size());
  for (size_t i = 0; i < u.size(); ++i)
    for (size_t j = 0; j <= i; ++j) {
      const double v = 0.5 * (a(u.indices[i], u.indices[j]) + a(u.indices[j], u.indices[i]));
      out.set(i, j, v);
    }
  return out;
}

std::vector<double> jacobi_eigenvalues(const SymMatrix& m) {
  const size_t n = m.n;
  Matrix a = m.to_matrix();
  const double scale = std::max(frobenius_norm(m), 1e-300);
  for (size_t sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    if (std::sqrt(off) < 1e-14 * scale) break;
    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return eig;
}

}  // namespace phaseid::ref
