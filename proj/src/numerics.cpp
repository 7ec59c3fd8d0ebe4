// SPDX-License-Identifier: Apache-2.0
#include "phaseid/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "phaseid/rng.hpp"

namespace phaseid::numerics {

namespace {

// One factorization attempt. Returns nothing if a pivot is <= 0.
std::optional<Matrix> try_cholesky(const SymMatrix& m, double jitter) {
  const size_t n = m.n;
  Matrix l(n, n);
  for (size_t j = 0; j < n; ++j) {
    // Pivot: m_jj + jitter - sum_k l_jk^2
    double d = m(j, j) + jitter;
    const double* lj = l.row(j);
    for (size_t k = 0; k < j; ++k) d -= lj[k] * lj[k];
    if (d <= 0.0 || !std::isfinite(d)) return std::nullopt;
    const double piv = std::sqrt(d);
    l(j, j) = piv;
    const double inv_piv = 1.0 / piv;
#pragma omp parallel for schedule(static)
    for (long long ii = j + 1; ii < static_cast<long long>(n); ++ii) {
      const size_t i = static_cast<size_t>(ii);
      const double* li = l.row(i);
      double s = m(i, j);
      for (size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      l(i, j) = s * inv_piv;
    }
  }
  return l;
}

double mean_diag(const SymMatrix& m) {
  double s = 0.0;
  for (size_t i = 0; i < m.n; ++i) s += m(i, i);
  return m.n ? s / static_cast<double>(m.n) : 0.0;
}

// Forward substitution L Y = B for many right-hand sides. Solves are held
// RHS-major internally so each one walks contiguous memory.
Matrix solve_lower(const Matrix& l, const Matrix& b) {
  const size_t n = l.rows;
  const Matrix bt = transpose(b);
  Matrix yt(b.cols, n);
#pragma omp parallel for schedule(static)
  for (long long rr = 0; rr < static_cast<long long>(b.cols); ++rr) {
    const size_t r = static_cast<size_t>(rr);
    const double* brow = bt.row(r);
    double* yrow = yt.row(r);
    for (size_t i = 0; i < n; ++i) {
      double s = brow[i];
      const double* li = l.row(i);
      for (size_t k = 0; k < i; ++k) s -= li[k] * yrow[k];
      yrow[i] = s / li[i];
    }
  }
  return transpose(yt);
}

// Backward substitution L^T X = Y, reading the factor through its
// transpose so the inner loops stay contiguous.
Matrix solve_lower_transposed(const Matrix& l, const Matrix& y) {
  const size_t n = l.rows;
  const Matrix u = transpose(l);  // upper triangular, row-major
  const Matrix yt = transpose(y);
  Matrix xt(y.cols, n);
#pragma omp parallel for schedule(static)
  for (long long rr = 0; rr < static_cast<long long>(y.cols); ++rr) {
    const size_t r = static_cast<size_t>(rr);
    const double* yrow = yt.row(r);
    double* xrow = xt.row(r);
    for (size_t ii = n; ii-- > 0;) {
      double s = yrow[ii];
      const double* ui = u.row(ii);
      for (size_t k = ii + 1; k < n; ++k) s -= ui[k] * xrow[k];
      xrow[ii] = s / ui[ii];
    }
  }
  return transpose(xt);
}

}  // namespace

Matrix cholesky(const SymMatrix& m) {
  if (auto l = try_cholesky(m, 0.0)) return std::move(*l);
  const double jitter = 1e-10 * mean_diag(m);
  if (jitter > 0.0) {
    if (auto l = try_cholesky(m, jitter)) return std::move(*l);
  }
  throw NotPositiveDefinite("cholesky: pivot <= 0 after jitter retry");
}

SymMatrix invert_spd(const SymMatrix& m) {
  const Matrix l = cholesky(m);
  const Matrix y = solve_lower(l, Matrix::identity(m.n));
  const Matrix x = solve_lower_transposed(l, y);
  // Symmetrize: the two triangles agree up to roundoff.
  SymMatrix out(m.n);
  for (size_t i = 0; i < m.n; ++i)
    for (size_t j = 0; j <= i; ++j) out.set(i, j, 0.5 * (x(i, j) + x(j, i)));
  return out;
}

SymMatrix schur_complement(const SymMatrix& m, const IndexSet& s) {
  const size_t n = m.n;
  if (s.empty()) throw BadCardinality("schur_complement: empty index set");
  if (!s.indices.empty() && s.indices.back() >= n)
    throw OutOfRange("schur_complement: index out of range");
  const IndexSet u = s.complement(n);
  if (u.empty()) throw EmptyComplement("schur_complement: no complement indices");

  const Matrix k_ss_full = submatrix(m, s.indices, s.indices);
  SymMatrix k_ss = SymMatrix::from_matrix(k_ss_full, 1e-9);
  Matrix l;
  try {
    l = cholesky(k_ss);
  } catch (const NotPositiveDefinite&) {
    throw NotPositiveDefinite("schur_complement: K_SS not positive definite");
  }
  const Matrix k_su = submatrix(m, s.indices, u.indices);  // |S| x |U|
  const Matrix x = solve_lower_transposed(l, solve_lower(l, k_su));  // K_SS^{-1} K_SU

  SymMatrix out(u.size());
#pragma omp parallel for schedule(static)
  for (long long ii = 0; ii < static_cast<long long>(u.size()); ++ii) {
    const size_t i = static_cast<size_t>(ii);
    for (size_t j = 0; j <= i; ++j) {
      double v = m(u.indices[i], u.indices[j]);
      for (size_t k = 0; k < s.size(); ++k) v -= k_su(k, i) * x(k, j);
      out.a[i * u.size() + j] = v;
      out.a[j * u.size() + i] = v;
    }
  }
  return out;
}

double trace_elementwise_sqrt(const SymMatrix& m) {
  double t = 0.0;
  for (size_t i = 0; i < m.n; ++i) {
    const double d = m(i, i);
    if (d < -1e-12)
      throw NegativeDiagonal("trace_elementwise_sqrt: negative diagonal entry");
    t += std::sqrt(std::max(d, 0.0));
  }
  return t;
}

double log_det_spd(const SymMatrix& m) {
  const Matrix l = cholesky(m);
  double s = 0.0;
  for (size_t i = 0; i < m.n; ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

namespace {

// Deterministic pseudo-random start vector for power iteration.
std::vector<double> power_start(size_t n, uint64_t tag) {
  std::vector<double> v(n);
  double norm = 0.0;
  for (size_t i = 0; i < n; ++i) {
    v[i] = rng::u01(0xB00753ull, rng::kStreamTest, tag, i) - 0.5;
    norm += v[i] * v[i];
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Largest eigenvalue (and vector) of a dense symmetric matrix held as a
// callable apply(x) -> Ax, by power iteration with Rayleigh quotient stop.
template <typename Apply>
double power_iterate(size_t n, Apply&& apply, size_t max_iters, double tol,
                     std::vector<double>* vec_out, uint64_t tag,
                     const std::vector<std::vector<double>>* deflate = nullptr) {
  std::vector<double> v = power_start(n, tag);
  auto orthogonalize = [&](std::vector<double>& x) {
    if (!deflate) return;
    for (const auto& q : *deflate) {
      const double c = dot(x, q);
      for (size_t i = 0; i < n; ++i) x[i] -= c * q[i];
    }
  };
  orthogonalize(v);
  double lambda = 0.0;
  std::vector<double> av(n);
  for (size_t it = 0; it < max_iters; ++it) {
    apply(v, av);
    orthogonalize(av);
    const double new_lambda = dot(v, av);
    double norm = std::sqrt(dot(av, av));
    if (norm == 0.0) {
      lambda = 0.0;
      break;
    }
    for (size_t i = 0; i < n; ++i) av[i] /= norm;
    const double drift = std::abs(new_lambda - lambda);
    v.swap(av);
    lambda = new_lambda;
    if (it > 0 && drift <= tol * std::max(1.0, std::abs(lambda))) break;
  }
  if (vec_out) *vec_out = v;
  return lambda;
}

}  // namespace

PcaResult pca_project(const Matrix& data, size_t k) {
  const size_t rows = data.rows, dim = data.cols;
  PcaResult res;
  res.components = Matrix(k, dim);
  res.projected = Matrix(rows, k);
  res.explained_variance.assign(k, 0.0);
  if (k == 0) return res;

  // Center.
  Matrix centered = data;
  for (size_t j = 0; j < dim; ++j) {
    double mu = 0.0;
    for (size_t i = 0; i < rows; ++i) mu += data(i, j);
    mu /= static_cast<double>(rows);
    for (size_t i = 0; i < rows; ++i) centered(i, j) -= mu;
  }

  // Sample covariance (dim x dim).
  Matrix cov_full = matmul_tn(centered, centered);
  const double denom = rows > 1 ? static_cast<double>(rows - 1) : 1.0;
  for (double& v : cov_full.a) v /= denom;
  SymMatrix cov = SymMatrix::from_matrix(cov_full, 1e-9);

  // Deflated power iteration for the top-k eigenpairs. Ties resolve to
  // whichever direction the iteration finds first.
  std::vector<std::vector<double>> found;
  double lambda1 = 0.0;
  for (size_t c = 0; c < k && c < dim; ++c) {
    std::vector<double> vec;
    auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
      for (size_t i = 0; i < dim; ++i) {
        const double* ci = cov.row(i);
        double s = 0.0;
        for (size_t j = 0; j < dim; ++j) s += ci[j] * x[j];
        out[i] = s;
      }
    };
    double lambda = power_iterate(dim, apply, 10000, 1e-10, &vec, c, &found);
    if (c == 0) lambda1 = std::max(lambda, 0.0);
    const double cutoff = std::max(1e-12, 1e-12 * lambda1);
    if (lambda <= cutoff) break;  // rank exhausted; remaining stay zero

    // Canonical sign: largest-magnitude entry positive.
    size_t arg = 0;
    for (size_t i = 1; i < dim; ++i)
      if (std::abs(vec[i]) > std::abs(vec[arg])) arg = i;
    if (vec[arg] < 0.0)
      for (double& x : vec) x = -x;

    for (size_t j = 0; j < dim; ++j) res.components(c, j) = vec[j];
    res.explained_variance[c] = lambda;
    found.push_back(vec);
    res.rank = c + 1;
  }

  // Enforce the non-increasing invariant against tie jitter.
  for (size_t c = 1; c < k; ++c)
    res.explained_variance[c] = std::min(res.explained_variance[c], res.explained_variance[c - 1]);

  // Project.
#pragma omp parallel for schedule(static)
  for (long long ii = 0; ii < static_cast<long long>(rows); ++ii) {
    const size_t i = static_cast<size_t>(ii);
    for (size_t c = 0; c < res.rank; ++c) {
      double s = 0.0;
      for (size_t j = 0; j < dim; ++j) s += centered(i, j) * res.components(c, j);
      res.projected(i, c) = s;
    }
  }
  return res;
}

double max_eigenvalue(const SymMatrix& m, size_t max_iters, double tol) {
  auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
    for (size_t i = 0; i < m.n; ++i) {
      const double* mi = m.row(i);
      double s = 0.0;
      for (size_t j = 0; j < m.n; ++j) s += mi[j] * x[j];
      out[i] = s;
    }
  };
  return power_iterate(m.n, apply, max_iters, tol, nullptr, 0x11);
}

double min_eigenvalue(const SymMatrix& m, size_t max_iters, double tol) {
  // Gershgorin upper bound c >= lambda_max, then power iteration on c*I - m.
  double c = 0.0;
  for (size_t i = 0; i < m.n; ++i) {
    double r = 0.0;
    for (size_t j = 0; j < m.n; ++j)
      if (j != i) r += std::abs(m(i, j));
    c = std::max(c, m(i, i) + r);
  }
  auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
    for (size_t i = 0; i < m.n; ++i) {
      const double* mi = m.row(i);
      double s = 0.0;
      for (size_t j = 0; j < m.n; ++j) s += mi[j] * x[j];
      out[i] = c * x[i] - s;
    }
  };
  const double mu = power_iterate(m.n, apply, max_iters, tol, nullptr, 0x12);
  return c - mu;
}

Matrix submatrix(const SymMatrix& m, const std::vector<size_t>& rows,
                 const std::vector<size_t>& cols) {
  Matrix out(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

}  // namespace phaseid::numerics
