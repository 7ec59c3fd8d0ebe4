// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "phaseid/matrix.hpp"

namespace phaseid::numerics {

// Lower-triangular Cholesky factor L with L*L^T = m.
//
// All SPD factorizations go through here: if a pivot fails, a diagonal
// jitter of 1e-10 * mean(diag) is added and the factorization retried
// once; a second failure throws NotPositiveDefinite. Near-duplicate
// kernel rows make cosine kernels numerically singular, and the jitter
// keeps them factorizable without disturbing well-conditioned inputs.
Matrix cholesky(const SymMatrix& m);

// Inverse of an SPD matrix via its Cholesky factor.
SymMatrix invert_spd(const SymMatrix& m);

// K/K_SS = K_UU - K_US K_SS^{-1} K_SU over the complement U of s,
// rows/columns ordered by ascending original index.
SymMatrix schur_complement(const SymMatrix& m, const IndexSet& s);

// sum_i sqrt(m_ii); the trace of the element-wise square root.
// Diagonal entries in [-1e-12, 0) are clamped to zero, anything more
// negative throws NegativeDiagonal.
double trace_elementwise_sqrt(const SymMatrix& m);

// Natural log of det(m) as 2 * sum_i ln(L_ii).
double log_det_spd(const SymMatrix& m);

struct PcaResult {
  Matrix projected;                      // rows x k
  Matrix components;                     // k x dim, orthonormal rows
  std::vector<double> explained_variance;  // non-increasing, length k
  size_t rank = 0;                       // components found before cutoff
};

// Center rows, project onto the top-k eigenvectors of the sample
// covariance. When the covariance rank r is below k the trailing k-r
// components are zero and rank reports r.
PcaResult pca_project(const Matrix& data, size_t k);

// Extreme eigenvalues of a symmetric matrix by (shifted) power
// iteration. Intended for the small matrices of the Loewner check.
double max_eigenvalue(const SymMatrix& m, size_t max_iters = 20000, double tol = 1e-12);
double min_eigenvalue(const SymMatrix& m, size_t max_iters = 20000, double tol = 1e-12);

// Symmetric submatrix m[rows, cols].
Matrix submatrix(const SymMatrix& m, const std::vector<size_t>& rows,
                 const std::vector<size_t>& cols);

}  // namespace phaseid::numerics
