// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "phaseid/matrix.hpp"

namespace phaseid::ref {

// Serial reference implementations, kept deliberately independent of the
// main kernels: plain loops, Gauss-Jordan instead of Cholesky, Jacobi
// rotations instead of power iteration. Tests use them as oracles and the
// benchmark uses them as the serial baseline.

Matrix matmul(const Matrix& a, const Matrix& b);

// Unblocked Cholesky, no jitter; throws NotPositiveDefinite on pivot <= 0.
Matrix cholesky(const SymMatrix& m);

// Gauss-Jordan inverse with partial pivoting.
Matrix gauss_inverse(const Matrix& m);

// Schur complement K/K_SS by symmetric Gaussian elimination of the S
// pivots, independent of any factorization.
SymMatrix schur_by_elimination(const SymMatrix& m, const IndexSet& s);

// All eigenvalues of a symmetric matrix, descending, by cyclic Jacobi.
std::vector<double> jacobi_eigenvalues(const SymMatrix& m);

}  // namespace phaseid::ref
