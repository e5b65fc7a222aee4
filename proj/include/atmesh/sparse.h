#pragma once

#include "atmesh/types.h"

namespace atmesh {

/// Builds a CSR matrix from (row, col, value) triplets; duplicates are summed.
/// Throws on out-of-range indices.
SpMat assemble(const std::vector<Triplet>& triplets, int rows, int cols);

/// y = A x, with dimension checks.
VecX spmv(const SpMat& a, const VecX& x);

/// y = A^T x, with dimension checks.
VecX spmv_transpose(const SpMat& a, const VecX& x);

/// Diag(d) * A.
SpMat diagonal_scale(const VecX& d, const SpMat& a);

/// A^T Diag(w) A — the quadratic-form kernel behind every system assembled here.
SpMat weighted_gram(const SpMat& a, const VecX& w);

struct SolveStats {
  int iterations = 0;
  Scalar rel_residual = 0;
};

/// Jacobi-preconditioned conjugate gradients for symmetric positive-definite
/// systems. Symmetry is probed on a random pair to 1e-10 before iterating and
/// negative curvature aborts with a SolverError. Guarantees
/// ||A x - b|| <= tol * ||b|| on return; deterministic (fixed accumulation
/// order, no parallelism). `max_iter` = 0 means 10 * n; `x0` is an optional
/// warm start.
VecX spd_solve(const SpMat& a, const VecX& b, Scalar tol = 1e-8, int max_iter = 0,
               const VecX* x0 = nullptr, SolveStats* stats = nullptr);

}  // namespace atmesh
