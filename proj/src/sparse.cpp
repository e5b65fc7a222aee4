#include "atmesh/sparse.h"

#include <cmath>
#include <random>

namespace atmesh {

SpMat assemble(const std::vector<Triplet>& triplets, int rows, int cols) {
  for (const Triplet& t : triplets) {
    if (t.row() < 0 || t.row() >= rows || t.col() < 0 || t.col() >= cols)
      throw Error("triplet (" + std::to_string(t.row()) + "," + std::to_string(t.col()) +
                  ") out of range for " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  SpMat a(rows, cols);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.prune(1.0, 0.0);  // drop exact zeros so cancelled entries leave no residue
  a.makeCompressed();
  return a;
}

VecX spmv(const SpMat& a, const VecX& x) {
  if (x.size() != a.cols())
    throw Error("spmv: vector size " + std::to_string(x.size()) + " != cols " +
                std::to_string(a.cols()));
  return a * x;
}

VecX spmv_transpose(const SpMat& a, const VecX& x) {
  if (x.size() != a.rows())
    throw Error("spmv_transpose: vector size " + std::to_string(x.size()) + " != rows " +
                std::to_string(a.rows()));
  return a.transpose() * x;
}

SpMat diagonal_scale(const VecX& d, const SpMat& a) {
  if (d.size() != a.rows()) throw Error("diagonal_scale: dimension mismatch");
  return d.asDiagonal() * a;
}

SpMat weighted_gram(const SpMat& a, const VecX& w) {
  if (w.size() != a.rows()) throw Error("weighted_gram: dimension mismatch");
  SpMat g = a.transpose() * SpMat(w.asDiagonal() * a);
  g.makeCompressed();
  return g;
}

VecX spd_solve(const SpMat& a, const VecX& b, Scalar tol, int max_iter, const VecX* x0,
               SolveStats* stats) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw SolverError("spd_solve: matrix is not square");
  if (b.size() != n) throw SolverError("spd_solve: rhs size mismatch");
  if (max_iter <= 0) max_iter = static_cast<int>(10 * n);

  {
    // Symmetry probe on a fixed random pair.
    std::mt19937_64 rng(0x5ca1ab1e);
    VecX px(n), py(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      px[i] = static_cast<Scalar>(rng() >> 11) * 0x1.0p-53 - 0.5;
      py[i] = static_cast<Scalar>(rng() >> 11) * 0x1.0p-53 - 0.5;
    }
    const VecX apx = a * px;
    const VecX apy = a * py;
    const Scalar lhs = py.dot(apx), rhs = px.dot(apy);
    const Scalar scale = std::max({Scalar(1), apx.norm() * py.norm(), apy.norm() * px.norm()});
    if (std::abs(lhs - rhs) > 1e-10 * scale)
      throw SolverError("spd_solve: matrix fails the symmetry probe");
  }

  VecX inv_diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar d = a.coeff(i, i);
    if (!(d > 0))
      throw SolverError("spd_solve: nonpositive diagonal entry at row " + std::to_string(i));
    inv_diag[i] = 1.0 / d;
  }

  const Scalar b_norm = b.norm();
  VecX x = x0 ? *x0 : VecX::Zero(n);
  if (b_norm == 0) {
    if (stats) *stats = {0, 0};
    return VecX::Zero(n);
  }

  const Scalar target = tol * b_norm;
  int it = 0;
  Scalar res = 0;
  while (true) {
    // (Re)start from the true residual; the recurrence alone can drift.
    VecX r = b - a * x;
    res = r.norm();
    if (res <= target) break;
    if (it >= max_iter)
      throw SolverError("spd_solve: no convergence, relative residual " +
                            std::to_string(res / b_norm) + " after " + std::to_string(it) +
                            " iterations",
                        res / b_norm, it);

    VecX z = inv_diag.asDiagonal() * r;
    VecX p = z;
    Scalar rz = r.dot(z);
    const int segment_end = std::min(max_iter, it + 512);
    while (res > target && it < segment_end) {
      const VecX ap = a * p;
      const Scalar curvature = p.dot(ap);
      if (!(curvature > 0))
        throw SolverError("spd_solve: negative curvature, matrix is not positive definite",
                          res / b_norm, it);
      const Scalar alpha = rz / curvature;
      x += alpha * p;
      r -= alpha * ap;
      ++it;
      res = r.norm();
      z = inv_diag.asDiagonal() * r;
      const Scalar rz_next = r.dot(z);
      p = z + (rz_next / rz) * p;
      rz = rz_next;
    }
  }

  if (stats) *stats = {it, res / b_norm};
  return x;
}

}  // namespace atmesh
