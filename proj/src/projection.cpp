#include "atmesh/projection.h"

#include "atmesh/geometry.h"

#include <cmath>

namespace atmesh {

namespace {

VecX clamped01(const Primal0Form& v) { return v.cwiseMax(0.0).cwiseMin(1.0); }

Scalar fairness_weight(const VecX& v, int i1, int i2) {
  const Scalar w = 0.5 * (v[i1] + v[i2]);
  return w * w;
}

void add_block(std::vector<Triplet>& triplets, int va, int vb, const Mat3& block) {
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) triplets.emplace_back(3 * va + r, 3 * vb + c, block(r, c));
}

}  // namespace

void ProjectionParams::validate(int num_vertices) const {
  if (w1 < 0) throw Error("w1 must be nonnegative");
  if (!(w2 > 0)) throw Error("w2 must be positive");
  if (!(solver_tol > 0)) throw Error("solver_tol must be positive");
  if (w2_vertex_mask.size() != 0) {
    if (w2_vertex_mask.size() != num_vertices) throw Error("w2_vertex_mask has wrong length");
    if ((w2_vertex_mask.array() < 0).any()) throw Error("w2_vertex_mask has negative entries");
    if (!(w2_vertex_mask.maxCoeff() > 0)) throw Error("w2_vertex_mask is all zero");
  }
}

SpMat assemble_normal_matching(const TriangleMesh& mesh, const Dual0Field3& u) {
  if (u.rows() != mesh.num_triangles())
    throw Error("assemble_normal_matching: u row count != face count");
  const int n = 3 * mesh.num_vertices();
  std::vector<Triplet> triplets;
  triplets.reserve(36 * mesh.num_triangles());
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    const Vec3 uf = u.row(f);
    const Mat3 outer = 2.0 * uf * uf.transpose();
    for (int k = 0; k < 3; ++k) {
      const int a = mesh.triangles(f, (k + 1) % 3);  // edge a - b of the face
      const int b = mesh.triangles(f, k);
      add_block(triplets, a, a, outer);
      add_block(triplets, b, b, outer);
      add_block(triplets, a, b, -outer);
      add_block(triplets, b, a, -outer);
    }
  }
  return assemble(triplets, n, n);
}

SpMat assemble_fairness(const TriangleMesh& mesh, const Primal0Form& v) {
  if (v.size() != mesh.num_vertices()) throw Error("assemble_fairness: v length != vertex count");
  const VecX vc = clamped01(v);
  const int n = 3 * mesh.num_vertices();
  std::vector<Triplet> triplets;
  const Mat3 identity = Mat3::Identity();
  for (int ii = 0; ii < mesh.num_interior_edges(); ++ii) {
    const int e = mesh.interior_edges[ii];
    const int stencil[4] = {mesh.edges(e, 0), mesh.edges(e, 1), mesh.edge_opposite(e, 0),
                            mesh.edge_opposite(e, 1)};
    const Scalar sign[4] = {1, 1, -1, -1};
    const Scalar w = 2.0 * fairness_weight(vc, stencil[0], stencil[1]);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        add_block(triplets, stencil[a], stencil[b], (w * sign[a] * sign[b]) * identity);
  }
  return assemble(triplets, n, n);
}

VecX normal_matching_residuals(const TriangleMesh& mesh, const MatX3& positions,
                               const Dual0Field3& u) {
  VecX residuals(3 * mesh.num_triangles());
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    const Vec3 uf = u.row(f);
    for (int k = 0; k < 3; ++k) {
      const Vec3 pa = positions.row(mesh.triangles(f, (k + 1) % 3));
      const Vec3 pb = positions.row(mesh.triangles(f, k));
      residuals[3 * f + k] = (pa - pb).dot(uf);
    }
  }
  return residuals;
}

ProjectionEnergies projection_energies(const TriangleMesh& mesh, const MatX3& positions,
                                       const MatX3& original_positions, const Dual0Field3& u,
                                       const Primal0Form& v) {
  ProjectionEnergies e;
  e.e_m = normal_matching_residuals(mesh, positions, u).squaredNorm();
  const VecX vc = clamped01(v);
  for (int ii = 0; ii < mesh.num_interior_edges(); ++ii) {
    const int edge = mesh.interior_edges[ii];
    const int i1 = mesh.edges(edge, 0), i2 = mesh.edges(edge, 1);
    const int i3 = mesh.edge_opposite(edge, 0), i4 = mesh.edge_opposite(edge, 1);
    const Vec3 s = positions.row(i1) + positions.row(i2) - positions.row(i3) - positions.row(i4);
    e.e_f += fairness_weight(vc, i1, i2) * s.squaredNorm();
  }
  e.e_d = (positions - original_positions).squaredNorm();
  return e;
}

ProjectionResult project_vertices(const TriangleMesh& mesh, const Dual0Field3& u,
                                  const Primal0Form& v, const ProjectionParams& params) {
  params.validate(mesh.num_vertices());
  const int nv = mesh.num_vertices();
  const int n = 3 * nv;

  SpMat system = assemble_normal_matching(mesh, u);
  if (params.w1 > 0) system += SpMat(params.w1 * assemble_fairness(mesh, v));

  const VecX mask = params.w2_vertex_mask.size() ? params.w2_vertex_mask : VecX::Ones(nv);
  std::vector<Triplet> data;
  data.reserve(n);
  VecX rhs(n);
  for (int i = 0; i < nv; ++i) {
    const Scalar w = params.w2 * mask[i];
    for (int k = 0; k < 3; ++k) {
      data.emplace_back(3 * i + k, 3 * i + k, w);
      rhs[3 * i + k] = w * mesh.vertices(i, k);
    }
  }
  system += assemble(data, n, n);

  VecX q(n);
  for (int i = 0; i < nv; ++i)
    for (int k = 0; k < 3; ++k) q[3 * i + k] = mesh.vertices(i, k);
  const VecX p =
      spd_solve(system, rhs, params.solver_tol, static_cast<int>(20 * n + 2000), &q);

  MatX3 positions(nv, 3);
  for (int i = 0; i < nv; ++i)
    for (int k = 0; k < 3; ++k) positions(i, k) = p[3 * i + k];

  ProjectionResult result{with_positions(mesh, std::move(positions)), 0};
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    const Vec3 a = result.mesh.vertices.row(result.mesh.triangles(f, 0));
    const Vec3 b = result.mesh.vertices.row(result.mesh.triangles(f, 1));
    const Vec3 c = result.mesh.vertices.row(result.mesh.triangles(f, 2));
    if ((b - a).cross(c - a).dot(u.row(f)) < 0) ++result.flipped_triangles;
  }
  return result;
}

}  // namespace atmesh
