#pragma once

#include "atmesh/mesh.h"
#include "atmesh/sparse.h"

namespace atmesh {

/// Weights of the vertex projection solve (C + w1 D + w2 Id) p = w2 q.
/// w2_vertex_mask scales w2 per vertex (empty = ones); zero entries release
/// vertices from the data term entirely.
struct ProjectionParams {
  Scalar w1 = 1.0;
  Scalar w2 = 0.05;
  VecX w2_vertex_mask;
  Scalar solver_tol = 1e-8;

  void validate(int num_vertices) const;
};

/// Normal-matching operator C with C p = grad E_m, where E_m sums, per
/// triangle, the squared projections of the three triangle edges onto the
/// prescribed face vector u. 3|V| x 3|V|, symmetric PSD, positions stacked
/// (x0,y0,z0, x1,...).
SpMat assemble_normal_matching(const TriangleMesh& mesh, const Dual0Field3& u);

/// Fairness operator D with D p = grad E_f, the v-weighted parallelogram
/// energy over interior edges; stencils touching the boundary are skipped.
/// v is clamped to [0,1] before weighting.
SpMat assemble_fairness(const TriangleMesh& mesh, const Primal0Form& v);

/// The 3|F| per-edge residuals (edge . u) whose squares sum to E_m.
VecX normal_matching_residuals(const TriangleMesh& mesh, const MatX3& positions,
                               const Dual0Field3& u);

struct ProjectionEnergies {
  Scalar e_m = 0;
  Scalar e_f = 0;
  Scalar e_d = 0;
};

ProjectionEnergies projection_energies(const TriangleMesh& mesh, const MatX3& positions,
                                       const MatX3& original_positions, const Dual0Field3& u,
                                       const Primal0Form& v);

struct ProjectionResult {
  TriangleMesh mesh;
  int flipped_triangles = 0;  // faces whose new normal opposes u; not prevented
};

/// Solves (C + w1 D + w2 Diag(mask)) p = w2 Diag(mask) q for the stacked
/// positions and returns the deformed mesh. Connectivity is unchanged.
ProjectionResult project_vertices(const TriangleMesh& mesh, const Dual0Field3& u,
                                  const Primal0Form& v, const ProjectionParams& params);

}  // namespace atmesh
