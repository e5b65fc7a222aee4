#pragma once

#include "atmesh/mesh.h"
#include "atmesh/sparse.h"

namespace atmesh {

/// Discrete exterior calculus operators on a triangle mesh with circumcentric
/// dual cells.
///
///   A     |E| x |V|      primal exterior derivative d0; per row -1 at the
///                        smaller-index endpoint, +1 at the larger
///   B     |Eint| x |F|   dual exterior derivative, rows only for interior
///                        edges; +1 on the face left of the canonical lo->hi
///                        direction, -1 on the right face
///   M     |E| x |V|      endpoint averaging, abs(A)/2
///   M_int |Eint| x |V|   interior-edge rows of M
///   S0    |V|            circumcentric dual areas
///   S1    |E|            dual-edge / primal-edge length = half cotan weights
///   S0bar |F|            triangle areas
///   S1bar |Eint|         primal-edge / dual-edge length = 1/S1 after clamping
///
/// Cotan weights can vanish or go negative on right/obtuse triangles; S1 is
/// clamped below by kHodgeClamp and S0 by kHodgeClamp * mean triangle area so
/// every diagonal stays strictly positive and assembled systems stay SPD.
/// S1bar is capped at kDualRatioCap: a vanishing dual edge means infinite
/// coupling, and a cap two orders above typical ratios already acts as
/// infinity against data terms of order alpha * S0bar, while an uncapped
/// 1/kHodgeClamp = 1e8 would put the attainable CG residual floor above any
/// useful tolerance and rigidly weld u across every obtuse edge of a noisy
/// mesh.
struct DecOperators {
  SpMat A;
  SpMat B;
  SpMat M;
  SpMat M_int;
  VecX S0;
  VecX S1;
  VecX S0bar;
  VecX S1bar;
  VecXi interior_edges;
  Scalar mean_edge = 1.0;  // annealing schedules are expressed in this unit

  int num_vertices() const { return static_cast<int>(A.cols()); }
  int num_edges() const { return static_cast<int>(A.rows()); }
  int num_faces() const { return static_cast<int>(S0bar.size()); }
  int num_interior_edges() const { return static_cast<int>(B.rows()); }
};

constexpr Scalar kHodgeClamp = 1e-8;
constexpr Scalar kDualRatioCap = 1e2;

DecOperators build_dec(const TriangleMesh& mesh);

struct DecCheck {
  std::string name;
  bool pass = false;
  Scalar violation = 0;
};

struct DecReport {
  std::vector<DecCheck> checks;
  bool all_pass() const;
  std::string to_string() const;
};

/// Re-derives every structural invariant of the operators from the mesh and
/// reports the worst violation per check.
DecReport verify_dec(const DecOperators& ops, const TriangleMesh& mesh);

}  // namespace atmesh
