#pragma once

#include "atmesh/types.h"

#include <unordered_map>

namespace atmesh {

/// Indexed triangle surface with a canonical edge list and edge-face adjacency.
///
/// Triangles are counter-clockwise. Each edge is stored once as (lo, hi) with
/// lo < hi. `edge_faces` column 0 holds the face whose CCW loop traverses the
/// edge lo->hi (the "left" face of the canonical direction), column 1 the face
/// traversing hi->lo; -1 marks a missing side. `edge_opposite` stores the
/// vertex opposite the edge in the corresponding face, aligned with
/// `edge_faces` columns.
///
/// Immutable after construction; operations that change a mesh return a new one.
struct TriangleMesh {
  MatX3 vertices;
  MatX3i triangles;
  MatX2 uvs;  // 0 rows when absent, else one row per vertex in [0,1]^2

  MatX2i edges;
  MatX2i edge_faces;
  MatX2i edge_opposite;
  VecXi interior_edges;  // indices into `edges` with two incident faces
  std::vector<bool> boundary_edge;
  std::vector<bool> boundary_vertex;

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int num_triangles() const { return static_cast<int>(triangles.rows()); }
  int num_edges() const { return static_cast<int>(edges.rows()); }
  int num_interior_edges() const { return static_cast<int>(interior_edges.size()); }
  bool has_uvs() const { return uvs.rows() == vertices.rows() && uvs.rows() > 0; }

  /// Index of edge (a,b) in either order, or -1.
  int edge_index(int a, int b) const;

 private:
  friend TriangleMesh build_triangle_mesh(MatX3, MatX3i, MatX2);
  std::unordered_map<std::uint64_t, int> edge_lookup_;
};

/// Validates and indexes a triangle soup: in-range indices, manifold edges
/// (at most two incident faces, opposite half-edge directions), no triangle
/// with area under 1e-12 of the squared bounding-box diagonal.
/// `uvs` may be empty or one row per vertex.
TriangleMesh build_triangle_mesh(MatX3 vertices, MatX3i triangles, MatX2 uvs = MatX2());

/// Same connectivity, new vertex positions.
TriangleMesh with_positions(const TriangleMesh& mesh, MatX3 positions);

constexpr Scalar kDegenerateAreaFraction = 1e-12;

}  // namespace atmesh
