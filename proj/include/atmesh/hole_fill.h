#pragma once

#include "atmesh/mesh.h"

#include <functional>

namespace atmesh {

/// Boundary loops as directed vertex cycles, oriented so that a patch built
/// along the loop order closes the surface with consistent winding.
/// Throws on non-simple loops (a boundary vertex with more than two incident
/// boundary edges).
std::vector<std::vector<int>> boundary_loops(const TriangleMesh& mesh);

/// Minimum-total-area triangulation of a closed vertex cycle (dynamic program
/// over the loop, no new vertices). Returns triangles as indices into `loop`.
/// Degenerate triangles and chords rejected by `chord_allowed` (when given)
/// carry a prohibitive cost; chords of non-convex holes can otherwise land on
/// edges the mesh already owns.
std::vector<std::array<int, 3>> min_area_triangulation(
    const MatX3& positions, const std::vector<int>& loop,
    const std::function<bool(int, int)>& chord_allowed = nullptr);

struct HoleFillResult {
  TriangleMesh mesh;
  std::vector<bool> new_face_mask;  // one flag per face of `mesh`
};

/// Closes every boundary loop with its minimum-area triangulation.
/// A closed input comes back unchanged with an all-false mask.
HoleFillResult fill_holes(const TriangleMesh& mesh);

}  // namespace atmesh
