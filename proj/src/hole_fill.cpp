#include "atmesh/hole_fill.h"

#include <limits>
#include <map>

namespace atmesh {

std::vector<std::vector<int>> boundary_loops(const TriangleMesh& mesh) {
  // The patch must traverse each boundary edge opposite to the existing face,
  // so walk half-edges (b -> a) where the face holds (a -> b).
  std::map<int, std::pair<int, int>> next;  // from vertex -> (to vertex, edge)
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.boundary_edge[e]) continue;
    const int lo = mesh.edges(e, 0), hi = mesh.edges(e, 1);
    // edge_faces col 0 = face traversing lo->hi, col 1 = face traversing hi->lo
    const int from = mesh.edge_faces(e, 0) != -1 ? hi : lo;
    const int to = mesh.edge_faces(e, 0) != -1 ? lo : hi;
    if (next.count(from))
      throw MeshError("non-simple boundary: vertex " + std::to_string(from) +
                      " has multiple outgoing boundary edges");
    next[from] = {to, e};
  }

  std::vector<std::vector<int>> loops;
  std::map<int, bool> used;
  for (const auto& [start, _] : next) {
    if (used[start]) continue;
    std::vector<int> loop;
    int v = start;
    do {
      if (used[v]) throw MeshError("non-simple boundary loop through vertex " + std::to_string(v));
      used[v] = true;
      loop.push_back(v);
      auto it = next.find(v);
      if (it == next.end())
        throw MeshError("open boundary chain at vertex " + std::to_string(v));
      v = it->second.first;
    } while (v != start);
    loops.push_back(std::move(loop));
  }
  return loops;
}

std::vector<std::array<int, 3>> min_area_triangulation(
    const MatX3& positions, const std::vector<int>& loop,
    const std::function<bool(int, int)>& chord_allowed) {
  const int n = static_cast<int>(loop.size());
  if (n < 3) throw MeshError("boundary loop with fewer than 3 vertices");

  // Degenerate triangles are free by area alone (collinear boundary runs are
  // common on grid-like holes), so they carry a prohibitive cost instead.
  Scalar scale_sq = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      scale_sq = std::max(scale_sq, (positions.row(loop[i]) - positions.row(loop[j])).squaredNorm());
  const Scalar degenerate_floor = kDegenerateAreaFraction * scale_sq;
  const Scalar forbidden = 1e30;

  const auto tri_area = [&](int i, int j, int k) {
    const Vec3 a = positions.row(loop[i]);
    const Vec3 b = positions.row(loop[j]);
    const Vec3 c = positions.row(loop[k]);
    const Scalar area = 0.5 * (b - a).cross(c - a).norm();
    return area < degenerate_floor ? forbidden : area;
  };

  // A chord is any position pair except loop edges (consecutive, or the
  // closing pair 0, n-1).
  const auto chord_cost = [&](int i, int j) {
    if (j - i <= 1 || (i == 0 && j == n - 1)) return Scalar(0);
    if (chord_allowed && !chord_allowed(loop[i], loop[j])) return forbidden;
    return Scalar(0);
  };

  // cost[i][j]: minimal area triangulating the chain i..j closed by chord (i,j)
  std::vector<std::vector<Scalar>> cost(n, std::vector<Scalar>(n, 0));
  std::vector<std::vector<int>> split(n, std::vector<int>(n, -1));
  for (int span = 2; span < n; ++span) {
    for (int i = 0; i + span < n; ++i) {
      const int j = i + span;
      Scalar best = std::numeric_limits<Scalar>::max();
      int best_k = -1;
      for (int k = i + 1; k < j; ++k) {
        const Scalar c = cost[i][k] + cost[k][j] + tri_area(i, k, j) + chord_cost(i, k) +
                         chord_cost(k, j) + chord_cost(i, j);
        if (c < best) {
          best = c;
          best_k = k;
        }
      }
      cost[i][j] = best;
      split[i][j] = best_k;
    }
  }
  if (cost[0][n - 1] >= forbidden)
    throw MeshError("no valid minimum-area triangulation for a boundary loop");

  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(n - 2);
  std::vector<std::pair<int, int>> stack{{0, n - 1}};
  while (!stack.empty()) {
    const auto [i, j] = stack.back();
    stack.pop_back();
    if (j - i < 2) continue;
    const int k = split[i][j];
    triangles.push_back({i, k, j});
    stack.emplace_back(i, k);
    stack.emplace_back(k, j);
  }
  return triangles;
}

HoleFillResult fill_holes(const TriangleMesh& mesh) {
  const auto loops = boundary_loops(mesh);
  const int nf = mesh.num_triangles();
  if (loops.empty()) return {mesh, std::vector<bool>(nf, false)};

  // Chords may not revisit edges the mesh already has; a patch uses each of
  // its internal chords twice, so any reuse would exceed two faces per edge.
  const auto chord_free = [&mesh](int a, int b) { return mesh.edge_index(a, b) == -1; };

  std::vector<std::array<int, 3>> added;
  for (const auto& loop : loops) {
    for (const auto& t : min_area_triangulation(mesh.vertices, loop, chord_free))
      added.push_back({loop[t[0]], loop[t[1]], loop[t[2]]});
  }

  MatX3i triangles(nf + added.size(), 3);
  triangles.topRows(nf) = mesh.triangles;
  for (size_t i = 0; i < added.size(); ++i)
    triangles.row(nf + i) << added[i][0], added[i][1], added[i][2];

  HoleFillResult result{build_triangle_mesh(mesh.vertices, std::move(triangles), mesh.uvs),
                        std::vector<bool>(nf + added.size(), false)};
  std::fill(result.new_face_mask.begin() + nf, result.new_face_mask.end(), true);
  return result;
}

}  // namespace atmesh
