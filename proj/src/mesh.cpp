#include "atmesh/mesh.h"

#include <algorithm>
#include <map>
#include <sstream>

namespace atmesh {

namespace {

std::uint64_t edge_key(int lo, int hi) {
  return (static_cast<std::uint64_t>(lo) << 32) | static_cast<std::uint32_t>(hi);
}

}  // namespace

int TriangleMesh::edge_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  auto it = edge_lookup_.find(edge_key(a, b));
  return it == edge_lookup_.end() ? -1 : it->second;
}

TriangleMesh build_triangle_mesh(MatX3 vertices, MatX3i triangles, MatX2 uvs) {
  const int nv = static_cast<int>(vertices.rows());
  const int nf = static_cast<int>(triangles.rows());
  if (nv < 3) throw MeshError("mesh needs at least 3 vertices, got " + std::to_string(nv));
  if (uvs.rows() != 0 && uvs.rows() != nv)
    throw MeshError("uv count " + std::to_string(uvs.rows()) + " does not match vertex count " +
                    std::to_string(nv));

  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      const int v = triangles(f, k);
      if (v < 0 || v >= nv)
        throw MeshError("triangle " + std::to_string(f) + " references vertex " +
                        std::to_string(v) + " out of range [0," + std::to_string(nv) + ")");
    }
    if (triangles(f, 0) == triangles(f, 1) || triangles(f, 1) == triangles(f, 2) ||
        triangles(f, 0) == triangles(f, 2))
      throw MeshError("triangle " + std::to_string(f) + " has a repeated vertex");
  }

  const Vec3 lo = vertices.colwise().minCoeff();
  const Vec3 hi = vertices.colwise().maxCoeff();
  const Scalar sq_diag = (hi - lo).squaredNorm();
  const Scalar area_floor = kDegenerateAreaFraction * sq_diag;
  for (int f = 0; f < nf; ++f) {
    const Vec3 a = vertices.row(triangles(f, 0));
    const Vec3 b = vertices.row(triangles(f, 1));
    const Vec3 c = vertices.row(triangles(f, 2));
    const Scalar area = 0.5 * (b - a).cross(c - a).norm();
    if (!(area >= area_floor))
      throw MeshError("triangle " + std::to_string(f) + " is degenerate (area " +
                      std::to_string(area) + ")");
  }

  // One slot per half-edge direction of the canonical (lo,hi) edge.
  struct EdgeRec {
    int face[2] = {-1, -1};
    int opposite[2] = {-1, -1};
    int extra = 0;  // incidences beyond two
  };
  std::map<std::pair<int, int>, EdgeRec> recs;
  std::vector<std::pair<int, int>> bad;
  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      const int a = triangles(f, k);
      const int b = triangles(f, (k + 1) % 3);
      const int opp = triangles(f, (k + 2) % 3);
      const int lo_v = std::min(a, b), hi_v = std::max(a, b);
      const int slot = (a == lo_v) ? 0 : 1;
      EdgeRec& rec = recs[{lo_v, hi_v}];
      if (rec.face[slot] != -1) {
        ++rec.extra;
        if (bad.empty() || bad.back() != std::make_pair(lo_v, hi_v)) bad.emplace_back(lo_v, hi_v);
        continue;
      }
      rec.face[slot] = f;
      rec.opposite[slot] = opp;
    }
  }
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "non-manifold or inconsistently oriented edges:";
    for (const auto& [a, b] : bad) msg << " (" << a << "," << b << ")";
    throw MeshError(msg.str(), bad);
  }

  TriangleMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.triangles = std::move(triangles);
  mesh.uvs = std::move(uvs);

  const int ne = static_cast<int>(recs.size());
  mesh.edges.resize(ne, 2);
  mesh.edge_faces.resize(ne, 2);
  mesh.edge_opposite.resize(ne, 2);
  mesh.boundary_edge.assign(ne, false);
  mesh.boundary_vertex.assign(nv, false);
  mesh.edge_lookup_.reserve(ne);

  std::vector<int> interior;
  interior.reserve(ne);
  int e = 0;
  for (const auto& [key, rec] : recs) {
    mesh.edges(e, 0) = key.first;
    mesh.edges(e, 1) = key.second;
    mesh.edge_faces(e, 0) = rec.face[0];
    mesh.edge_faces(e, 1) = rec.face[1];
    mesh.edge_opposite(e, 0) = rec.opposite[0];
    mesh.edge_opposite(e, 1) = rec.opposite[1];
    mesh.edge_lookup_.emplace(edge_key(key.first, key.second), e);
    if (rec.face[0] == -1 || rec.face[1] == -1) {
      mesh.boundary_edge[e] = true;
      mesh.boundary_vertex[key.first] = true;
      mesh.boundary_vertex[key.second] = true;
    } else {
      interior.push_back(e);
    }
    ++e;
  }
  mesh.interior_edges = Eigen::Map<VecXi>(interior.data(), interior.size());
  return mesh;
}

TriangleMesh with_positions(const TriangleMesh& mesh, MatX3 positions) {
  if (positions.rows() != mesh.vertices.rows())
    throw MeshError("position count does not match vertex count");
  TriangleMesh out = mesh;
  out.vertices = std::move(positions);
  return out;
}

}  // namespace atmesh
