#pragma once

#include "atmesh/mesh.h"

namespace atmesh {

Vec3 face_normal(const TriangleMesh& mesh, int face);

/// Per-face unit normals from the CCW cross product. Throws naming the face
/// if one is degenerate.
Dual0Field3 face_normals(const TriangleMesh& mesh);

VecX face_areas(const TriangleMesh& mesh);
Scalar total_area(const TriangleMesh& mesh);
Scalar mean_edge_length(const TriangleMesh& mesh);
Scalar bbox_diagonal(const TriangleMesh& mesh);

/// Largest distance between two vertices (rotation invariant; exact up to
/// 4096 vertices, iterated farthest-point sweep beyond).
Scalar mesh_diameter(const TriangleMesh& mesh);

/// Area-weighted vertex normals (unit length).
MatX3 vertex_normals(const TriangleMesh& mesh);

int euler_characteristic(const TriangleMesh& mesh);

/// Rigid-plus-scale frame change: x -> (x - center) * scale.
struct UnitBallTransform {
  Vec3 center = Vec3::Zero();
  Scalar scale = 1.0;

  Vec3 apply(const Vec3& p) const { return (p - center) * scale; }
  Vec3 invert(const Vec3& p) const { return p / scale + center; }
  MatX3 invert(const MatX3& pts) const;
};

/// Centers the bounding box at the origin and scales so the farthest vertex
/// sits exactly on the unit sphere. Returns the transform that was applied.
std::pair<TriangleMesh, UnitBallTransform> normalize_to_unit_ball(const TriangleMesh& mesh);

/// Displaces each vertex along its area-weighted normal by a zero-mean
/// Gaussian with standard deviation sigma * mean_edge_length. Pure function
/// of (mesh, sigma, seed); sigma = 0 returns the input unchanged.
TriangleMesh add_normal_noise(const TriangleMesh& mesh, Scalar sigma, std::uint64_t seed);

/// 1->4 split of every triangle at edge midpoints, `levels` times. Positions
/// are untouched (flat scheme); UVs interpolate linearly.
TriangleMesh subdivide_midpoint(const TriangleMesh& mesh, int levels);

/// Symmetric RMS surface distance: area-uniform samples on each mesh, each
/// measured to the closest point on the other mesh, RMS over the union,
/// divided by the bounding-box diagonal of `a`. Deterministic for fixed seed.
Scalar hausdorff_rms(const TriangleMesh& a, const TriangleMesh& b, Scalar samples_per_area,
                     std::uint64_t seed = 42);

/// Closest point on the surface of `mesh` (brute force over an AABB tree).
Vec3 closest_surface_point(const TriangleMesh& mesh, const Vec3& query);

}  // namespace atmesh
