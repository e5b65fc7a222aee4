#pragma once

#include "atmesh/geometry.h"
#include "atmesh/mesh.h"

#include <Eigen/Dense>

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

namespace atmesh::testing {

inline Scalar uniform01(std::mt19937_64& rng) {
  return static_cast<Scalar>(rng() >> 11) * 0x1.0p-53;
}

// --- small canonical meshes -------------------------------------------------

inline TriangleMesh make_triangle() {
  MatX3 v(3, 3);
  v << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  MatX3i f(1, 3);
  f << 0, 1, 2;
  return build_triangle_mesh(v, f);
}

inline TriangleMesh make_equilateral(Scalar side = 1.0) {
  MatX3 v(3, 3);
  v << 0, 0, 0, side, 0, 0, 0.5 * side, std::sqrt(3.0) / 2.0 * side, 0;
  MatX3i f(1, 3);
  f << 0, 1, 2;
  return build_triangle_mesh(v, f);
}

inline TriangleMesh make_tetrahedron() {
  MatX3 v(4, 3);
  v << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;
  MatX3i f(4, 3);
  f << 0, 2, 1, 0, 1, 3, 0, 3, 2, 1, 2, 3;
  return build_triangle_mesh(v, f);
}

inline TriangleMesh make_cube(int subdivisions = 0) {
  MatX3 v(8, 3);
  v << -1, -1, -1, 1, -1, -1, -1, 1, -1, 1, 1, -1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1, 1;
  MatX3i f(12, 3);
  f << 0, 2, 3, 0, 3, 1,  // -z
      4, 5, 7, 4, 7, 6,   // +z
      0, 1, 5, 0, 5, 4,   // -y
      2, 6, 7, 2, 7, 3,   // +y
      0, 4, 6, 0, 6, 2,   // -x
      1, 3, 7, 1, 7, 5;   // +x
  return subdivide_midpoint(build_triangle_mesh(v, f), subdivisions);
}

inline TriangleMesh make_icosahedron() {
  const Scalar t = (1.0 + std::sqrt(5.0)) / 2.0;
  MatX3 v(12, 3);
  v << -1, t, 0, 1, t, 0, -1, -t, 0, 1, -t, 0, 0, -1, t, 0, 1, t, 0, -1, -t, 0, 1, -t, t, 0, -1,
      t, 0, 1, -t, 0, -1, -t, 0, 1;
  v.rowwise().normalize();
  MatX3i f(20, 3);
  f << 0, 11, 5, 0, 5, 1, 0, 1, 7, 0, 7, 10, 0, 10, 11, 1, 5, 9, 5, 11, 4, 11, 10, 2, 10, 7, 6, 7,
      1, 8, 3, 9, 4, 3, 4, 2, 3, 2, 6, 3, 6, 8, 3, 8, 9, 4, 9, 5, 2, 4, 11, 6, 2, 10, 8, 6, 7, 9,
      8, 1;
  return build_triangle_mesh(v, f);
}

inline TriangleMesh make_icosphere(int levels) {
  TriangleMesh mesh = subdivide_midpoint(make_icosahedron(), levels);
  MatX3 v = mesh.vertices;
  v.rowwise().normalize();
  return with_positions(mesh, v);
}

/// Regular grid on [0,extent]^2 in the z = 0 plane, every cell split along the
/// same diagonal. UVs span [0,1]^2 when requested.
inline TriangleMesh make_grid(int nx, int ny, Scalar extent = 1.0, bool with_uvs = false) {
  MatX3 v(nx * ny, 3);
  MatX2 uv;
  if (with_uvs) uv.resize(nx * ny, 2);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int idx = j * nx + i;
      const Scalar x = extent * i / (nx - 1);
      const Scalar y = extent * j / (ny - 1);
      v.row(idx) << x, y, 0;
      if (with_uvs) uv.row(idx) << Scalar(i) / (nx - 1), Scalar(j) / (ny - 1);
    }
  }
  MatX3i f(2 * (nx - 1) * (ny - 1), 3);
  int fi = 0;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const int v00 = j * nx + i, v10 = v00 + 1, v01 = v00 + nx, v11 = v01 + 1;
      f.row(fi++) << v00, v10, v11;
      f.row(fi++) << v00, v11, v01;
    }
  }
  return build_triangle_mesh(v, f, uv);
}

/// Tent fold: a grid whose vertices are lifted by slope * max(0, ridge - |x - ridge|)...
/// two planar patches meeting along the middle column with the given angle
/// (in degrees) between their normals.
inline TriangleMesh make_wedge(int nx, int ny, Scalar normal_angle_deg) {
  TriangleMesh grid = make_grid(nx, ny, 1.0);
  const Scalar slope = std::tan(normal_angle_deg * M_PI / 360.0);  // half-angle each side
  MatX3 v = grid.vertices;
  for (int i = 0; i < v.rows(); ++i) v(i, 2) = -slope * std::abs(v(i, 0) - 0.5);
  return with_positions(grid, v);
}

inline TriangleMesh make_square_at_height(Scalar z) {
  MatX3 v(4, 3);
  v << 0, 0, z, 1, 0, z, 1, 1, z, 0, 1, z;
  MatX3i f(2, 3);
  f << 0, 1, 2, 0, 2, 3;
  return build_triangle_mesh(v, f);
}

/// Random vertex jitter (uniform in [-amp, amp]^3), deterministic.
inline TriangleMesh jitter(const TriangleMesh& mesh, Scalar amp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MatX3 v = mesh.vertices;
  for (int i = 0; i < v.rows(); ++i)
    for (int k = 0; k < 3; ++k) v(i, k) += amp * (2 * uniform01(rng) - 1);
  return with_positions(mesh, v);
}

/// Irregular ~50-vertex fan-of-strips mesh for gradient oracles: a jittered
/// grid, guaranteed manifold.
inline TriangleMesh make_random_patch(std::uint64_t seed, int nx = 10, int ny = 5) {
  return jitter(make_grid(nx, ny, 1.0), 0.25 / std::max(nx, ny), seed);
}

inline std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace atmesh::testing
