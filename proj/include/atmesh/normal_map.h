#pragma once

#include "atmesh/mesh.h"

namespace atmesh {

/// RGB raster encoding unit normals channel-wise as 2*c/255 - 1.
struct NormalMap {
  enum class Space { Tangent, Object };

  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB, 3 * width * height bytes
  Space space = Space::Tangent;
};

/// Binary PPM (P6), maxval 255.
NormalMap load_ppm(const std::string& path, NormalMap::Space space);
void save_ppm(const NormalMap& map, const std::string& path);

/// Bilinear RGB sample at uv in [0,1]^2 (texel centers at (i+0.5)/size),
/// before decoding. Out-of-range uv clamps to the border.
Vec3 sample_bilinear(const NormalMap& map, const Vec2& uv);

/// Decoded unit normal at uv. Tangent-space maps are rotated into object
/// space by `frame` (columns tangent, bitangent, normal); object-space maps
/// ignore it.
Vec3 decode_normal(const NormalMap& map, const Vec2& uv, const Mat3& frame);

/// Per-face tangent frames from UV gradients, columns (T, B, N), orthonormal.
/// Throws when the mesh has no UVs.
std::vector<Mat3> face_tangent_frames(const TriangleMesh& mesh);

/// Per-vertex frames: area-weighted average of incident face tangents,
/// re-orthogonalized against the vertex normal.
std::vector<Mat3> vertex_tangent_frames(const TriangleMesh& mesh);

}  // namespace atmesh
