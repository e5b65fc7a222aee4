#pragma once

#include "atmesh/mesh.h"

#include <optional>
#include <string>

namespace atmesh {

enum class MeshFormat { Obj, Off };

/// Picks Obj/Off from the file extension; throws on anything else.
MeshFormat format_from_path(const std::string& path);

/// Parses an OBJ (v/vt/vn/f, 1-based indices) or OFF file. Polygonal faces are
/// fan-triangulated; vt records become per-vertex UVs (last corner reference
/// wins); vn records are accepted and dropped. Errors carry the line number.
TriangleMesh load_mesh(const std::string& path, MeshFormat format);
TriangleMesh load_mesh(const std::string& path);

/// Writes the mesh; when `scalar` is given (one value per vertex) a sidecar
/// CSV is written next to it at `path + ".v.csv"`, one value per line.
void save_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format,
               const VecX* scalar = nullptr);
void save_mesh(const TriangleMesh& mesh, const std::string& path, const VecX* scalar = nullptr);

std::string scalar_sidecar_path(const std::string& mesh_path);
void save_scalar_csv(const VecX& values, const std::string& path);
VecX load_scalar_csv(const std::string& path);

}  // namespace atmesh
