#include "atmesh/mesh_io.h"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace atmesh {

namespace {

std::string lower_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

std::string fmt_scalar(Scalar x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

struct FaceCorner {
  int vertex = 0;
  int uv = 0;  // 0 = absent (OBJ is 1-based)
};

FaceCorner parse_obj_corner(const std::string& token, const std::string& path, int line) {
  FaceCorner c;
  // forms: v, v/t, v//n, v/t/n
  const auto s1 = token.find('/');
  const std::string vs = token.substr(0, s1);
  if (vs.empty()) throw ParseError(path, line, "empty vertex reference in face");
  try {
    c.vertex = std::stoi(vs);
  } catch (const std::exception&) {
    throw ParseError(path, line, "bad vertex index '" + vs + "'");
  }
  if (s1 != std::string::npos) {
    const auto s2 = token.find('/', s1 + 1);
    const std::string ts =
        token.substr(s1 + 1, s2 == std::string::npos ? std::string::npos : s2 - s1 - 1);
    if (!ts.empty()) {
      try {
        c.uv = std::stoi(ts);
      } catch (const std::exception&) {
        throw ParseError(path, line, "bad texture index '" + ts + "'");
      }
    }
  }
  return c;
}

TriangleMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");

  std::vector<Vec3> positions;
  std::vector<Vec2> uv_records;
  std::vector<std::array<FaceCorner, 3>> corners;

  std::string line_str;
  int line = 0;
  while (std::getline(in, line_str)) {
    ++line;
    std::istringstream ls(line_str);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) throw ParseError(path, line, "malformed vertex");
      positions.push_back(p);
    } else if (tag == "vt") {
      Vec2 t;
      if (!(ls >> t.x() >> t.y())) throw ParseError(path, line, "malformed texture coordinate");
      uv_records.push_back(t);
    } else if (tag == "vn") {
      // normals are recomputed from geometry; accept and drop
    } else if (tag == "f") {
      std::vector<FaceCorner> poly;
      std::string token;
      while (ls >> token) poly.push_back(parse_obj_corner(token, path, line));
      if (poly.size() < 3) throw ParseError(path, line, "face with fewer than 3 vertices");
      for (FaceCorner& c : poly) {
        if (c.vertex == 0) throw ParseError(path, line, "index 0 in 1-based face record");
        if (c.vertex < 0 || c.uv < 0)
          throw ParseError(path, line, "negative (relative) indices are not supported");
        if (c.vertex > static_cast<int>(positions.size()))
          throw ParseError(path, line, "vertex index " + std::to_string(c.vertex) +
                                           " exceeds vertex count");
        if (c.uv > static_cast<int>(uv_records.size()))
          throw ParseError(path, line,
                           "texture index " + std::to_string(c.uv) + " exceeds vt count");
      }
      for (size_t k = 1; k + 1 < poly.size(); ++k)
        corners.push_back({poly[0], poly[k], poly[k + 1]});
    }
    // other tags (mtllib, usemtl, g, o, s, ...) are ignored
  }
  if (positions.empty()) throw ParseError(path, line, "no vertices found");

  MatX3 vertices(positions.size(), 3);
  for (size_t i = 0; i < positions.size(); ++i) vertices.row(i) = positions[i];

  MatX3i triangles(corners.size(), 3);
  MatX2 uvs;
  const bool any_uv = !uv_records.empty();
  if (any_uv) uvs = MatX2::Zero(positions.size(), 2);
  for (size_t f = 0; f < corners.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      const FaceCorner& c = corners[f][k];
      triangles(f, k) = c.vertex - 1;
      if (any_uv && c.uv > 0) uvs.row(c.vertex - 1) = uv_records[c.uv - 1];
    }
  }
  return build_triangle_mesh(std::move(vertices), std::move(triangles), std::move(uvs));
}

TriangleMesh load_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");

  int line = 0;
  auto next_content_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line;
      const auto first = out.find_first_not_of(" \t\r\n");
      if (first == std::string::npos || out[first] == '#') continue;
      return true;
    }
    return false;
  };

  std::string s;
  if (!next_content_line(s)) throw ParseError(path, line, "empty file");
  {
    std::istringstream ls(s);
    std::string magic;
    ls >> magic;
    if (magic != "OFF") throw ParseError(path, line, "missing OFF header");
  }
  if (!next_content_line(s)) throw ParseError(path, line, "missing counts line");
  int nv = 0, nf = 0, ne = 0;
  {
    std::istringstream ls(s);
    if (!(ls >> nv >> nf >> ne)) throw ParseError(path, line, "malformed counts line");
  }
  if (nv < 3) throw ParseError(path, line, "fewer than 3 vertices");

  MatX3 vertices(nv, 3);
  for (int i = 0; i < nv; ++i) {
    if (!next_content_line(s)) throw ParseError(path, line, "unexpected end of vertex list");
    std::istringstream ls(s);
    if (!(ls >> vertices(i, 0) >> vertices(i, 1) >> vertices(i, 2)))
      throw ParseError(path, line, "malformed vertex");
  }

  std::vector<std::array<int, 3>> tris;
  for (int f = 0; f < nf; ++f) {
    if (!next_content_line(s)) throw ParseError(path, line, "unexpected end of face list");
    std::istringstream ls(s);
    int n = 0;
    if (!(ls >> n) || n < 3) throw ParseError(path, line, "malformed face");
    std::vector<int> poly(n);
    for (int k = 0; k < n; ++k) {
      if (!(ls >> poly[k])) throw ParseError(path, line, "malformed face");
      if (poly[k] < 0 || poly[k] >= nv)
        throw ParseError(path, line, "vertex index " + std::to_string(poly[k]) + " out of range");
    }
    for (int k = 1; k + 1 < n; ++k) tris.push_back({poly[0], poly[k], poly[k + 1]});
  }

  MatX3i triangles(tris.size(), 3);
  for (size_t f = 0; f < tris.size(); ++f)
    for (int k = 0; k < 3; ++k) triangles(f, k) = tris[f][k];
  return build_triangle_mesh(std::move(vertices), std::move(triangles));
}

void save_obj(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  const bool uv = mesh.has_uvs();
  for (int i = 0; i < mesh.num_vertices(); ++i)
    out << "v " << fmt_scalar(mesh.vertices(i, 0)) << ' ' << fmt_scalar(mesh.vertices(i, 1)) << ' '
        << fmt_scalar(mesh.vertices(i, 2)) << '\n';
  if (uv)
    for (int i = 0; i < mesh.num_vertices(); ++i)
      out << "vt " << fmt_scalar(mesh.uvs(i, 0)) << ' ' << fmt_scalar(mesh.uvs(i, 1)) << '\n';
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    out << 'f';
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.triangles(f, k) + 1;
      out << ' ' << v;
      if (uv) out << '/' << v;
    }
    out << '\n';
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

void save_off(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_triangles() << " 0\n";
  for (int i = 0; i < mesh.num_vertices(); ++i)
    out << fmt_scalar(mesh.vertices(i, 0)) << ' ' << fmt_scalar(mesh.vertices(i, 1)) << ' '
        << fmt_scalar(mesh.vertices(i, 2)) << '\n';
  for (int f = 0; f < mesh.num_triangles(); ++f)
    out << "3 " << mesh.triangles(f, 0) << ' ' << mesh.triangles(f, 1) << ' '
        << mesh.triangles(f, 2) << '\n';
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace

MeshFormat format_from_path(const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == "obj") return MeshFormat::Obj;
  if (ext == "off") return MeshFormat::Off;
  throw Error("cannot infer mesh format from '" + path + "' (expected .obj or .off)");
}

TriangleMesh load_mesh(const std::string& path, MeshFormat format) {
  return format == MeshFormat::Obj ? load_obj(path) : load_off(path);
}

TriangleMesh load_mesh(const std::string& path) { return load_mesh(path, format_from_path(path)); }

void save_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format,
               const VecX* scalar) {
  if (scalar && scalar->size() != mesh.num_vertices())
    throw Error("scalar field length " + std::to_string(scalar->size()) +
                " does not match vertex count " + std::to_string(mesh.num_vertices()));
  if (format == MeshFormat::Obj)
    save_obj(mesh, path);
  else
    save_off(mesh, path);
  if (scalar) save_scalar_csv(*scalar, scalar_sidecar_path(path));
}

void save_mesh(const TriangleMesh& mesh, const std::string& path, const VecX* scalar) {
  save_mesh(mesh, path, format_from_path(path), scalar);
}

std::string scalar_sidecar_path(const std::string& mesh_path) { return mesh_path + ".v.csv"; }

void save_scalar_csv(const VecX& values, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  for (Eigen::Index i = 0; i < values.size(); ++i) out << fmt_scalar(values[i]) << '\n';
  if (!out) throw Error("write failed for '" + path + "'");
}

VecX load_scalar_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::vector<Scalar> values;
  std::string line_str;
  int line = 0;
  while (std::getline(in, line_str)) {
    ++line;
    if (line_str.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      values.push_back(std::stod(line_str));
    } catch (const std::exception&) {
      throw ParseError(path, line, "bad scalar '" + line_str + "'");
    }
  }
  return Eigen::Map<VecX>(values.data(), values.size());
}

}  // namespace atmesh
