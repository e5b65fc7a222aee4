#include "atmesh/normal_map.h"

#include "atmesh/geometry.h"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace atmesh {

namespace {

int skip_ppm_whitespace(std::istream& in) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  return c;
}

int read_ppm_int(std::istream& in, const std::string& path) {
  int c = skip_ppm_whitespace(in);
  if (c == EOF || !std::isdigit(c)) throw Error("malformed PPM header in '" + path + "'");
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    c = in.get();
  }
  return value;
}

// Completes T into an orthonormal (T,B,N) frame; falls back to an arbitrary
// tangent when T is unusable.
Mat3 orthonormal_frame(Vec3 tangent, const Vec3& normal) {
  tangent -= tangent.dot(normal) * normal;
  const Scalar len = tangent.norm();
  if (len < 1e-12) {
    const Vec3 axis = std::abs(normal.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    tangent = axis - axis.dot(normal) * normal;
    tangent.normalize();
  } else {
    tangent /= len;
  }
  Mat3 frame;
  frame.col(0) = tangent;
  frame.col(1) = normal.cross(tangent);
  frame.col(2) = normal;
  return frame;
}

Vec3 uv_tangent(const TriangleMesh& mesh, int f) {
  const Vec3 p0 = mesh.vertices.row(mesh.triangles(f, 0));
  const Vec3 p1 = mesh.vertices.row(mesh.triangles(f, 1));
  const Vec3 p2 = mesh.vertices.row(mesh.triangles(f, 2));
  const Vec2 t0 = mesh.uvs.row(mesh.triangles(f, 0));
  const Vec2 t1 = mesh.uvs.row(mesh.triangles(f, 1));
  const Vec2 t2 = mesh.uvs.row(mesh.triangles(f, 2));
  const Vec2 duv1 = t1 - t0, duv2 = t2 - t0;
  const Scalar det = duv1.x() * duv2.y() - duv2.x() * duv1.y();
  if (std::abs(det) < 1e-20) return Vec3::Zero();
  return ((p1 - p0) * duv2.y() - (p2 - p0) * duv1.y()) / det;
}

}  // namespace

NormalMap load_ppm(const std::string& path, NormalMap::Space space) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '6') throw Error("'" + path + "' is not a binary PPM (P6)");

  NormalMap map;
  map.space = space;
  map.width = read_ppm_int(in, path);
  map.height = read_ppm_int(in, path);
  const int maxval = read_ppm_int(in, path);
  if (map.width <= 0 || map.height <= 0) throw Error("bad PPM dimensions in '" + path + "'");
  if (maxval != 255) throw Error("unsupported PPM maxval " + std::to_string(maxval));
  // the header ends with exactly one whitespace byte, consumed by read_ppm_int

  map.pixels.resize(static_cast<size_t>(3) * map.width * map.height);
  in.read(reinterpret_cast<char*>(map.pixels.data()), map.pixels.size());
  if (in.gcount() != static_cast<std::streamsize>(map.pixels.size()))
    throw Error("truncated PPM raster in '" + path + "'");
  return map;
}

void save_ppm(const NormalMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "P6\n" << map.width << ' ' << map.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(map.pixels.data()), map.pixels.size());
  if (!out) throw Error("write failed for '" + path + "'");
}

Vec3 sample_bilinear(const NormalMap& map, const Vec2& uv) {
  const auto texel = [&](int x, int y) {
    x = std::clamp(x, 0, map.width - 1);
    y = std::clamp(y, 0, map.height - 1);
    const size_t base = 3 * (static_cast<size_t>(y) * map.width + x);
    return Vec3(map.pixels[base], map.pixels[base + 1], map.pixels[base + 2]);
  };
  const Scalar fx = uv.x() * map.width - 0.5;
  const Scalar fy = uv.y() * map.height - 0.5;
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const Scalar ax = fx - x0, ay = fy - y0;
  return (1 - ax) * (1 - ay) * texel(x0, y0) + ax * (1 - ay) * texel(x0 + 1, y0) +
         (1 - ax) * ay * texel(x0, y0 + 1) + ax * ay * texel(x0 + 1, y0 + 1);
}

Vec3 decode_normal(const NormalMap& map, const Vec2& uv, const Mat3& frame) {
  const Vec3 rgb = sample_bilinear(map, uv);
  Vec3 n = 2.0 / 255.0 * rgb - Vec3::Ones();
  if (map.space == NormalMap::Space::Tangent) n = frame * n;
  const Scalar len = n.norm();
  if (!(len > 0)) throw Error("normal map decodes to a zero vector");
  return n / len;
}

std::vector<Mat3> face_tangent_frames(const TriangleMesh& mesh) {
  if (!mesh.has_uvs()) throw MeshError("mesh has no UVs, cannot build tangent frames");
  std::vector<Mat3> frames(mesh.num_triangles());
  for (int f = 0; f < mesh.num_triangles(); ++f)
    frames[f] = orthonormal_frame(uv_tangent(mesh, f), face_normal(mesh, f));
  return frames;
}

std::vector<Mat3> vertex_tangent_frames(const TriangleMesh& mesh) {
  if (!mesh.has_uvs()) throw MeshError("mesh has no UVs, cannot build tangent frames");
  const VecX areas = face_areas(mesh);
  MatX3 tangents = MatX3::Zero(mesh.num_vertices(), 3);
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    const Vec3 t = uv_tangent(mesh, f) * areas[f];
    for (int k = 0; k < 3; ++k) tangents.row(mesh.triangles(f, k)) += t;
  }
  const MatX3 normals = vertex_normals(mesh);
  std::vector<Mat3> frames(mesh.num_vertices());
  for (int i = 0; i < mesh.num_vertices(); ++i)
    frames[i] = orthonormal_frame(tangents.row(i), normals.row(i));
  return frames;
}

}  // namespace atmesh
