#include "atmesh/geometry.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace atmesh {

namespace {

constexpr Scalar kPi = 3.14159265358979323846;

// Deterministic standard normals: mt19937_64 + Box-Muller (library
// distributions are not pinned across implementations).
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

  Scalar operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    Scalar u1 = uniform01();
    while (u1 <= 0) u1 = uniform01();
    const Scalar u2 = uniform01();
    const Scalar r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  Scalar uniform01() {
    return static_cast<Scalar>(rng_() >> 11) * 0x1.0p-53;  // [0,1)
  }
  std::mt19937_64 rng_;
  Scalar spare_ = 0;
  bool have_spare_ = false;
};

Scalar uniform01(std::mt19937_64& rng) { return static_cast<Scalar>(rng() >> 11) * 0x1.0p-53; }

// Ericson-style closest point on triangle abc.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const Scalar d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;

  const Vec3 bp = p - b;
  const Scalar d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;

  const Scalar vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;

  const Vec3 cp = p - c;
  const Scalar d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;

  const Scalar vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;

  const Scalar va = d3 * d6 - d5 * d4;
  if (va <= 0 && d4 - d3 >= 0 && d5 - d6 >= 0) {
    const Scalar w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + w * (c - b);
  }

  const Scalar denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

// Flat AABB tree over triangles, median split on the longest axis.
class TriangleBvh {
 public:
  explicit TriangleBvh(const TriangleMesh& mesh) : mesh_(mesh) {
    const int nf = mesh.num_triangles();
    order_.resize(nf);
    std::iota(order_.begin(), order_.end(), 0);
    centroids_.resize(nf, 3);
    for (int f = 0; f < nf; ++f)
      centroids_.row(f) = (mesh.vertices.row(mesh.triangles(f, 0)) +
                           mesh.vertices.row(mesh.triangles(f, 1)) +
                           mesh.vertices.row(mesh.triangles(f, 2))) /
                          3.0;
    nodes_.reserve(2 * nf);
    build(0, nf);
  }

  Scalar squared_distance(const Vec3& p, Vec3* closest = nullptr) const {
    Scalar best = std::numeric_limits<Scalar>::max();
    Vec3 best_point = Vec3::Zero();
    std::vector<int> stack{0};
    while (!stack.empty()) {
      const Node& node = nodes_[stack.back()];
      stack.pop_back();
      if (box_sq_distance(node, p) >= best) continue;
      if (node.count > 0) {
        for (int i = node.first; i < node.first + node.count; ++i) {
          const int f = order_[i];
          const Vec3 q = closest_point_on_triangle(p, mesh_.vertices.row(mesh_.triangles(f, 0)),
                                                   mesh_.vertices.row(mesh_.triangles(f, 1)),
                                                   mesh_.vertices.row(mesh_.triangles(f, 2)));
          const Scalar d = (q - p).squaredNorm();
          if (d < best) {
            best = d;
            best_point = q;
          }
        }
      } else {
        stack.push_back(node.left);
        stack.push_back(node.right);
      }
    }
    if (closest) *closest = best_point;
    return best;
  }

 private:
  struct Node {
    Vec3 lo, hi;
    int first = 0, count = 0;  // count > 0: leaf over order_[first..first+count)
    int left = 0, right = 0;   // children when internal
  };

  int build(int begin, int end) {
    const int idx = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    Vec3 lo = Vec3::Constant(std::numeric_limits<Scalar>::max());
    Vec3 hi = Vec3::Constant(std::numeric_limits<Scalar>::lowest());
    for (int i = begin; i < end; ++i) {
      const int f = order_[i];
      for (int k = 0; k < 3; ++k) {
        const Vec3 v = mesh_.vertices.row(mesh_.triangles(f, k));
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
      }
    }
    nodes_[idx].lo = lo;
    nodes_[idx].hi = hi;
    if (end - begin <= 4) {
      nodes_[idx].first = begin;
      nodes_[idx].count = end - begin;
      return idx;
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) { return centroids_(a, axis) < centroids_(b, axis); });
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[idx].left = left;
    nodes_[idx].right = right;
    return idx;
  }

  Scalar box_sq_distance(const Node& n, const Vec3& p) const {
    const Vec3 d = (n.lo - p).cwiseMax(p - n.hi).cwiseMax(0.0);
    return d.squaredNorm();
  }

  const TriangleMesh& mesh_;
  std::vector<int> order_;
  MatX3 centroids_;
  std::vector<Node> nodes_;
};

// Area-uniform surface samples, deterministic for a fixed seed.
std::vector<Vec3> sample_surface(const TriangleMesh& mesh, Eigen::Index count,
                                 std::uint64_t seed) {
  const VecX areas = face_areas(mesh);
  VecX cumulative(areas.size());
  std::partial_sum(areas.data(), areas.data() + areas.size(), cumulative.data());
  const Scalar total = cumulative[cumulative.size() - 1];

  std::mt19937_64 rng(seed);
  std::vector<Vec3> samples;
  samples.reserve(count);
  for (Eigen::Index s = 0; s < count; ++s) {
    const Scalar target = uniform01(rng) * total;
    const int f = static_cast<int>(
        std::lower_bound(cumulative.data(), cumulative.data() + cumulative.size(), target) -
        cumulative.data());
    const Scalar r1 = std::sqrt(uniform01(rng));
    const Scalar r2 = uniform01(rng);
    const Vec3 a = mesh.vertices.row(mesh.triangles(f, 0));
    const Vec3 b = mesh.vertices.row(mesh.triangles(f, 1));
    const Vec3 c = mesh.vertices.row(mesh.triangles(f, 2));
    samples.push_back((1 - r1) * a + r1 * (1 - r2) * b + r1 * r2 * c);
  }
  return samples;
}

}  // namespace

Vec3 face_normal(const TriangleMesh& mesh, int face) {
  const Vec3 a = mesh.vertices.row(mesh.triangles(face, 0));
  const Vec3 b = mesh.vertices.row(mesh.triangles(face, 1));
  const Vec3 c = mesh.vertices.row(mesh.triangles(face, 2));
  const Vec3 n = (b - a).cross(c - a);
  const Scalar len = n.norm();
  if (!(len > 0))
    throw MeshError("face " + std::to_string(face) + " is degenerate, no normal");
  return n / len;
}

Dual0Field3 face_normals(const TriangleMesh& mesh) {
  Dual0Field3 normals(mesh.num_triangles(), 3);
  for (int f = 0; f < mesh.num_triangles(); ++f) normals.row(f) = face_normal(mesh, f);
  return normals;
}

VecX face_areas(const TriangleMesh& mesh) {
  VecX areas(mesh.num_triangles());
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    const Vec3 a = mesh.vertices.row(mesh.triangles(f, 0));
    const Vec3 b = mesh.vertices.row(mesh.triangles(f, 1));
    const Vec3 c = mesh.vertices.row(mesh.triangles(f, 2));
    areas[f] = 0.5 * (b - a).cross(c - a).norm();
  }
  return areas;
}

Scalar total_area(const TriangleMesh& mesh) { return face_areas(mesh).sum(); }

Scalar mean_edge_length(const TriangleMesh& mesh) {
  Scalar sum = 0;
  for (int e = 0; e < mesh.num_edges(); ++e)
    sum += (mesh.vertices.row(mesh.edges(e, 0)) - mesh.vertices.row(mesh.edges(e, 1))).norm();
  return sum / mesh.num_edges();
}

Scalar bbox_diagonal(const TriangleMesh& mesh) {
  const Vec3 lo = mesh.vertices.colwise().minCoeff();
  const Vec3 hi = mesh.vertices.colwise().maxCoeff();
  return (hi - lo).norm();
}

Scalar mesh_diameter(const TriangleMesh& mesh) {
  const int nv = mesh.num_vertices();
  if (nv <= 4096) {
    Scalar best = 0;
    for (int i = 0; i < nv; ++i)
      for (int j = i + 1; j < nv; ++j)
        best = std::max(best, (mesh.vertices.row(i) - mesh.vertices.row(j)).squaredNorm());
    return std::sqrt(best);
  }
  // Farthest-point double sweep; ties break on vertex index, so the result is
  // equivariant under rigid motion.
  const Vec3 centroid = mesh.vertices.colwise().mean();
  int p = 0;
  Scalar best = -1;
  for (int i = 0; i < nv; ++i) {
    const Scalar d = (Vec3(mesh.vertices.row(i)) - centroid).squaredNorm();
    if (d > best) {
      best = d;
      p = i;
    }
  }
  Scalar diameter = 0;
  for (int sweep = 0; sweep < 4; ++sweep) {
    int q = p;
    Scalar far = -1;
    for (int i = 0; i < nv; ++i) {
      const Scalar d = (mesh.vertices.row(i) - mesh.vertices.row(p)).squaredNorm();
      if (d > far) {
        far = d;
        q = i;
      }
    }
    if (far <= diameter) break;
    diameter = far;
    p = q;
  }
  return std::sqrt(diameter);
}

MatX3 vertex_normals(const TriangleMesh& mesh) {
  MatX3 normals = MatX3::Zero(mesh.num_vertices(), 3);
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    const Vec3 a = mesh.vertices.row(mesh.triangles(f, 0));
    const Vec3 b = mesh.vertices.row(mesh.triangles(f, 1));
    const Vec3 c = mesh.vertices.row(mesh.triangles(f, 2));
    const Vec3 weighted = 0.5 * (b - a).cross(c - a);  // unit normal * area
    for (int k = 0; k < 3; ++k) normals.row(mesh.triangles(f, k)) += weighted;
  }
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const Scalar len = normals.row(i).norm();
    if (len > 0) normals.row(i) /= len;
  }
  return normals;
}

int euler_characteristic(const TriangleMesh& mesh) {
  return mesh.num_vertices() - mesh.num_edges() + mesh.num_triangles();
}

MatX3 UnitBallTransform::invert(const MatX3& pts) const {
  MatX3 out = pts / scale;
  out.rowwise() += center.transpose();
  return out;
}

std::pair<TriangleMesh, UnitBallTransform> normalize_to_unit_ball(const TriangleMesh& mesh) {
  const Vec3 lo = mesh.vertices.colwise().minCoeff();
  const Vec3 hi = mesh.vertices.colwise().maxCoeff();
  UnitBallTransform t;
  t.center = 0.5 * (lo + hi);
  MatX3 centered = mesh.vertices;
  centered.rowwise() -= t.center.transpose();
  Scalar max_norm = centered.rowwise().norm().maxCoeff();
  if (!(max_norm > 0)) throw MeshError("all vertices coincide, cannot normalize");
  centered /= max_norm;
  // One correction pass so the farthest vertex lands on the sphere exactly.
  const Scalar residual = centered.rowwise().norm().maxCoeff();
  centered /= residual;
  t.scale = 1.0 / (max_norm * residual);
  return {with_positions(mesh, std::move(centered)), t};
}

TriangleMesh add_normal_noise(const TriangleMesh& mesh, Scalar sigma, std::uint64_t seed) {
  if (sigma < 0) throw Error("noise sigma must be nonnegative");
  if (sigma == 0) return mesh;
  const Scalar amplitude = sigma * mean_edge_length(mesh);
  const MatX3 normals = vertex_normals(mesh);
  NormalSampler gauss(seed);
  MatX3 positions = mesh.vertices;
  for (int i = 0; i < mesh.num_vertices(); ++i)
    positions.row(i) += gauss() * amplitude * normals.row(i);
  return with_positions(mesh, std::move(positions));
}

TriangleMesh subdivide_midpoint(const TriangleMesh& mesh, int levels) {
  if (levels < 0) throw Error("subdivision level must be nonnegative");
  if (levels == 0) return mesh;

  TriangleMesh current = mesh;
  for (int level = 0; level < levels; ++level) {
    const int nv = current.num_vertices();
    const int ne = current.num_edges();
    const int nf = current.num_triangles();
    const bool uv = current.has_uvs();

    MatX3 vertices(nv + ne, 3);
    vertices.topRows(nv) = current.vertices;
    MatX2 uvs;
    if (uv) {
      uvs.resize(nv + ne, 2);
      uvs.topRows(nv) = current.uvs;
    }
    for (int e = 0; e < ne; ++e) {
      const int a = current.edges(e, 0), b = current.edges(e, 1);
      vertices.row(nv + e) = 0.5 * (current.vertices.row(a) + current.vertices.row(b));
      if (uv) uvs.row(nv + e) = 0.5 * (current.uvs.row(a) + current.uvs.row(b));
    }

    MatX3i triangles(4 * nf, 3);
    for (int f = 0; f < nf; ++f) {
      const int v0 = current.triangles(f, 0);
      const int v1 = current.triangles(f, 1);
      const int v2 = current.triangles(f, 2);
      const int m01 = nv + current.edge_index(v0, v1);
      const int m12 = nv + current.edge_index(v1, v2);
      const int m20 = nv + current.edge_index(v2, v0);
      triangles.row(4 * f + 0) << v0, m01, m20;
      triangles.row(4 * f + 1) << v1, m12, m01;
      triangles.row(4 * f + 2) << v2, m20, m12;
      triangles.row(4 * f + 3) << m01, m12, m20;
    }
    current = build_triangle_mesh(std::move(vertices), std::move(triangles), std::move(uvs));
  }
  return current;
}

Scalar hausdorff_rms(const TriangleMesh& a, const TriangleMesh& b, Scalar samples_per_area,
                     std::uint64_t seed) {
  const Scalar area_a = total_area(a), area_b = total_area(b);
  if (!(area_a > 0) || !(area_b > 0)) throw Error("hausdorff_rms: zero surface area");
  const auto count = [&](Scalar area) {
    return std::max<Eigen::Index>(16, static_cast<Eigen::Index>(std::llround(samples_per_area * area)));
  };

  const TriangleBvh tree_a(a), tree_b(b);
  Scalar sum_sq = 0;
  Eigen::Index n = 0;
  for (const Vec3& p : sample_surface(a, count(area_a), seed)) {
    sum_sq += tree_b.squared_distance(p);
    ++n;
  }
  for (const Vec3& p : sample_surface(b, count(area_b), seed + 1)) {
    sum_sq += tree_a.squared_distance(p);
    ++n;
  }
  return std::sqrt(sum_sq / static_cast<Scalar>(n)) / mesh_diameter(a);
}

Vec3 closest_surface_point(const TriangleMesh& mesh, const Vec3& query) {
  Vec3 closest;
  TriangleBvh(mesh).squared_distance(query, &closest);
  return closest;
}

}  // namespace atmesh
