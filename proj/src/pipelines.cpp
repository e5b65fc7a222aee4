#include "atmesh/pipelines.h"

#include "atmesh/geometry.h"
#include "atmesh/hole_fill.h"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <fstream>

namespace atmesh {

namespace {

using Clock = std::chrono::steady_clock;

Scalar seconds_since(Clock::time_point start) {
  return std::chrono::duration<Scalar>(Clock::now() - start).count();
}

Dual0Field3 renormalized_rows(const Dual0Field3& u, const Dual0Field3& fallback) {
  Dual0Field3 out = u;
  for (Eigen::Index f = 0; f < out.rows(); ++f) {
    const Scalar len = out.row(f).norm();
    if (len > 1e-12)
      out.row(f) /= len;
    else
      out.row(f) = fallback.row(f);
  }
  return out;
}

Scalar report_hausdorff(const TriangleMesh& current, const UnitBallTransform& t,
                        const TriangleMesh& reference) {
  const TriangleMesh restored = with_positions(current, t.invert(current.vertices));
  return hausdorff_rms(restored, reference, 2000.0 / total_area(restored));
}

// Splits patch-interior edges (both incident faces inside the patch) at their
// midpoints until none is longer than `target_length`. This is what gives a
// filled hole movable interior vertices; patch-boundary edges stay intact so
// the seam to the original surface remains conforming.
void refine_patch(MatX3& vertices, MatX3i& triangles, std::vector<bool>& face_mask,
                  std::vector<bool>& vertex_is_new, Scalar target_length) {
  for (int round = 0; round < 32; ++round) {
    const TriangleMesh mesh = build_triangle_mesh(vertices, triangles);

    struct Split {
      Scalar length;
      int edge;
    };
    std::vector<Split> splits;
    for (int ii = 0; ii < mesh.num_interior_edges(); ++ii) {
      const int e = mesh.interior_edges[ii];
      if (!face_mask[mesh.edge_faces(e, 0)] || !face_mask[mesh.edge_faces(e, 1)]) continue;
      const Scalar len =
          (mesh.vertices.row(mesh.edges(e, 0)) - mesh.vertices.row(mesh.edges(e, 1))).norm();
      if (len > target_length) splits.push_back({len, e});
    }
    if (splits.empty()) return;
    std::sort(splits.begin(), splits.end(), [](const Split& a, const Split& b) {
      return a.length != b.length ? a.length > b.length : a.edge < b.edge;
    });

    std::vector<bool> face_dirty(mesh.num_triangles(), false);
    std::vector<std::array<int, 3>> new_faces;
    std::vector<bool> new_mask;
    int next_vertex = mesh.num_vertices();
    std::vector<Vec3> added_vertices;

    for (const Split& s : splits) {
      const int f0 = mesh.edge_faces(s.edge, 0), f1 = mesh.edge_faces(s.edge, 1);
      if (face_dirty[f0] || face_dirty[f1]) continue;
      face_dirty[f0] = face_dirty[f1] = true;
      const int a = mesh.edges(s.edge, 0), b = mesh.edges(s.edge, 1);
      const int mid = next_vertex++;
      added_vertices.emplace_back(
          0.5 * (mesh.vertices.row(a) + mesh.vertices.row(b)));
      for (const int f : {f0, f1}) {
        // Replace vertex a (then b) by the midpoint, preserving orientation.
        const int v0 = mesh.triangles(f, 0), v1 = mesh.triangles(f, 1), v2 = mesh.triangles(f, 2);
        const auto emit = [&](int x, int y, int z) {
          new_faces.push_back({x, y, z});
          new_mask.push_back(true);
        };
        const auto replace = [&](int from) {
          std::array<int, 3> t = {v0, v1, v2};
          for (int& vi : t)
            if (vi == from) vi = mid;
          emit(t[0], t[1], t[2]);
        };
        replace(a);
        replace(b);
      }
    }

    MatX3 next_pos(next_vertex, 3);
    next_pos.topRows(mesh.num_vertices()) = mesh.vertices;
    for (size_t i = 0; i < added_vertices.size(); ++i)
      next_pos.row(mesh.num_vertices() + i) = added_vertices[i];
    vertex_is_new.resize(next_vertex, true);

    std::vector<std::array<int, 3>> faces;
    std::vector<bool> mask;
    for (int f = 0; f < mesh.num_triangles(); ++f) {
      if (face_dirty[f]) continue;
      faces.push_back({mesh.triangles(f, 0), mesh.triangles(f, 1), mesh.triangles(f, 2)});
      mask.push_back(face_mask[f]);
    }
    faces.insert(faces.end(), new_faces.begin(), new_faces.end());
    mask.insert(mask.end(), new_mask.begin(), new_mask.end());

    triangles.resize(faces.size(), 3);
    for (size_t f = 0; f < faces.size(); ++f)
      triangles.row(f) << faces[f][0], faces[f][1], faces[f][2];
    vertices = std::move(next_pos);
    face_mask = std::move(mask);
  }
}

// Longest graph distance (in edges) from any patch vertex to the hole
// boundary; feeds the eps_start floor for inpainting.
int patch_radius_in_edges(const TriangleMesh& mesh, const std::vector<bool>& vertex_is_new) {
  std::vector<std::vector<int>> adjacency(mesh.num_vertices());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    adjacency[mesh.edges(e, 0)].push_back(mesh.edges(e, 1));
    adjacency[mesh.edges(e, 1)].push_back(mesh.edges(e, 0));
  }
  std::vector<int> dist(mesh.num_vertices(), -1);
  std::deque<int> queue;
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    if (!vertex_is_new[i]) {
      dist[i] = 0;
      queue.push_back(i);
    }
  }
  int radius = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : adjacency[v]) {
      if (dist[w] != -1) continue;
      dist[w] = dist[v] + 1;
      radius = std::max(radius, dist[w]);
      queue.push_back(w);
    }
  }
  return radius;
}

}  // namespace

std::string PipelineReport::to_json() const {
  nlohmann::json j;
  j["total_seconds"] = total_seconds;
  j["stages"] = nlohmann::json::array();
  for (const PipelineStage& s : stages) {
    nlohmann::json js;
    js["iteration"] = s.iteration;
    js["at_energy_final"] = s.at_energy_final;
    js["e_m"] = s.projection.e_m;
    js["e_f"] = s.projection.e_f;
    js["e_d"] = s.projection.e_d;
    js["flipped_triangles"] = s.flipped_triangles;
    js["ms_seconds"] = s.ms_seconds;
    js["projection_seconds"] = s.proj_seconds;
    if (s.hausdorff_to_reference >= 0) js["hausdorff_to_reference"] = s.hausdorff_to_reference;
    j["stages"].push_back(js);
  }
  j["at_trace"] = nlohmann::json::array();
  for (const ATTraceRow& row : at_trace)
    j["at_trace"].push_back({{"eps", row.eps}, {"iteration", row.iteration}, {"energy", row.energy}});
  return j.dump(2);
}

std::string PipelineReport::to_csv() const {
  std::string out = "eps,iteration,energy\n";
  char buf[96];
  for (const ATTraceRow& row : at_trace) {
    std::snprintf(buf, sizeof(buf), "%.9g,%d,%.12g\n", row.eps, row.iteration, row.energy);
    out += buf;
  }
  return out;
}

void PipelineReport::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  const bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
  out << (csv ? to_csv() : to_json());
}

DenoiseResult denoise(const TriangleMesh& mesh, const ATParams& at, const ProjectionParams& proj,
                      int outer_iters, const TriangleMesh* reference, int max_flip_abort) {
  if (outer_iters < 1) throw Error("denoise: outer_iters must be at least 1");
  const auto pipeline_start = Clock::now();
  auto [current, transform] = normalize_to_unit_ball(mesh);

  DenoiseResult result;
  for (int iter = 0; iter < outer_iters; ++iter) {
    PipelineStage stage;
    stage.iteration = iter;

    auto t0 = Clock::now();
    const DecOperators ops = build_dec(current);
    const Dual0Field3 g = face_normals(current);
    ATState state = minimize_at(g, at, ops);
    stage.ms_seconds = seconds_since(t0);

    t0 = Clock::now();
    const Dual0Field3 u = renormalized_rows(state.u, g);
    const MatX3 before = current.vertices;
    ProjectionResult projected = project_vertices(current, u, state.v, proj);
    stage.proj_seconds = seconds_since(t0);

    stage.at_energy_final = state.energy_trace.empty() ? 0 : state.energy_trace.back().energy;
    stage.flipped_triangles = projected.flipped_triangles;
    if (max_flip_abort >= 0 && projected.flipped_triangles > max_flip_abort)
      throw Error("denoise: " + std::to_string(projected.flipped_triangles) +
                  " flipped triangles exceed the abort limit");
    current = std::move(projected.mesh);
    stage.projection = projection_energies(current, current.vertices, before, u, state.v);
    if (reference) stage.hausdorff_to_reference = report_hausdorff(current, transform, *reference);

    result.report.at_trace.insert(result.report.at_trace.end(), state.energy_trace.begin(),
                                  state.energy_trace.end());
    result.report.stages.push_back(stage);
    result.v = std::move(state.v);
  }

  result.mesh = with_positions(current, transform.invert(current.vertices));
  result.report.total_seconds = seconds_since(pipeline_start);
  return result;
}

std::vector<int> extract_feature_edges(const Primal0Form& v, const TriangleMesh& mesh,
                                       Scalar threshold) {
  if (v.size() != mesh.num_vertices())
    throw Error("extract_feature_edges: v length != vertex count");
  const VecX vc = v.cwiseMax(0.0).cwiseMin(1.0);
  std::vector<int> edges;
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (vc[mesh.edges(e, 0)] < threshold && vc[mesh.edges(e, 1)] < threshold) edges.push_back(e);
  return edges;
}

SegmentResult segment(const TriangleMesh& mesh, const ATParams& at) {
  auto [normalized, transform] = normalize_to_unit_ball(mesh);
  (void)transform;  // labels are frame-independent
  const DecOperators ops = build_dec(normalized);
  const Dual0Field3 g = face_normals(normalized);
  ATState state = minimize_at(g, at, ops);

  SegmentResult result;
  result.v = state.v.cwiseMax(0.0).cwiseMin(1.0);
  const Dual0Field3 u = renormalized_rows(state.u, g);
  result.probabilities = edge_split_probabilities(result.v, u, normalized);
  result.segmentation = solve_multicut(make_face_graph(normalized, result.probabilities));
  return result;
}

InpaintResult inpaint(const TriangleMesh& mesh, ATParams at, ProjectionParams proj,
                      int passes) {
  if (passes < 1) throw Error("inpaint: passes must be at least 1");
  HoleFillResult filled = fill_holes(mesh);
  if (std::none_of(filled.new_face_mask.begin(), filled.new_face_mask.end(),
                   [](bool b) { return b; }))
    throw Error("inpaint: no holes found");

  const Scalar target = mean_edge_length(mesh);
  MatX3 vertices = filled.mesh.vertices;
  MatX3i triangles = filled.mesh.triangles;
  std::vector<bool> face_mask = filled.new_face_mask;
  std::vector<bool> vertex_is_new(filled.mesh.num_vertices(), false);
  refine_patch(vertices, triangles, face_mask, vertex_is_new, target);

  const TriangleMesh work = build_triangle_mesh(std::move(vertices), std::move(triangles));
  auto [current, transform] = normalize_to_unit_ball(work);

  // Pin the known surface, release the patch. Inside the patch the normals of
  // the minimum-area fill are fabricated data: a deep chamfer across a crease
  // would be defended by a full-strength alpha, so the patch gets 1% of it
  // and u is driven by propagation from the rim plus the feature field.
  at.alpha_face_mask = VecX::Ones(current.num_triangles());
  for (int f = 0; f < current.num_triangles(); ++f)
    at.alpha_face_mask[f] = face_mask[f] ? 0.01 : 1000.0 / at.alpha;
  at.lambda_vertex_scale = VecX::Ones(current.num_vertices());
  for (int i = 0; i < current.num_vertices(); ++i)
    if (vertex_is_new[i]) at.lambda_vertex_scale[i] = 0.1;
  at.lambda_edge_scale = VecX::Ones(current.num_edges());
  for (int e = 0; e < current.num_edges(); ++e)
    if (vertex_is_new[current.edges(e, 0)] && vertex_is_new[current.edges(e, 1)])
      at.lambda_edge_scale[e] = 0.1;
  at.eps_start = std::max<Scalar>(at.eps_start, patch_radius_in_edges(current, vertex_is_new));

  proj.w2_vertex_mask = VecX::Zero(current.num_vertices());
  for (int i = 0; i < current.num_vertices(); ++i)
    if (!vertex_is_new[i]) proj.w2_vertex_mask[i] = 1000.0 / proj.w2;

  InpaintResult result;
  const auto start = Clock::now();
  for (int pass = 0; pass < passes; ++pass) {
    PipelineStage stage;
    stage.iteration = pass;
    auto t0 = Clock::now();
    const DecOperators ops = build_dec(current);
    const Dual0Field3 g = face_normals(current);
    ATState state = minimize_at(g, at, ops);
    stage.ms_seconds = seconds_since(t0);

    t0 = Clock::now();
    const Dual0Field3 u = renormalized_rows(state.u, g);
    ProjectionResult projected = project_vertices(current, u, state.v, proj);
    stage.proj_seconds = seconds_since(t0);
    stage.at_energy_final = state.energy_trace.empty() ? 0 : state.energy_trace.back().energy;
    stage.flipped_triangles = projected.flipped_triangles;
    current = std::move(projected.mesh);

    result.report.at_trace.insert(result.report.at_trace.end(), state.energy_trace.begin(),
                                  state.energy_trace.end());
    result.report.stages.push_back(stage);
    result.v = std::move(state.v);
  }
  result.report.total_seconds = seconds_since(start);
  result.patch_faces = face_mask;
  result.patch_vertices = vertex_is_new;
  result.mesh = with_positions(current, transform.invert(current.vertices));
  return result;
}

TriangleMesh emboss(const TriangleMesh& mesh, const NormalMap& map, int levels,
                    const ProjectionParams& proj) {
  if (!mesh.has_uvs()) throw MeshError("emboss: mesh has no UVs");
  const TriangleMesh subdivided = subdivide_midpoint(mesh, levels);
  auto [current, transform] = normalize_to_unit_ball(subdivided);

  const std::vector<Mat3> frames = face_tangent_frames(current);
  Dual0Field3 u(current.num_triangles(), 3);
  for (int f = 0; f < current.num_triangles(); ++f) {
    const Vec2 uv = (current.uvs.row(current.triangles(f, 0)) +
                     current.uvs.row(current.triangles(f, 1)) +
                     current.uvs.row(current.triangles(f, 2))) /
                    3.0;
    u.row(f) = decode_normal(map, uv, frames[f]);
  }

  const Primal0Form ones = VecX::Ones(current.num_vertices());
  ProjectionResult projected = project_vertices(current, u, ones, proj);
  return with_positions(projected.mesh, transform.invert(projected.mesh.vertices));
}

int thread_cap() {
  const char* env = std::getenv("ATMESH_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

}  // namespace atmesh
