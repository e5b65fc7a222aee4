#pragma once

#include "atmesh/at_solver.h"
#include "atmesh/multicut.h"
#include "atmesh/normal_map.h"
#include "atmesh/projection.h"

namespace atmesh {

/// Per-iteration record of a pipeline run.
struct PipelineStage {
  int iteration = 0;
  Scalar at_energy_final = 0;
  ProjectionEnergies projection;
  int flipped_triangles = 0;
  Scalar ms_seconds = 0;    // AT minimization time
  Scalar proj_seconds = 0;  // vertex projection time
  Scalar hausdorff_to_reference = -1;  // -1 when no reference mesh was given
};

struct PipelineReport {
  std::vector<PipelineStage> stages;
  std::vector<ATTraceRow> at_trace;  // concatenated across iterations
  Scalar total_seconds = 0;

  std::string to_json() const;
  std::string to_csv() const;
  void save(const std::string& path) const;  // .json or .csv by extension
};

struct DenoiseResult {
  TriangleMesh mesh;
  Primal0Form v;  // unclamped feature field from the last iteration
  PipelineReport report;
};

/// Alternates AT minimization of the face normal field with vertex
/// projection, `outer_iters` times, inside the unit ball (the input frame is
/// restored on output). `reference` enables per-iteration Hausdorff tracking.
/// `max_flip_abort` >= 0 aborts when more triangles flip in one projection.
DenoiseResult denoise(const TriangleMesh& mesh, const ATParams& at, const ProjectionParams& proj,
                      int outer_iters = 4, const TriangleMesh* reference = nullptr,
                      int max_flip_abort = -1);

/// Edges whose both endpoint feature values fall below `threshold`.
std::vector<int> extract_feature_edges(const Primal0Form& v, const TriangleMesh& mesh,
                                       Scalar threshold = 0.5);

struct SegmentResult {
  Segmentation segmentation;
  VecX probabilities;  // per interior edge
  Primal0Form v;
};

/// AT on the face normals, then minimum multicut of the face graph.
SegmentResult segment(const TriangleMesh& mesh, const ATParams& at);

struct InpaintResult {
  TriangleMesh mesh;
  Primal0Form v;
  std::vector<bool> patch_faces;      // mask over output faces
  std::vector<bool> patch_vertices;   // mask over output vertices
  PipelineReport report;
};

/// Fills every hole, refines the patch to the surrounding edge density, and
/// runs AT + projection with the data terms pinned outside the patch
/// (alpha and w2 effectively 1000), released inside (w2 = 0) and with the
/// discontinuity penalty lambda reduced to a tenth on patch entities.
/// `passes` repeats the AT + projection pair on the recovered geometry.
InpaintResult inpaint(const TriangleMesh& mesh, ATParams at, ProjectionParams proj,
                      int passes = 1);

/// Midpoint-subdivides `levels` times, targets per-face normals sampled from
/// the map at each face's UV centroid, then projects vertices (v = 1).
TriangleMesh emboss(const TriangleMesh& mesh, const NormalMap& map, int levels,
                    const ProjectionParams& proj);

/// Stage-parallelism cap from ATMESH_THREADS (>= 1); stages currently run on
/// a single thread, which always honors the cap.
int thread_cap();

}  // namespace atmesh
