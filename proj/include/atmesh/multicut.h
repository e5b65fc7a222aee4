#pragma once

#include "atmesh/mesh.h"

namespace atmesh {

/// Face adjacency graph: one node per face, one arc per interior mesh edge.
/// Arc cost is the log-odds of the split probability, so positive cost =
/// repulsive (wants cutting) and negative = attractive.
struct FaceGraph {
  struct Arc {
    int a = 0;
    int b = 0;
    Scalar cost = 0;
    int edge = 0;  // interior edge index in the source mesh
  };
  int num_nodes = 0;
  std::vector<Arc> arcs;
};

struct Segmentation {
  VecXi labels;                // per face, 0..num_segments-1
  int num_segments = 0;
  std::vector<int> cut_edges;  // mesh edge indices whose faces differ in label
};

constexpr Scalar kProbFloor = 0.001;
constexpr Scalar kProbCeil = 0.999;
constexpr Scalar kNormalAgreementDegrees = 5.0;

/// Per-interior-edge split probability: mean of 1-v over the edge endpoints,
/// forced to kProbFloor when the two incident face normals agree within 5
/// degrees, then clamped into [kProbFloor, kProbCeil].
VecX edge_split_probabilities(const Primal0Form& v_clamped, const Dual0Field3& u,
                              const TriangleMesh& mesh);

/// Graph over `mesh` faces with log-odds costs from `probabilities`
/// (one entry per interior edge, in interior-edge order).
FaceGraph make_face_graph(const TriangleMesh& mesh, const VecX& probabilities);

/// Sum of -cost over arcs whose endpoints carry different labels.
Scalar multicut_objective(const FaceGraph& graph, const VecXi& labels);

/// Greedy additive edge contraction (most negative aggregate cost first)
/// followed by local node moves and segment joins until no move improves.
/// Deterministic; segments are connected; cut_edges needs the mesh the graph
/// was built from, so labels/K are filled here and cut edges by `segment_cuts`.
Segmentation solve_multicut(const FaceGraph& graph);

/// Fills `cut_edges` from labels (arcs whose endpoints differ).
void segment_cuts(const FaceGraph& graph, Segmentation& segmentation);

}  // namespace atmesh
