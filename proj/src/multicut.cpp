#include "atmesh/multicut.h"

#include "atmesh/geometry.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace atmesh {

VecX edge_split_probabilities(const Primal0Form& v_clamped, const Dual0Field3& u,
                              const TriangleMesh& mesh) {
  if (v_clamped.size() != mesh.num_vertices())
    throw Error("edge_split_probabilities: v length != vertex count");
  if (u.rows() != mesh.num_triangles())
    throw Error("edge_split_probabilities: u row count != face count");

  const Scalar cos_agree = std::cos(kNormalAgreementDegrees * M_PI / 180.0);
  VecX probabilities(mesh.num_interior_edges());
  for (int i = 0; i < mesh.num_interior_edges(); ++i) {
    const int e = mesh.interior_edges[i];
    Scalar p = 0.5 * ((1.0 - v_clamped[mesh.edges(e, 0)]) + (1.0 - v_clamped[mesh.edges(e, 1)]));
    const Vec3 na = u.row(mesh.edge_faces(e, 0)).normalized();
    const Vec3 nb = u.row(mesh.edge_faces(e, 1)).normalized();
    if (na.dot(nb) >= cos_agree) p = kProbFloor;  // normals agree within 5 degrees
    probabilities[i] = std::clamp(p, kProbFloor, kProbCeil);
  }
  return probabilities;
}

FaceGraph make_face_graph(const TriangleMesh& mesh, const VecX& probabilities) {
  if (probabilities.size() != mesh.num_interior_edges())
    throw Error("make_face_graph: one probability per interior edge required");
  FaceGraph graph;
  graph.num_nodes = mesh.num_triangles();
  graph.arcs.reserve(mesh.num_interior_edges());
  for (int i = 0; i < mesh.num_interior_edges(); ++i) {
    const int e = mesh.interior_edges[i];
    const Scalar p = probabilities[i];
    graph.arcs.push_back(
        {mesh.edge_faces(e, 0), mesh.edge_faces(e, 1), std::log(p / (1.0 - p)), e});
  }
  return graph;
}

Scalar multicut_objective(const FaceGraph& graph, const VecXi& labels) {
  Scalar objective = 0;
  for (const FaceGraph::Arc& arc : graph.arcs)
    if (labels[arc.a] != labels[arc.b]) objective -= arc.cost;
  return objective;
}

namespace {

// Aggregated cost between two clusters, keyed by (min,max) cluster id.
using PairCosts = std::map<std::pair<int, int>, Scalar>;

std::pair<int, int> key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

VecXi relabel_consecutive(const VecXi& raw, int* count) {
  std::map<int, int> dense;
  VecXi labels(raw.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    auto [it, inserted] = dense.emplace(raw[i], static_cast<int>(dense.size()));
    labels[i] = it->second;
  }
  *count = static_cast<int>(dense.size());
  return labels;
}

// Connected components of same-label nodes through the arcs; same objective,
// restores the "segments are connected" invariant after local moves.
VecXi split_disconnected(const FaceGraph& graph, const VecXi& labels, int* count) {
  std::vector<std::vector<int>> adjacency(graph.num_nodes);
  for (const auto& arc : graph.arcs) {
    if (labels[arc.a] != labels[arc.b]) continue;
    adjacency[arc.a].push_back(arc.b);
    adjacency[arc.b].push_back(arc.a);
  }
  VecXi out = VecXi::Constant(graph.num_nodes, -1);
  int next = 0;
  std::vector<int> stack;
  for (int seed = 0; seed < graph.num_nodes; ++seed) {
    if (out[seed] != -1) continue;
    stack.push_back(seed);
    out[seed] = next;
    while (!stack.empty()) {
      const int n = stack.back();
      stack.pop_back();
      for (int m : adjacency[n])
        if (out[m] == -1) {
          out[m] = next;
          stack.push_back(m);
        }
    }
    ++next;
  }
  *count = next;
  return out;
}

}  // namespace

Segmentation solve_multicut(const FaceGraph& graph) {
  const int n = graph.num_nodes;

  // Union-find over clusters.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  PairCosts costs;
  std::vector<std::set<int>> neighbors(n);
  for (const auto& arc : graph.arcs) {
    if (arc.a == arc.b) continue;
    costs[key(arc.a, arc.b)] += arc.cost;
    neighbors[arc.a].insert(arc.b);
    neighbors[arc.b].insert(arc.a);
  }

  // Greedy additive edge contraction: repeatedly merge the cluster pair with
  // the most negative aggregate cost (ties: smallest pair key).
  while (true) {
    auto best = costs.end();
    for (auto it = costs.begin(); it != costs.end(); ++it)
      if (it->second < 0 && (best == costs.end() || it->second < best->second)) best = it;
    if (best == costs.end()) break;

    const auto [keep, absorb] = best->first;
    parent[find(absorb)] = find(keep);
    for (int other : neighbors[absorb]) {
      if (other == keep) continue;
      costs[key(keep, other)] += costs[key(absorb, other)];
      costs.erase(key(absorb, other));
      neighbors[other].erase(absorb);
      neighbors[other].insert(keep);
      neighbors[keep].insert(other);
    }
    neighbors[keep].erase(absorb);
    neighbors[absorb].clear();
    costs.erase(best->first);
  }

  VecXi labels(n);
  for (int i = 0; i < n; ++i) labels[i] = find(i);

  // Local refinement: single-node moves (to neighboring segments or into a
  // fresh singleton) and pairwise segment joins, best strict improvement
  // first, until a fixed point. Run from the GAEC solution plus the two
  // trivial partitions and keep the best result.
  std::vector<std::vector<std::pair<int, Scalar>>> node_arcs(n);
  for (const auto& arc : graph.arcs) {
    if (arc.a == arc.b) continue;
    node_arcs[arc.a].emplace_back(arc.b, arc.cost);
    node_arcs[arc.b].emplace_back(arc.a, arc.cost);
  }

  const auto refine = [&](VecXi labels) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int node = 0; node < n; ++node) {
        // Gain of moving `node` into label L: arcs to L become uncut
        // (objective += cost), arcs to the old label become cut (objective -= cost).
        std::map<int, Scalar> to_label;
        Scalar to_current = 0;
        for (const auto& [other, cost] : node_arcs[node]) {
          if (labels[other] == labels[node])
            to_current += cost;
          else
            to_label[labels[other]] += cost;
        }
        int best_label = labels[node];
        Scalar best_delta = -1e-12;  // strict improvement only
        for (const auto& [label, cost_sum] : to_label) {
          const Scalar delta = cost_sum - to_current;  // change in objective
          if (delta < best_delta) {
            best_delta = delta;
            best_label = label;
          }
        }
        // Splitting into a fresh singleton cuts the node's same-label arcs.
        if (-to_current < best_delta) {
          best_delta = -to_current;
          best_label = n + node;  // unused label id, made consecutive at the end
        }
        if (best_label != labels[node]) {
          labels[node] = best_label;
          improved = true;
        }
      }

      // Segment-pair joins.
      std::map<std::pair<int, int>, Scalar> boundary;
      for (const auto& arc : graph.arcs)
        if (labels[arc.a] != labels[arc.b]) boundary[key(labels[arc.a], labels[arc.b])] += arc.cost;
      auto best = boundary.end();
      for (auto it = boundary.begin(); it != boundary.end(); ++it)
        if (it->second < -1e-12 && (best == boundary.end() || it->second < best->second)) best = it;
      if (best != boundary.end()) {
        const auto [into, from] = best->first;
        for (int i = 0; i < n; ++i)
          if (labels[i] == from) labels[i] = into;
        improved = true;
      }
    }
    return labels;
  };

  labels = refine(labels);
  Scalar best_objective = multicut_objective(graph, labels);
  VecXi singletons(n);
  std::iota(singletons.data(), singletons.data() + n, 0);
  for (const VecXi& start : {VecXi(VecXi::Zero(n)), singletons}) {
    const VecXi candidate = refine(start);
    const Scalar objective = multicut_objective(graph, candidate);
    if (objective < best_objective - 1e-12) {
      best_objective = objective;
      labels = candidate;
    }
  }

  Segmentation seg;
  int count = 0;
  const VecXi components = split_disconnected(graph, labels, &count);
  seg.labels = relabel_consecutive(components, &seg.num_segments);
  segment_cuts(graph, seg);
  return seg;
}

void segment_cuts(const FaceGraph& graph, Segmentation& segmentation) {
  segmentation.cut_edges.clear();
  for (const auto& arc : graph.arcs)
    if (segmentation.labels[arc.a] != segmentation.labels[arc.b])
      segmentation.cut_edges.push_back(arc.edge);
}

}  // namespace atmesh
