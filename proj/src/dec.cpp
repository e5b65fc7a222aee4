#include "atmesh/dec.h"

#include "atmesh/geometry.h"

#include <cmath>
#include <sstream>

namespace atmesh {

namespace {

Scalar cotangent(const Vec3& at, const Vec3& to_a, const Vec3& to_b) {
  const Vec3 u = to_a - at, v = to_b - at;
  const Scalar cross = u.cross(v).norm();
  if (!(cross > 0)) throw MeshError("degenerate corner while building DEC operators");
  return u.dot(v) / cross;
}

}  // namespace

DecOperators build_dec(const TriangleMesh& mesh) {
  const int nv = mesh.num_vertices();
  const int ne = mesh.num_edges();
  const int nf = mesh.num_triangles();
  const int ni = mesh.num_interior_edges();

  DecOperators ops;
  ops.interior_edges = mesh.interior_edges;
  ops.mean_edge = mean_edge_length(mesh);

  std::vector<Triplet> ta, tm, tb, tmi;
  ta.reserve(2 * ne);
  tm.reserve(2 * ne);
  tb.reserve(2 * ni);
  tmi.reserve(2 * ni);
  for (int e = 0; e < ne; ++e) {
    const int lo = mesh.edges(e, 0), hi = mesh.edges(e, 1);
    ta.emplace_back(e, lo, -1.0);
    ta.emplace_back(e, hi, 1.0);
    tm.emplace_back(e, lo, 0.5);
    tm.emplace_back(e, hi, 0.5);
  }
  for (int i = 0; i < ni; ++i) {
    const int e = mesh.interior_edges[i];
    tb.emplace_back(i, mesh.edge_faces(e, 0), 1.0);   // left of lo->hi
    tb.emplace_back(i, mesh.edge_faces(e, 1), -1.0);  // right of lo->hi
    tmi.emplace_back(i, mesh.edges(e, 0), 0.5);
    tmi.emplace_back(i, mesh.edges(e, 1), 0.5);
  }
  ops.A = assemble(ta, ne, nv);
  ops.M = assemble(tm, ne, nv);
  ops.B = assemble(tb, ni, nf);
  ops.M_int = assemble(tmi, ni, nv);

  ops.S0bar = face_areas(mesh);

  // Half cotan weights per edge: one term per incident face.
  ops.S1.resize(ne);
  for (int e = 0; e < ne; ++e) {
    const Vec3 pi = mesh.vertices.row(mesh.edges(e, 0));
    const Vec3 pj = mesh.vertices.row(mesh.edges(e, 1));
    Scalar w = 0;
    for (int side = 0; side < 2; ++side) {
      if (mesh.edge_faces(e, side) == -1) continue;
      const Vec3 po = mesh.vertices.row(mesh.edge_opposite(e, side));
      w += 0.5 * cotangent(po, pi, pj);
    }
    ops.S1[e] = std::max(w, kHodgeClamp);
  }
  ops.S1bar.resize(ni);
  for (int i = 0; i < ni; ++i)
    ops.S1bar[i] = std::min(1.0 / ops.S1[mesh.interior_edges[i]], kDualRatioCap);

  // Circumcentric (signed Voronoi) vertex areas: each corner collects
  // 1/8 |e|^2 cot(opposite angle) for its two incident edges.
  ops.S0 = VecX::Zero(nv);
  for (int f = 0; f < nf; ++f) {
    const int v0 = mesh.triangles(f, 0), v1 = mesh.triangles(f, 1), v2 = mesh.triangles(f, 2);
    const Vec3 p0 = mesh.vertices.row(v0);
    const Vec3 p1 = mesh.vertices.row(v1);
    const Vec3 p2 = mesh.vertices.row(v2);
    const Scalar cot0 = cotangent(p0, p1, p2);
    const Scalar cot1 = cotangent(p1, p2, p0);
    const Scalar cot2 = cotangent(p2, p0, p1);
    const Scalar sq01 = (p1 - p0).squaredNorm();
    const Scalar sq12 = (p2 - p1).squaredNorm();
    const Scalar sq20 = (p0 - p2).squaredNorm();
    ops.S0[v0] += 0.125 * (sq01 * cot2 + sq20 * cot1);
    ops.S0[v1] += 0.125 * (sq01 * cot2 + sq12 * cot0);
    ops.S0[v2] += 0.125 * (sq20 * cot1 + sq12 * cot0);
  }
  const Scalar area_floor = kHodgeClamp * ops.S0bar.mean();
  for (int i = 0; i < nv; ++i) ops.S0[i] = std::max(ops.S0[i], area_floor);

  return ops;
}

bool DecReport::all_pass() const {
  for (const DecCheck& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string DecReport::to_string() const {
  std::ostringstream out;
  for (const DecCheck& c : checks) {
    out << (c.pass ? "pass" : "FAIL") << "  " << c.name;
    std::ostringstream v;
    v << c.violation;
    out << "  (max violation " << v.str() << ")\n";
  }
  return out.str();
}

DecReport verify_dec(const DecOperators& ops, const TriangleMesh& mesh) {
  DecReport report;
  const auto add = [&](const std::string& name, Scalar violation, Scalar tol) {
    report.checks.push_back({name, violation <= tol, violation});
  };

  const int nv = mesh.num_vertices();
  const int ne = mesh.num_edges();
  const int ni = mesh.num_interior_edges();

  // A: two entries per row, -1 at lo / +1 at hi.
  Scalar worst = 0;
  bool structure_ok = ops.A.rows() == ne && ops.A.cols() == nv;
  for (int e = 0; e < ne && structure_ok; ++e) {
    int count = 0;
    Scalar lo_val = 0, hi_val = 0;
    for (SpMat::InnerIterator it(ops.A, e); it; ++it) {
      ++count;
      if (it.col() == mesh.edges(e, 0)) lo_val = it.value();
      if (it.col() == mesh.edges(e, 1)) hi_val = it.value();
    }
    if (count != 2) structure_ok = false;
    worst = std::max({worst, std::abs(lo_val + 1.0), std::abs(hi_val - 1.0)});
  }
  add("A row structure (-1 lo, +1 hi)", structure_ok ? worst : 1.0, 0.0);

  add("A annihilates constants", (ops.A * VecX::Ones(nv)).cwiseAbs().maxCoeff(), 0.0);

  // B: two entries per interior-edge row, +1 left face, -1 right face.
  worst = 0;
  structure_ok = ops.B.rows() == ni;
  for (int i = 0; i < ni && structure_ok; ++i) {
    const int e = ops.interior_edges[i];
    int count = 0;
    Scalar left_val = 0, right_val = 0;
    for (SpMat::InnerIterator it(ops.B, i); it; ++it) {
      ++count;
      if (it.col() == mesh.edge_faces(e, 0)) left_val = it.value();
      if (it.col() == mesh.edge_faces(e, 1)) right_val = it.value();
    }
    if (count != 2) structure_ok = false;
    worst = std::max({worst, std::abs(left_val - 1.0), std::abs(right_val + 1.0)});
  }
  add("B row structure (+1 left, -1 right)", structure_ok ? worst : 1.0, 0.0);

  {
    const SpMat diff = ops.M - SpMat(0.5 * ops.A.cwiseAbs());
    Scalar v = 0;
    for (int k = 0; k < diff.outerSize(); ++k)
      for (SpMat::InnerIterator it(diff, k); it; ++it) v = std::max(v, std::abs(it.value()));
    add("M equals abs(A)/2", v, 0.0);
  }

  const Scalar min_hodge = std::min({ops.S0.minCoeff(), ops.S1.minCoeff(), ops.S0bar.minCoeff(),
                                     ni > 0 ? ops.S1bar.minCoeff() : Scalar(1)});
  add("Hodge diagonals strictly positive", min_hodge > 0 ? 0.0 : 1.0, 0.0);

  // Dual areas tile the surface exactly unless clamping kicked in (obtuse
  // triangles) or the mesh has a boundary.
  const Scalar area = total_area(mesh);
  const Scalar rel = std::abs(ops.S0.sum() - area) / area;
  const bool clamped = (ops.S1.array() <= kHodgeClamp).any();
  const bool closed = ni == ne;
  if (closed && !clamped)
    add("sum of dual areas equals surface area", rel, 1e-9);
  else
    report.checks.push_back({"sum of dual areas equals surface area (informative: clamped or "
                             "boundary mesh)",
                             true, rel});

  return report;
}

}  // namespace atmesh
