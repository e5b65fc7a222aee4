#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "atmesh/dec.h"
#include "atmesh/geometry.h"
#include "support.h"

using namespace atmesh;
using namespace atmesh::testing;

TEST_CASE("equilateral triangle: closed-form Hodge stars, empty B") {
  const DecOperators ops = build_dec(make_equilateral(1.0));
  const Scalar s0 = std::sqrt(3.0) / 12.0;
  const Scalar s1 = 0.5 / std::tan(M_PI / 3.0);  // cot(60 deg) / 2
  for (int i = 0; i < 3; ++i) CHECK(ops.S0[i] == doctest::Approx(s0).epsilon(1e-12));
  for (int e = 0; e < 3; ++e) CHECK(ops.S1[e] == doctest::Approx(s1).epsilon(1e-12));
  CHECK(ops.B.rows() == 0);
  CHECK(ops.S0bar[0] == doctest::Approx(std::sqrt(3.0) / 4.0).epsilon(1e-12));
}

TEST_CASE("A annihilates constant fields") {
  for (const TriangleMesh& mesh : {make_cube(1), make_icosphere(1), make_random_patch(3)}) {
    const DecOperators ops = build_dec(mesh);
    CHECK((ops.A * VecX::Constant(mesh.num_vertices(), -2.5)).cwiseAbs().maxCoeff() == 0);
  }
}

TEST_CASE("right-angle diagonal: cotan weight clamps, dual ratio caps") {
  MatX3 v(4, 3);
  v << 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0;
  MatX3i f(2, 3);
  f << 0, 1, 2, 0, 2, 3;
  const TriangleMesh square = build_triangle_mesh(v, f);
  const DecOperators ops = build_dec(square);
  const int diagonal = square.edge_index(0, 2);
  REQUIRE(diagonal >= 0);
  CHECK(ops.S1[diagonal] == kHodgeClamp);
  int diag_interior = -1;
  for (int i = 0; i < ops.num_interior_edges(); ++i)
    if (ops.interior_edges[i] == diagonal) diag_interior = i;
  REQUIRE(diag_interior >= 0);
  CHECK(ops.S1bar[diag_interior] == kDualRatioCap);
}

TEST_CASE("A acts as w_hi - w_lo on every edge") {
  const TriangleMesh mesh = make_random_patch(11);
  const DecOperators ops = build_dec(mesh);
  std::mt19937_64 rng(4);
  VecX w(mesh.num_vertices());
  for (int i = 0; i < w.size(); ++i) w[i] = 2 * uniform01(rng) - 1;
  const VecX aw = ops.A * w;
  for (int e = 0; e < mesh.num_edges(); ++e)
    CHECK(aw[e] == doctest::Approx(w[mesh.edges(e, 1)] - w[mesh.edges(e, 0)]).epsilon(1e-15));
}

TEST_CASE("B acts as u_left - u_right on every interior edge") {
  const TriangleMesh mesh = make_cube(1);
  const DecOperators ops = build_dec(mesh);
  std::mt19937_64 rng(8);
  VecX u(mesh.num_triangles());
  for (int i = 0; i < u.size(); ++i) u[i] = 2 * uniform01(rng) - 1;
  const VecX bu = ops.B * u;
  for (int i = 0; i < ops.num_interior_edges(); ++i) {
    const int e = ops.interior_edges[i];
    CHECK(bu[i] ==
          doctest::Approx(u[mesh.edge_faces(e, 0)] - u[mesh.edge_faces(e, 1)]).epsilon(1e-15));
  }
}

TEST_CASE("Dirichlet quadratic form equals the brute-force cotan sum") {
  for (std::uint64_t seed : {1u, 2u}) {
    const TriangleMesh mesh = make_icosphere(1);
    const DecOperators ops = build_dec(mesh);
    std::mt19937_64 rng(seed);
    VecX v(mesh.num_vertices());
    for (int i = 0; i < v.size(); ++i) v[i] = 2 * uniform01(rng) - 1;

    const VecX av = ops.A * v;
    const Scalar quadratic = av.dot((ops.S1.array() * av.array()).matrix());
    Scalar brute = 0;
    for (int e = 0; e < mesh.num_edges(); ++e) {
      const Scalar d = v[mesh.edges(e, 1)] - v[mesh.edges(e, 0)];
      brute += ops.S1[e] * d * d;
    }
    CHECK(quadratic == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("verify_dec passes on constructive inputs") {
  const TriangleMesh cube = make_cube();
  CHECK(verify_dec(build_dec(cube), cube).all_pass());

  const TriangleMesh ico = make_icosahedron();
  const DecOperators ops = build_dec(ico);
  const DecReport report = verify_dec(ops, ico);
  CHECK(report.all_pass());
  // Closed, no clamping: the dual areas must tile the surface to 1e-9 relative.
  CHECK(std::abs(ops.S0.sum() - total_area(ico)) <= 1e-9 * total_area(ico));
}

TEST_CASE("verify_dec flags a corrupted A entry") {
  const TriangleMesh cube = make_cube();
  DecOperators ops = build_dec(cube);
  ops.A.coeffRef(0, cube.edges(0, 0)) = 0.0;
  const DecReport report = verify_dec(ops, cube);
  CHECK(!report.all_pass());
  bool flagged = false;
  for (const DecCheck& c : report.checks)
    if (!c.pass && c.name.find("A row structure") != std::string::npos) flagged = true;
  CHECK(flagged);
}

TEST_CASE("all Hodge diagonals are strictly positive even on obtuse meshes") {
  TriangleMesh ugly = jitter(make_grid(6, 6), 0.15, 21);
  const DecOperators ops = build_dec(ugly);
  CHECK(ops.S0.minCoeff() > 0);
  CHECK(ops.S1.minCoeff() > 0);
  CHECK(ops.S0bar.minCoeff() > 0);
  if (ops.S1bar.size() > 0) CHECK(ops.S1bar.minCoeff() > 0);
}
