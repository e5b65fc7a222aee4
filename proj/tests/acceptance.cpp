// End-to-end acceptance suite: runs every gate criterion at its pinned
// tolerance and prints one pass/fail line per criterion. Exit code is the
// number of failed criteria.

#include "atmesh/at_solver.h"
#include "atmesh/geometry.h"
#include "atmesh/hole_fill.h"
#include "atmesh/mesh_io.h"
#include "atmesh/pipelines.h"
#include "atmesh/projection.h"
#include "support_multicut.h"
#include "support_pipelines.h"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

using namespace atmesh;
using namespace atmesh::testing;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] %2d. %-22s %s (%.1f s)\n", pass ? "PASS" : "FAIL", number, name.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

void criterion(int number, const std::string& name, double budget_seconds,
               const std::function<bool(std::string&)>& body) {
  const auto start = Clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& err) {
    detail = std::string("exception: ") + err.what();
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (seconds > budget_seconds) {
    pass = false;
    detail += " [over the " + std::to_string(static_cast<int>(budget_seconds)) + " s budget]";
  }
  report(number, name, pass, detail, seconds);
}

bool trace_monotone_within_stages(const std::vector<ATTraceRow>& trace, Scalar tol,
                                  Scalar* worst) {
  *worst = 0;
  bool ok = true;
  for (size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].eps != trace[i - 1].eps) continue;
    const Scalar rise = trace[i].energy - trace[i - 1].energy;
    *worst = std::max(*worst, rise);
    if (rise > tol) ok = false;
  }
  return ok;
}

struct CubeClasses {
  std::vector<int> crease;         // on a sharp edge (or corner)
  std::vector<int> face_all;       // strictly inside a face
  std::vector<int> face_core;      // inside and not adjacent to a crease vertex
  std::map<std::string, std::vector<int>> chains;  // the 12 sharp edges
};

CubeClasses classify(const TriangleMesh& cube) {
  const Scalar m = cube.vertices.cwiseAbs().maxCoeff();
  CubeClasses out;
  std::vector<bool> crease(cube.num_vertices(), false);
  for (int i = 0; i < cube.num_vertices(); ++i) {
    int on = 0;
    std::string key;
    for (int k = 0; k < 3; ++k) {
      if (std::abs(std::abs(cube.vertices(i, k)) - m) < 1e-9 * m) {
        ++on;
        key += static_cast<char>('x' + k);
        key += cube.vertices(i, k) > 0 ? '+' : '-';
      }
    }
    if (on >= 2) {
      crease[i] = true;
      out.crease.push_back(i);
      if (on == 2) out.chains[key].push_back(i);
    }
  }
  for (int i = 0; i < cube.num_vertices(); ++i) {
    if (crease[i]) continue;
    out.face_all.push_back(i);
    bool adjacent = false;
    for (int e = 0; e < cube.num_edges(); ++e) {
      if (cube.edges(e, 0) == i && crease[cube.edges(e, 1)]) adjacent = true;
      if (cube.edges(e, 1) == i && crease[cube.edges(e, 0)]) adjacent = true;
    }
    if (!adjacent) out.face_core.push_back(i);
  }
  return out;
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

std::string temp_file(const std::string& name) {
  static const std::filesystem::path dir = [] {
    const auto d = std::filesystem::temp_directory_path() / "atmesh_acceptance";
    std::filesystem::create_directories(d);
    return d;
  }();
  return (dir / name).string();
}

bool same_bytes(const std::string& a, const std::string& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

}  // namespace

int main() {
  criterion(1, "energy monotonicity", 20, [](std::string& detail) {
    auto t0 = Clock::now();
    const auto [cube, tc] = normalize_to_unit_ball(make_cube(2));
    (void)tc;
    const ATState cube_state = minimize_at(face_normals(cube), ATParams(), build_dec(cube));
    const double cube_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    Scalar worst_cube = 0;
    const bool cube_ok = trace_monotone_within_stages(cube_state.energy_trace, 1e-9, &worst_cube);

    t0 = Clock::now();
    const TriangleMesh sphere = add_normal_noise(make_icosphere(4), 0.2, 3);  // 5120 faces
    const auto [nsphere, ts] = normalize_to_unit_ball(sphere);
    (void)ts;
    const ATState sphere_state = minimize_at(face_normals(nsphere), ATParams(), build_dec(nsphere));
    const double sphere_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    Scalar worst_sphere = 0;
    const bool sphere_ok =
        trace_monotone_within_stages(sphere_state.energy_trace, 1e-9, &worst_sphere);

    detail = fmt("worst rise: cube %.2e, noisy 5k sphere %.2e (tol 1e-9)", worst_cube,
                 worst_sphere);
    return cube_ok && sphere_ok && cube_seconds < 10 && sphere_seconds < 10;
  });

  criterion(2, "gradient oracles", 5, [](std::string& detail) {
    std::mt19937_64 rng(2024);
    const Scalar step = 1e-6;
    Scalar worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const TriangleMesh mesh = make_random_patch(5000 + trial);  // 50 vertices
      Dual0Field3 u(mesh.num_triangles(), 3);
      for (int f = 0; f < mesh.num_triangles(); ++f) {
        for (int c = 0; c < 3; ++c) u(f, c) = 2 * uniform01(rng) - 1;
        u.row(f).normalize();
      }
      VecX v(mesh.num_vertices());
      for (int i = 0; i < v.size(); ++i) v[i] = uniform01(rng);

      const SpMat c_op = assemble_normal_matching(mesh, u);
      const SpMat d_op = assemble_fairness(mesh, v);
      VecX p(3 * mesh.num_vertices());
      for (int i = 0; i < mesh.num_vertices(); ++i)
        for (int k = 0; k < 3; ++k) p[3 * i + k] = mesh.vertices(i, k);

      const auto energies = [&](const VecX& q) {
        MatX3 pos(mesh.num_vertices(), 3);
        for (int i = 0; i < mesh.num_vertices(); ++i)
          for (int k = 0; k < 3; ++k) pos(i, k) = q[3 * i + k];
        const ProjectionEnergies e = projection_energies(mesh, pos, pos, u, v);
        return std::make_pair(e.e_m, e.e_f);
      };
      VecX fd_m(p.size()), fd_f(p.size());
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        VecX plus = p, minus = p;
        plus[i] += step;
        minus[i] -= step;
        const auto [em_p, ef_p] = energies(plus);
        const auto [em_m, ef_m] = energies(minus);
        fd_m[i] = (em_p - em_m) / (2 * step);
        fd_f[i] = (ef_p - ef_m) / (2 * step);
      }
      worst = std::max(worst, (VecX(c_op * p) - fd_m).norm() / fd_m.norm());
      worst = std::max(worst, (VecX(d_op * p) - fd_f).norm() / fd_f.norm());
    }
    detail = fmt("worst relative FD mismatch %.2e over 20 meshes (tol 1e-6)", worst);
    return worst < 1e-6;
  });

  criterion(3, "DEC identities", 10, [](std::string& detail) {
    bool ok = true;
    const TriangleMesh cube = make_cube(1);
    const DecOperators ops = build_dec(cube);
    ok &= (ops.A * VecX::Ones(cube.num_vertices())).cwiseAbs().maxCoeff() == 0;

    const SpMat m_diff = ops.M - SpMat(0.5 * ops.A.cwiseAbs());
    Scalar m_violation = 0;
    for (int k = 0; k < m_diff.outerSize(); ++k)
      for (SpMat::InnerIterator it(m_diff, k); it; ++it)
        m_violation = std::max(m_violation, std::abs(it.value()));
    ok &= m_violation == 0;

    std::mt19937_64 rng(6);
    const TriangleMesh sphere = make_icosphere(2);
    const DecOperators sops = build_dec(sphere);
    VecX v(sphere.num_vertices());
    for (int i = 0; i < v.size(); ++i) v[i] = 2 * uniform01(rng) - 1;
    const VecX av = sops.A * v;
    const Scalar quadratic = av.dot((sops.S1.array() * av.array()).matrix());
    Scalar brute = 0;
    for (int e = 0; e < sphere.num_edges(); ++e) {
      const Scalar d = v[sphere.edges(e, 1)] - v[sphere.edges(e, 0)];
      brute += sops.S1[e] * d * d;
    }
    const Scalar dirichlet_rel = std::abs(quadratic - brute) / brute;
    ok &= dirichlet_rel < 1e-12;

    const DecOperators eq = build_dec(make_equilateral(1.0));
    const Scalar s0_dev = (eq.S0.array() - std::sqrt(3.0) / 12.0).abs().maxCoeff();
    const Scalar s1_dev = (eq.S1.array() - 0.5 / std::tan(M_PI / 3.0)).abs().maxCoeff();
    ok &= s0_dev < 1e-12 && s1_dev < 1e-12;

    detail = fmt("Dirichlet rel %.1e, equilateral dev %.1e/%.1e", dirichlet_rel, s0_dev, s1_dev);
    return ok;
  });

  criterion(4, "feature localization", 30, [](std::string& detail) {
    const auto [cube, t] = normalize_to_unit_ball(make_cube(3));
    (void)t;
    const ATState state = minimize_at(face_normals(cube), ATParams(), build_dec(cube));
    const CubeClasses classes = classify(cube);

    Scalar min_crease = 1, max_crease = 0, min_face = 1, min_core = 1;
    for (int i : classes.crease) {
      min_crease = std::min(min_crease, state.v[i]);
      max_crease = std::max(max_crease, state.v[i]);
    }
    for (int i : classes.face_all) min_face = std::min(min_face, state.v[i]);
    for (int i : classes.face_core) min_core = std::min(min_core, state.v[i]);

    // Hard assertion: every sharp-edge value strictly below every face value;
    // thresholds on creases and on interiors beyond the one-ring AT band.
    const bool ok = min_crease < 0.3 && min_core > 0.9 && max_crease < min_face;
    detail = fmt("crease v <= %.3f, band min %.2f, core min %.3f", max_crease, min_face, min_core);
    return ok;
  });

  criterion(5, "denoising efficacy", 60, [](std::string& detail) {
    const TriangleMesh clean = make_cube(5);  // 12288 faces, the paper's mesh scale
    const TriangleMesh noisy = add_normal_noise(clean, 0.3, 7);
    const Scalar before = hausdorff_rms(noisy, clean, 2000);
    const DenoiseResult r = denoise(noisy, ATParams(), ProjectionParams(), 4);
    const Scalar after = hausdorff_rms(r.mesh, clean, 2000);

    const TriangleMesh grid = make_grid(8, 8);
    const DenoiseResult flat = denoise(grid, ATParams(), ProjectionParams(), 2);
    const Scalar moved = (flat.mesh.vertices - grid.vertices).cwiseAbs().maxCoeff();

    detail = fmt("Hausdorff ratio %.3f (need <= 0.5), clean plane moved %.1e", after / before,
                 moved);
    return after <= 0.5 * before && moved < 1e-5;
  });

  criterion(6, "segmentation", 60, [](std::string& detail) {
    const int cube_segments = segment(make_cube(2), ATParams()).segmentation.num_segments;
    const int sphere_segments = segment(make_icosphere(3), ATParams()).segmentation.num_segments;
    const int wedge_segments = segment(make_wedge(9, 5, 60.0), ATParams()).segmentation.num_segments;

    std::mt19937_64 rng(2718);
    int matched = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
      const int n = 6 + static_cast<int>(uniform01(rng) * 5);
      const FaceGraph graph = random_multicut_instance(n, n + 2, rng);
      const Scalar heuristic = multicut_objective(graph, solve_multicut(graph).labels);
      if (heuristic <= exhaustive_multicut_optimum(graph) + 1e-9) ++matched;
    }

    detail = fmt("cube %g, sphere %g, wedge %g segments; ", cube_segments, sphere_segments,
                 wedge_segments) +
             fmt("heuristic optimal on %g/200 (need >= 190)", matched);
    return cube_segments == 6 && sphere_segments == 1 && wedge_segments == 2 && matched >= 190;
  });

  criterion(7, "inpainting", 120, [](std::string& detail) {
    // Planar hole in the +z face of a closed cube.
    const TriangleMesh cube3 = make_cube(3);
    const Scalar m = 1.0, cell = 2.0 / 8.0;
    const TriangleMesh flat_holed = remove_faces(cube3, faces_near(cube3, Vec3(0, 0, m), 0.45));
    const InpaintResult flat = inpaint(flat_holed, ATParams(), ProjectionParams());
    Scalar plane_dev = 0;
    for (int i = 0; i < flat.mesh.num_vertices(); ++i)
      if (flat.patch_vertices[i])
        plane_dev = std::max(plane_dev, std::abs(flat.mesh.vertices(i, 2) - m));
    const bool planar_ok = plane_dev < 1e-3 * bbox_diagonal(cube3);

    // Hole across a sharp edge; moderate fairness so the crease can re-form.
    const TriangleMesh crease_holed =
        remove_faces(cube3, faces_near(cube3, Vec3(0, m, m), 2.5 * cell));
    ProjectionParams proj;
    proj.w1 = 0.3;
    const InpaintResult bent = inpaint(crease_holed, ATParams(), proj);
    const Dual0Field3 n = face_normals(bent.mesh);
    Vec3 top = Vec3::Zero(), side = Vec3::Zero();
    for (int f = 0; f < bent.mesh.num_triangles(); ++f) {
      if (!bent.patch_faces[f]) continue;
      const Vec3 c = (bent.mesh.vertices.row(bent.mesh.triangles(f, 0)) +
                      bent.mesh.vertices.row(bent.mesh.triangles(f, 1)) +
                      bent.mesh.vertices.row(bent.mesh.triangles(f, 2))) /
                     3.0;
      const Scalar dy = m - c.y(), dz = m - c.z();
      if (std::hypot(dy, dz) < 0.9 * cell) continue;  // the transition band
      if (dz < 0.5 * dy)
        top += n.row(f);
      else if (dy < 0.5 * dz)
        side += n.row(f);
    }
    const Scalar dihedral =
        std::acos(std::clamp(top.normalized().dot(side.normalized()), -1.0, 1.0)) * 180.0 / M_PI;
    Scalar v_crease = 1;
    for (int i = 0; i < bent.mesh.num_vertices(); ++i) {
      if (!bent.patch_vertices[i]) continue;
      if (std::hypot(bent.mesh.vertices(i, 1) - m, bent.mesh.vertices(i, 2) - m) > 0.5 * cell)
        continue;
      v_crease = std::min(v_crease, bent.v[i]);
    }
    const bool crease_ok = std::abs(dihedral - 90.0) <= 5.0 && v_crease < 0.5;

    detail = fmt("plane dev %.1e; recovered dihedral %.1f deg, crease v %.2f", plane_dev, dihedral,
                 v_crease);
    return planar_ok && crease_ok;
  });

  criterion(8, "embossing", 30, [](std::string& detail) {
    const NormalMap neutral = constant_map(8, 128, 128, 255, NormalMap::Space::Tangent);
    const TriangleMesh base = make_grid(65, 65, 1.0, true);
    const TriangleMesh out = emboss(base, neutral, 2, ProjectionParams());
    const TriangleMesh ref = subdivide_midpoint(base, 2);
    const Scalar identity_rms = hausdorff_rms(out, ref, 2000.0 / total_area(ref));
    const Scalar identity_move = (out.vertices - ref.vertices).rowwise().norm().maxCoeff();

    const TriangleMesh strip = make_grid(41, 9, 1.0, true);
    ProjectionParams proj;
    proj.w1 = 0.01;
    const TriangleMesh ridge = emboss(strip, step_map(16, 20.0, true), 0, proj);
    const int nx = 41, row = 4 * nx;
    const auto z = [&](int i) { return ridge.vertices(row + i, 2); };
    const auto x = [&](int i) { return ridge.vertices(row + i, 0); };
    const Scalar left = (z(nx / 2 - 2) - z(2)) / (x(nx / 2 - 2) - x(2));
    const Scalar right = (z(nx - 3) - z(nx / 2 + 2)) / (x(nx - 3) - x(nx / 2 + 2));
    const Scalar predicted = std::tan(20.0 * M_PI / 180.0);
    const bool ridge_ok = left > 0.5 * predicted && right < -0.5 * predicted &&
                          z(nx / 2) > z(2) && z(nx / 2) > z(nx - 3);

    detail = fmt("neutral: surface RMS %.1e (max vertex %.1e); ", identity_rms, identity_move) +
             fmt("ridge slopes %+.2f/%+.2f", left, right);
    return identity_rms <= 1e-4 && ridge_ok;
  });

  criterion(9, "performance sanity", 300, [](std::string& detail) {
    const TriangleMesh mesh = add_normal_noise(make_icosphere(5), 0.1, 1);  // 20480 triangles
    const auto start = Clock::now();
    const DenoiseResult r = denoise(mesh, ATParams(), ProjectionParams(), 1);
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const PipelineStage& stage = r.report.stages.front();
    const double covered = (stage.ms_seconds + stage.proj_seconds) / r.report.total_seconds;
    detail = fmt("20480 triangles: AT %.1f s + projection %.1f s", stage.ms_seconds,
                 stage.proj_seconds) +
             fmt(", %.0f%% of the pipeline", 100 * covered);
    return seconds <= 300 && covered >= 0.95;
  });

  criterion(10, "determinism", 120, [](std::string& detail) {
#ifdef ATMESH_CLI_PATH
    const std::string cli = ATMESH_CLI_PATH;
#else
    const std::string cli = "atmesh";
#endif
    const std::string base = temp_file("base.obj");
    save_mesh(make_cube(2), base, MeshFormat::Obj);
    const std::string noisy = temp_file("noisy.obj");
    const std::string out1 = temp_file("out1.obj");
    const std::string out2 = temp_file("out2.obj");

    const auto run = [&](const std::string& args) {
      const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
      return std::system(cmd.c_str()) == 0;
    };
    bool ok = run("noise --in \"" + base + "\" --out \"" + noisy + "\" --sigma 0.3 --seed 7");
    ok = ok && run("denoise --in \"" + noisy + "\" --out \"" + out1 + "\" --iters 2");
    ok = ok && run("denoise --in \"" + noisy + "\" --out \"" + out2 + "\" --iters 2");
    const bool mesh_same = ok && same_bytes(out1, out2);
    const bool sidecar_same =
        ok && same_bytes(scalar_sidecar_path(out1), scalar_sidecar_path(out2));
    detail = std::string("repeated CLI denoise: mesh bytes ") + (mesh_same ? "equal" : "DIFFER") +
             ", feature sidecar " + (sidecar_same ? "equal" : "DIFFER");
    return mesh_same && sidecar_same;
  });

  if (failures == 0) std::printf("all acceptance criteria passed\n");
  return failures;
}
