#include "atmesh/dec.h"
#include "atmesh/geometry.h"
#include "atmesh/hole_fill.h"
#include "atmesh/mesh_io.h"
#include "atmesh/pipelines.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using namespace atmesh;

struct CliConfig {
  std::string in, out, map_path, a_path, b_path;
  std::string report_path, cuts_path, probs_path;
  ATParams at;
  ProjectionParams proj;
  int iters = 4;
  int levels = 1;
  std::uint64_t seed = 0;
  Scalar sigma = 0.1;
  Scalar threshold = 0.5;
  Scalar samples_per_area = 2000;
  int max_flip_abort = -1;
  std::string map_space = "tangent";
};

void add_at_options(CLI::App* cmd, CliConfig& cfg) {
  cmd->add_option("--lambda", cfg.at.lambda, "discontinuity length weight")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", cfg.at.alpha, "normal data-attachment weight")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--eps-start", cfg.at.eps_start, "first annealing eps (mean-edge units)");
  cmd->add_option("--eps-end", cfg.at.eps_end, "last annealing eps (mean-edge units)");
  cmd->add_option("--eps-div", cfg.at.eps_divisor, "per-stage eps divisor");
  cmd->add_option("--inner", cfg.at.inner_alternations, "solve alternations per eps stage");
  cmd->add_option("--tol", cfg.at.solver_tol, "relative residual for the inner solves");
}

void add_projection_options(CLI::App* cmd, CliConfig& cfg) {
  cmd->add_option("--w1", cfg.proj.w1, "fairness weight");
  cmd->add_option("--w2", cfg.proj.w2, "position data-attachment weight");
}

void write_edge_list(const std::string& path, const TriangleMesh& mesh,
                     const std::vector<int>& edges) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  for (int e : edges) out << mesh.edges(e, 0) << ' ' << mesh.edges(e, 1) << '\n';
}

VecX clamped01(const VecX& v) { return v.cwiseMax(0.0).cwiseMin(1.0); }

int run(int argc, char** argv) {
  CLI::App app{"Piecewise-smooth mesh processing via Ambrosio-Tortorelli normal regularization"};
  app.require_subcommand(1);
  CliConfig cfg;

  std::string params_file;
  const auto common = [&](CLI::App* cmd, bool needs_out = true) {
    cmd->add_option("--in", cfg.in, "input mesh (.obj/.off)")->required();
    if (needs_out) cmd->add_option("--out", cfg.out, "output path")->required();
    cmd->add_option("--params", params_file, "TOML-style key=value file (flags still win)");
    return cmd;
  };

  CLI::App* denoise_cmd = common(app.add_subcommand("denoise", "piecewise-smooth denoising"));
  add_at_options(denoise_cmd, cfg);
  add_projection_options(denoise_cmd, cfg);
  denoise_cmd->add_option("--iters", cfg.iters, "outer AT + projection iterations");
  denoise_cmd->add_option("--report", cfg.report_path, "report file (.json or .csv)");
  denoise_cmd->add_option("--max-flip-abort", cfg.max_flip_abort,
                          "abort when more triangles flip in one projection");

  CLI::App* features_cmd = common(app.add_subcommand("features", "extract sharp feature edges"));
  add_at_options(features_cmd, cfg);
  features_cmd->add_option("--threshold", cfg.threshold, "feature threshold on v");

  CLI::App* segment_cmd =
      common(app.add_subcommand("segment", "piecewise-smooth multicut segmentation"));
  add_at_options(segment_cmd, cfg);
  segment_cmd->add_option("--cuts-out", cfg.cuts_path, "cut edge-index list output");
  segment_cmd->add_option("--probs-out", cfg.probs_path, "per-interior-edge probabilities output");

  CLI::App* inpaint_cmd = common(app.add_subcommand("inpaint", "fill and restore holes"));
  add_at_options(inpaint_cmd, cfg);
  add_projection_options(inpaint_cmd, cfg);
  inpaint_cmd->add_option("--iters", cfg.iters, "AT + projection passes on the filled mesh")
      ->default_val(1);
  inpaint_cmd->add_option("--report", cfg.report_path, "report file (.json or .csv)");

  CLI::App* emboss_cmd = common(app.add_subcommand("emboss", "bake a normal map into geometry"));
  add_projection_options(emboss_cmd, cfg);
  emboss_cmd->add_option("--map", cfg.map_path, "normal map (binary PPM)")->required();
  emboss_cmd->add_option("--levels", cfg.levels, "midpoint subdivision levels");
  emboss_cmd->add_option("--map-space", cfg.map_space, "tangent or object")
      ->check(CLI::IsMember({"tangent", "object"}));

  CLI::App* noise_cmd = common(app.add_subcommand("noise", "Gaussian normal-direction noise"));
  noise_cmd->add_option("--sigma", cfg.sigma, "std deviation in mean-edge-length units");
  noise_cmd->add_option("--seed", cfg.seed, "RNG seed");

  CLI::App* metrics_cmd = app.add_subcommand("metrics", "Hausdorff RMS distance x100");
  metrics_cmd->add_option("--a", cfg.a_path, "first mesh")->required();
  metrics_cmd->add_option("--b", cfg.b_path, "second mesh")->required();
  metrics_cmd->add_option("--samples-per-area", cfg.samples_per_area, "sampling density");
  metrics_cmd->add_option("--seed", cfg.seed, "sampling seed");

  CLI::App* check_cmd = app.add_subcommand("check", "verify DEC operator invariants");
  check_cmd->add_option("--in", cfg.in, "input mesh (.obj/.off)")->required();

  // A parameter file fills in any option the command line leaves unset, so
  // explicit flags always win and the option validators still apply.
  std::vector<std::string> args(argv + 1, argv + argc);
  for (size_t i = 0; i < args.size(); ++i) {
    std::string file;
    if (args[i] == "--params" && i + 1 < args.size())
      file = args[i + 1];
    else if (args[i].rfind("--params=", 0) == 0)
      file = args[i].substr(9);
    if (file.empty()) continue;

    std::ifstream in(file);
    if (!in) throw Error("cannot open parameter file '" + file + "'");
    const auto given = [&](const std::string& flag) {
      for (const std::string& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
      return false;
    };
    std::string line;
    while (std::getline(in, line)) {
      const auto strip = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r\"");
        const auto e = s.find_last_not_of(" \t\r\"");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      const std::string content = strip(line.substr(0, line.find_first_of("#;")));
      const auto eq = content.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = strip(content.substr(0, eq));
      const std::string value = strip(content.substr(eq + 1));
      if (key.empty() || value.empty()) continue;
      if (!given("--" + key)) {
        args.push_back("--" + key);
        args.push_back(value);
      }
    }
    break;
  }

  std::reverse(args.begin(), args.end());  // CLI11's vector overload pops from the back
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage error
  }
  (void)thread_cap();  // validate ATMESH_THREADS; stages run mono-threaded

  if (denoise_cmd->parsed()) {
    const TriangleMesh mesh = load_mesh(cfg.in);
    const DenoiseResult r = denoise(mesh, cfg.at, cfg.proj, cfg.iters, nullptr, cfg.max_flip_abort);
    const VecX v = clamped01(r.v);
    save_mesh(r.mesh, cfg.out, &v);
    if (!cfg.report_path.empty()) r.report.save(cfg.report_path);
  } else if (features_cmd->parsed()) {
    const TriangleMesh mesh = load_mesh(cfg.in);
    auto [normalized, transform] = normalize_to_unit_ball(mesh);
    (void)transform;
    const DecOperators ops = build_dec(normalized);
    const ATState state = minimize_at(face_normals(normalized), cfg.at, ops);
    const VecX v = clamped01(state.v);
    write_edge_list(cfg.out, normalized, extract_feature_edges(v, normalized, cfg.threshold));
    save_scalar_csv(v, scalar_sidecar_path(cfg.out));
  } else if (segment_cmd->parsed()) {
    const TriangleMesh mesh = load_mesh(cfg.in);
    const SegmentResult r = segment(mesh, cfg.at);
    std::ofstream labels(cfg.out);
    if (!labels) throw Error("cannot write '" + cfg.out + "'");
    for (Eigen::Index f = 0; f < r.segmentation.labels.size(); ++f)
      labels << r.segmentation.labels[f] << '\n';
    if (!cfg.cuts_path.empty()) {
      std::ofstream cuts(cfg.cuts_path);
      if (!cuts) throw Error("cannot write '" + cfg.cuts_path + "'");
      for (int e : r.segmentation.cut_edges) cuts << e << '\n';
    }
    if (!cfg.probs_path.empty()) save_scalar_csv(r.probabilities, cfg.probs_path);
  } else if (inpaint_cmd->parsed()) {
    const TriangleMesh mesh = load_mesh(cfg.in);
    const InpaintResult r = inpaint(mesh, cfg.at, cfg.proj, cfg.iters);
    const VecX v = clamped01(r.v);
    save_mesh(r.mesh, cfg.out, &v);
    if (!cfg.report_path.empty()) r.report.save(cfg.report_path);
  } else if (emboss_cmd->parsed()) {
    const TriangleMesh mesh = load_mesh(cfg.in);
    const NormalMap map = load_ppm(
        cfg.map_path,
        cfg.map_space == "tangent" ? NormalMap::Space::Tangent : NormalMap::Space::Object);
    save_mesh(emboss(mesh, map, cfg.levels, cfg.proj), cfg.out);
  } else if (noise_cmd->parsed()) {
    const TriangleMesh mesh = load_mesh(cfg.in);
    save_mesh(add_normal_noise(mesh, cfg.sigma, cfg.seed), cfg.out);
  } else if (metrics_cmd->parsed()) {
    const TriangleMesh a = load_mesh(cfg.a_path);
    const TriangleMesh b = load_mesh(cfg.b_path);
    std::printf("%.4f\n", 100.0 * hausdorff_rms(a, b, cfg.samples_per_area, cfg.seed));
  } else if (check_cmd->parsed()) {
    const TriangleMesh mesh = load_mesh(cfg.in);
    const DecReport report = verify_dec(build_dec(mesh), mesh);
    std::cout << report.to_string();
    if (!report.all_pass()) return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const atmesh::SolverError& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
