#include "atmesh/at_solver.h"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace atmesh {

namespace {

VecX mask_or_ones(const VecX& mask, Eigen::Index n, const char* name) {
  if (mask.size() == 0) return VecX::Ones(n);
  if (mask.size() != n) throw Error(std::string(name) + " mask has wrong length");
  return mask;
}

struct Fields {
  VecX alpha_mask;     // |F|
  VecX lambda_vertex;  // |V|, lambda * vertex scale
  VecX lambda_edge;    // |E|, lambda * edge scale
};

Fields expand(const ATParams& params, const DecOperators& ops) {
  Fields f;
  f.alpha_mask = mask_or_ones(params.alpha_face_mask, ops.num_faces(), "alpha_face_mask");
  f.lambda_vertex = params.lambda * mask_or_ones(params.lambda_vertex_scale, ops.num_vertices(),
                                                 "lambda_vertex_scale");
  f.lambda_edge =
      params.lambda * mask_or_ones(params.lambda_edge_scale, ops.num_edges(), "lambda_edge_scale");
  return f;
}

// Interior-edge weight of the cross term at fixed v: S1bar (Mv)^2.
VecX cross_weights_u(const Primal0Form& v, const DecOperators& ops) {
  const VecX mv = ops.M_int * v;
  return ops.S1bar.array() * mv.array().square();
}

// Interior-edge weight of the cross term at fixed u: S1bar sum_c (Bu_c)^2.
VecX cross_weights_v(const Dual0Field3& u, const DecOperators& ops) {
  VecX w = VecX::Zero(ops.num_interior_edges());
  for (int c = 0; c < 3; ++c) {
    const VecX bu = ops.B * u.col(c);
    w.array() += bu.array().square();
  }
  return ops.S1bar.array() * w.array();
}

int solve_max_iter(Eigen::Index n) { return static_cast<int>(20 * n + 2000); }

}  // namespace

void ATParams::validate(const DecOperators& ops) const {
  if (!(alpha > 0)) throw Error("alpha must be positive");
  if (!(lambda > 0)) throw Error("lambda must be positive");
  if (!(eps_end > 0) || !(eps_start >= eps_end))
    throw Error("need eps_start >= eps_end > 0");
  if (!(eps_divisor > 1)) throw Error("eps_divisor must exceed 1");
  if (inner_alternations < 1) throw Error("inner_alternations must be at least 1");
  if (!(solver_tol > 0)) throw Error("solver_tol must be positive");
  const auto check_mask = [](const VecX& m, Eigen::Index n, const char* name) {
    if (m.size() != 0 && m.size() != n) throw Error(std::string(name) + " has wrong length");
    if (m.size() != 0 && (m.array() < 0).any())
      throw Error(std::string(name) + " has negative entries");
  };
  check_mask(alpha_face_mask, ops.num_faces(), "alpha_face_mask");
  check_mask(lambda_vertex_scale, ops.num_vertices(), "lambda_vertex_scale");
  check_mask(lambda_edge_scale, ops.num_edges(), "lambda_edge_scale");
}

std::vector<Scalar> eps_schedule(const ATParams& params) {
  std::vector<Scalar> stages;
  Scalar eps = params.eps_start;
  while (eps > params.eps_end * (1 + 1e-12)) {
    stages.push_back(eps);
    eps /= params.eps_divisor;
  }
  stages.push_back(params.eps_end);
  return stages;
}

Scalar at_energy(const Dual0Field3& u, const Primal0Form& v, const Dual0Field3& g, Scalar eps,
                 const ATParams& params, const DecOperators& ops) {
  if (u.rows() != ops.num_faces() || g.rows() != ops.num_faces())
    throw Error("at_energy: u/g row count does not match face count");
  if (v.size() != ops.num_vertices())
    throw Error("at_energy: v length does not match vertex count");
  const Fields f = expand(params, ops);

  Scalar energy = 0;
  const VecX mv = ops.M_int * v;
  for (int c = 0; c < 3; ++c) {
    const VecX d = u.col(c) - g.col(c);
    energy += params.alpha * d.dot((f.alpha_mask.array() * ops.S0bar.array() * d.array()).matrix());
    const VecX bu = ops.B * u.col(c);
    energy += bu.dot((ops.S1bar.array() * mv.array().square() * bu.array()).matrix());
  }
  const VecX av = ops.A * v;
  energy += eps * av.dot((f.lambda_edge.array() * ops.S1.array() * av.array()).matrix());
  const VecX one_minus_v = VecX::Ones(v.size()) - v;
  energy += (0.25 / eps) *
            one_minus_v.dot((f.lambda_vertex.array() * ops.S0.array() * one_minus_v.array()).matrix());
  return energy;
}

Dual0Field3 solve_u(const Primal0Form& v, const Dual0Field3& g, Scalar eps, const ATParams& params,
                    const DecOperators& ops, const Dual0Field3* warm_start) {
  (void)eps;  // the u system does not depend on eps
  const Fields f = expand(params, ops);
  const VecX data_diag = params.alpha * f.alpha_mask.array() * ops.S0bar.array();

  SpMat system = weighted_gram(ops.B, cross_weights_u(v, ops));
  std::vector<Triplet> diag_triplets;
  diag_triplets.reserve(data_diag.size());
  for (Eigen::Index i = 0; i < data_diag.size(); ++i)
    diag_triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), data_diag[i]);
  system += assemble(diag_triplets, ops.num_faces(), ops.num_faces());

  Dual0Field3 u(ops.num_faces(), 3);
  for (int c = 0; c < 3; ++c) {
    const VecX rhs = data_diag.array() * g.col(c).array();
    const VecX x0 = warm_start ? VecX(warm_start->col(c)) : VecX(g.col(c));
    u.col(c) = spd_solve(system, rhs, params.solver_tol, solve_max_iter(system.rows()), &x0);
  }
  return u;
}

Primal0Form solve_v(const Dual0Field3& u, Scalar eps, const ATParams& params,
                    const DecOperators& ops, const Primal0Form* warm_start) {
  const Fields f = expand(params, ops);

  SpMat system = weighted_gram(ops.A, (eps * f.lambda_edge.array() * ops.S1.array()).matrix());
  system += weighted_gram(ops.M_int, cross_weights_v(u, ops));
  const VecX mass = (0.25 / eps) * f.lambda_vertex.array() * ops.S0.array();
  std::vector<Triplet> diag_triplets;
  diag_triplets.reserve(mass.size());
  for (Eigen::Index i = 0; i < mass.size(); ++i)
    diag_triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), mass[i]);
  system += assemble(diag_triplets, ops.num_vertices(), ops.num_vertices());

  const VecX ones = VecX::Ones(ops.num_vertices());
  const VecX x0 = warm_start ? *warm_start : ones;
  return spd_solve(system, mass, params.solver_tol, solve_max_iter(system.rows()), &x0);
}

ATState minimize_at(const Dual0Field3& g, const ATParams& params, const DecOperators& ops) {
  params.validate(ops);
  if (g.rows() != ops.num_faces()) throw Error("minimize_at: g row count != face count");
  const Scalar worst_norm = (g.rowwise().norm().array() - 1.0).abs().maxCoeff();
  if (worst_norm > 1e-6)
    throw Error("minimize_at: g rows must be unit normals (worst deviation " +
                std::to_string(worst_norm) + ")");

  ATState state;
  state.u = g;
  state.v = VecX::Ones(ops.num_vertices());

  // The annealing runs on the mean-edge-rescaled metric: with S0/S0bar ~ h^2
  // and S1/S1bar ~ 1, the printed constants (alpha = 0.07, lambda = 0.06,
  // eps = 2 .. 0.25) only give resolution-independent behavior when lengths
  // are measured in edge units. Equivalently: alpha / mel^2, lambda / mel,
  // eps * mel on the world-unit operators.
  ATParams scaled = params;
  scaled.alpha = params.alpha / (ops.mean_edge * ops.mean_edge);
  scaled.lambda = params.lambda / ops.mean_edge;
  for (const Scalar eps : eps_schedule(params)) {
    const Scalar eps_world = eps * ops.mean_edge;
    int iteration = 0;
    Scalar previous = at_energy(state.u, state.v, g, eps_world, scaled, ops);
    for (int round = 0; round < params.inner_alternations; ++round) {
      // u first: with v still high the cross term smooths the field, then v
      // localizes on the surviving jumps. Solving v first against raw noisy
      // normals collapses v globally, which in turn freezes u at g.
      state.u = solve_u(state.v, g, eps_world, scaled, ops, &state.u);
      state.energy_trace.push_back(
          {eps, iteration++, at_energy(state.u, state.v, g, eps_world, scaled, ops)});
      state.v = solve_v(state.u, eps_world, scaled, ops, &state.v);
      const Scalar energy = at_energy(state.u, state.v, g, eps_world, scaled, ops);
      state.energy_trace.push_back({eps, iteration++, energy});
      if (previous - energy < 1e-7 * std::max<Scalar>(1, std::abs(previous))) break;
      previous = energy;
    }
  }
  return state;
}

void write_trace_csv(const std::vector<ATTraceRow>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "eps,iteration,energy\n";
  char buf[96];
  for (const ATTraceRow& row : trace) {
    std::snprintf(buf, sizeof(buf), "%.9g,%d,%.12g\n", row.eps, row.iteration, row.energy);
    out << buf;
  }
}

}  // namespace atmesh
