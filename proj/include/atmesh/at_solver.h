#pragma once

#include "atmesh/dec.h"

namespace atmesh {

/// Knobs of the discrete Ambrosio-Tortorelli energy
///
///   E(u,v) = alpha (u-g)' S0bar (u-g)
///          + u' B' Diag(Mv) S1bar Diag(Mv) B u
///          + lambda eps v' A' S1 A v
///          + lambda/(4 eps) (1-v)' S0 (1-v)
///
/// summed over the three coordinate columns of u and g. Minimization anneals
/// eps from eps_start down to eps_end, dividing by eps_divisor per stage, and
/// alternates exact solves in u and v inside each stage. The schedule is in
/// mean-edge-length units; minimize_at rescales alpha, lambda and eps so the
/// constants behave identically across mesh resolutions (the individual
/// solves and at_energy take the eps value verbatim).
///
/// The optional masks scale terms entrywise (all-ones when empty):
/// alpha_face_mask multiplies alpha per face; lambda_vertex_scale and
/// lambda_edge_scale multiply lambda in the S0 and S1 terms per entity, which
/// is how inpainting softens the discontinuity penalty inside a patch.
struct ATParams {
  Scalar alpha = 0.07;
  Scalar lambda = 0.06;
  Scalar eps_start = 2.0;
  Scalar eps_end = 0.25;
  Scalar eps_divisor = 2.0;
  int inner_alternations = 4;
  Scalar solver_tol = 1e-6;
  VecX alpha_face_mask;
  VecX lambda_vertex_scale;
  VecX lambda_edge_scale;

  void validate(const DecOperators& ops) const;
};

struct ATTraceRow {
  Scalar eps = 0;
  int iteration = 0;  // solve counter within the eps stage
  Scalar energy = 0;
};

struct ATState {
  Dual0Field3 u;
  Primal0Form v;
  std::vector<ATTraceRow> energy_trace;
};

/// Stage values eps_start, eps_start/divisor, ... down to eps_end.
std::vector<Scalar> eps_schedule(const ATParams& params);

Scalar at_energy(const Dual0Field3& u, const Primal0Form& v, const Dual0Field3& g, Scalar eps,
                 const ATParams& params, const DecOperators& ops);

/// Exact minimizer of the energy in u at fixed v: per coordinate column
///   [alpha Diag(mask) S0bar + B' Diag(Mv) S1bar Diag(Mv) B] u
///     = alpha Diag(mask) S0bar g.
Dual0Field3 solve_u(const Primal0Form& v, const Dual0Field3& g, Scalar eps, const ATParams& params,
                    const DecOperators& ops, const Dual0Field3* warm_start = nullptr);

/// Exact minimizer in v at fixed u:
///   [lambda/(4 eps) S0 + lambda eps A' S1 A + M' Diag(Bu) S1bar Diag(Bu) M] v
///     = lambda/(4 eps) S0 1,
/// the cross term summed over u's coordinate columns.
Primal0Form solve_v(const Dual0Field3& u, Scalar eps, const ATParams& params,
                    const DecOperators& ops, const Primal0Form* warm_start = nullptr);

/// Annealed block minimization from u = g, v = 1, alternating (solve_u,
/// solve_v) rounds. Records the energy after every solve; within a stage,
/// rounds stop early once the relative energy decrease drops under 1e-7.
ATState minimize_at(const Dual0Field3& g, const ATParams& params, const DecOperators& ops);

/// Trace as CSV rows "eps,iteration,energy".
void write_trace_csv(const std::vector<ATTraceRow>& trace, const std::string& path);

}  // namespace atmesh
