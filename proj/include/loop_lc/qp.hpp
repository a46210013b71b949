#pragma once

#include "loop_lc/reduction.hpp"

namespace loop_lc {

/// min 1/2 u'Qu + c'u  s.t.  a u <= b.  Q symmetric PSD.
struct QpProblem {
  Mat q;
  Vec c;
  Mat a;
  Vec b;
};

struct QpSolution {
  Vec u;
  Vec multipliers;  // one per row of a, >= 0, zero off the active set
  IndexList active;
  Index iterations = 0;
};

struct QpOptions {
  double active_tol = 1e-9;
  double step_tol = 1e-12;
  double multiplier_tol = 1e-10;
  double psd_floor = -1e-9;
  Index max_iterations = 0;  // 0: 50 (m + n) + 100
};

/// Primal active-set method with a null-space step. The start point comes from
/// a zero-cost LP. Throws InfeasibleError for an empty set, NumericalError on
/// an unbounded objective or when the iteration cap is hit, and Error when Q
/// has an eigenvalue below psd_floor.
QpSolution solve_qp(const QpProblem& qp, const QpOptions& options = {});

/// max of stationarity, primal, dual and complementarity violations.
double kkt_residual(const QpProblem& qp, const Vec& u, const Vec& multipliers);

/// The parent's quadratic objective restricted to the reduced polytope at x:
/// u = lift(u_indep) is affine, so the result is again a QP over u_indep.
/// Throws if the parent objective carries no quadratic form.
QpProblem reduced_qp(const ReducedProblem& red, const Vec& x);

/// Reference optimum of the full problem at x, via the reduced QP.
Vec solve_reference(const ReducedProblem& red, const Vec& x);

/// argmin ||u - y||^2 over the reduced polytope at x.
Vec project_onto_polytope(const ReducedProblem& red, const Vec& x, const Vec& y);

}  // namespace loop_lc
