#include "loop_lc/reduction.hpp"

#include <algorithm>
#include <cmath>

#include "loop_lc/linalg.hpp"

namespace loop_lc {

VariablePartition partition_variables(const LinConProblem& problem) {
  const Index n_eq = problem.n_eq();
  const Index n_opt = problem.n_opt;
  VariablePartition part;
  if (n_eq == 0) {
    part.indep_idx.resize(static_cast<size_t>(n_opt));
    for (Index i = 0; i < n_opt; ++i) part.indep_idx[static_cast<size_t>(i)] = i;
    return part;
  }
  if (n_eq >= n_opt)
    throw RankDeficientError("equality block is not under-determined (n_eq >= n_opt)");

  const ColumnSelection sel = select_independent_columns(problem.a_eq, kRankTolerance);
  if (sel.rank < n_eq)
    throw RankDeficientError("a_eq has rank " + std::to_string(sel.rank) + " < n_eq " +
                             std::to_string(n_eq) + "; no nonsingular dependent block");

  part.dep_idx = sel.selected;
  std::sort(part.dep_idx.begin(), part.dep_idx.end());
  part.indep_idx = complement(part.dep_idx, n_opt);
  const Mat dep_block = select_columns(problem.a_eq, part.dep_idx);
  part.dep_lu.compute(dep_block);
  part.rcond = part.dep_lu.rcond();
  if (!std::isfinite(part.rcond) || part.rcond <= 0.0)
    throw RankDeficientError("dependent block of a_eq is numerically singular");
  return part;
}

Vec ReducedProblem::residual(const Vec& u_indep, const Vec& x) const {
  require_dims(u_indep.size() == n_indep() && x.size() == n_inp(),
               "reduced residual: dimension mismatch");
  return a_red * u_indep + b_mat_red * x + b_vec_red;
}

ReducedProblem reduce(std::shared_ptr<const LinConProblem> problem) {
  const LinConProblem& p = *problem;
  const ValidationReport rep = validate(p);
  if (!rep.ok) {
    std::string msg = "problem failed validation:";
    for (const auto& f : rep.findings) msg += " " + f + ";";
    if (rep.rank < p.n_eq() && p.n_eq() < p.n_opt) throw RankDeficientError(msg);
    throw DimensionError(msg);
  }

  ReducedProblem red;
  red.partition = partition_variables(p);
  const VariablePartition& part = red.partition;
  const Mat a_ineq_indep = select_columns(p.a_ineq, part.indep_idx);

  if (part.n_dep() == 0) {
    red.a_red = a_ineq_indep;
    red.b_mat_red = p.b_mat_ineq;
    red.b_vec_red = p.b_vec_ineq;
    red.dep_from_indep = Mat(0, part.n_indep());
    red.dep_from_input = Mat(0, p.n_inp);
    red.dep_offset = Vec(0);
  } else {
    const Mat a_eq_indep = select_columns(p.a_eq, part.indep_idx);
    const Mat a_ineq_dep = select_columns(p.a_ineq, part.dep_idx);
    red.dep_from_indep = part.dep_lu.solve(a_eq_indep);
    red.dep_from_input = part.dep_lu.solve(p.b_mat_eq);
    red.dep_offset = part.dep_lu.solve(p.b_vec_eq);
    red.a_red = a_ineq_indep - a_ineq_dep * red.dep_from_indep;
    red.b_mat_red = p.b_mat_ineq - a_ineq_dep * red.dep_from_input;
    red.b_vec_red = p.b_vec_ineq - a_ineq_dep * red.dep_offset;

    // Direct check: each reduced column equals A_ineq applied to the lifted
    // unit direction, and that direction satisfies the homogeneous equalities.
    const double scale = 1.0 + max_abs(p.a_ineq) * (1.0 + max_abs(red.dep_from_indep));
    for (Index k = 0; k < part.n_indep(); ++k) {
      Vec dir = Vec::Zero(p.n_opt);
      dir(part.indep_idx[static_cast<size_t>(k)]) = 1.0;
      for (Index d = 0; d < part.n_dep(); ++d) dir(part.dep_idx[static_cast<size_t>(d)]) = -red.dep_from_indep(d, k);
      const double col_err = max_abs(p.a_ineq * dir - red.a_red.col(k));
      const double eq_err = max_abs(p.a_eq * dir);
      if (col_err > 1e-8 * scale || eq_err > 1e-8 * scale)
        throw NumericalError("reduced matrix failed verification against direct computation");
    }
  }
  red.parent = std::move(problem);
  return red;
}

ReducedProblem reduce(const LinConProblem& problem) {
  return reduce(std::make_shared<const LinConProblem>(problem));
}

Vec reconstruct_dependent(const ReducedProblem& red, const Vec& u_indep, const Vec& x) {
  require_dims(u_indep.size() == red.n_indep(), "reconstruct_dependent: u_indep has wrong size");
  require_dims(x.size() == red.n_inp(), "reconstruct_dependent: x has wrong size");
  if (red.partition.n_dep() == 0) return Vec(0);
  return -(red.dep_from_indep * u_indep + red.dep_from_input * x + red.dep_offset);
}

Vec lift_solution(const ReducedProblem& red, const Vec& u_indep, const Vec& x) {
  const Vec u_dep = reconstruct_dependent(red, u_indep, x);
  const VariablePartition& part = red.partition;
  Vec full(part.n_indep() + part.n_dep());
  for (Index k = 0; k < part.n_indep(); ++k) full(part.indep_idx[static_cast<size_t>(k)]) = u_indep(k);
  for (Index k = 0; k < part.n_dep(); ++k) full(part.dep_idx[static_cast<size_t>(k)]) = u_dep(k);
  return full;
}

Vec reduce_gradient(const ReducedProblem& red, const Vec& grad_full) {
  const VariablePartition& part = red.partition;
  require_dims(grad_full.size() == part.n_indep() + part.n_dep(), "reduce_gradient: wrong size");
  Vec g = select_entries(grad_full, part.indep_idx);
  if (part.n_dep() > 0) g -= red.dep_from_indep.transpose() * select_entries(grad_full, part.dep_idx);
  return g;
}

ReducedObjective reduced_objective(const ReducedProblem& red, const Vec& u_indep, const Vec& x) {
  const Vec full = lift_solution(red, u_indep, x);
  const Objective& f = red.parent->objective;
  return {f.value(full, x), reduce_gradient(red, f.gradient_u(full, x))};
}

}  // namespace loop_lc
