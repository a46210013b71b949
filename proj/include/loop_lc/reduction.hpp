#pragma once

#include <memory>

#include "loop_lc/problem.hpp"

namespace loop_lc {

/// Split of u into independent and dependent coordinates. The dependent
/// columns of A_eq form a nonsingular square block whose LU factorisation is
/// kept; its inverse is never formed.
struct VariablePartition {
  IndexList indep_idx;
  IndexList dep_idx;
  Eigen::PartialPivLU<Mat> dep_lu;
  double rcond = 1.0;

  Index n_indep() const { return static_cast<Index>(indep_idx.size()); }
  Index n_dep() const { return static_cast<Index>(dep_idx.size()); }
};

/// Deterministic column selection for A_eq^Dep by column-pivoted elimination
/// (largest residual norm first, lowest index on ties).
/// Throws RankDeficientError when no nonsingular N_eq-column subset exists.
VariablePartition partition_variables(const LinConProblem& problem);

/// Inequality-only problem over u^Indep:
///   a_red u^Indep + b_mat_red x + b_vec_red <= 0.
/// u^Dep = -(dep_from_indep u^Indep + dep_from_input x + dep_offset).
struct ReducedProblem {
  Mat a_red;
  Mat b_mat_red;
  Vec b_vec_red;
  VariablePartition partition;
  std::shared_ptr<const LinConProblem> parent;

  Mat dep_from_indep;  // (A_eq^Dep)^-1 A_eq^Indep
  Mat dep_from_input;  // (A_eq^Dep)^-1 B_eq
  Vec dep_offset;      // (A_eq^Dep)^-1 b_eq

  Index n_indep() const { return a_red.cols(); }
  Index n_ineq() const { return a_red.rows(); }
  Index n_inp() const { return b_mat_red.cols(); }

  /// a_red u + b_mat_red x + b_vec_red; every entry <= 0 iff feasible.
  Vec residual(const Vec& u_indep, const Vec& x) const;
  /// b_mat_red x + b_vec_red, the x-dependent offset of the rows.
  Vec offset(const Vec& x) const { return b_mat_red * x + b_vec_red; }
};

inline constexpr double kEqualityTolerance = 1e-9;

ReducedProblem reduce(std::shared_ptr<const LinConProblem> problem);
ReducedProblem reduce(const LinConProblem& problem);

Vec reconstruct_dependent(const ReducedProblem& red, const Vec& u_indep, const Vec& x);
Vec lift_solution(const ReducedProblem& red, const Vec& u_indep, const Vec& x);

/// Chain rule through the lift: g_indep - dep_from_indep' g_dep.
Vec reduce_gradient(const ReducedProblem& red, const Vec& grad_full);

struct ReducedObjective {
  double value = 0.0;
  Vec grad;
};
ReducedObjective reduced_objective(const ReducedProblem& red, const Vec& u_indep, const Vec& x);

}  // namespace loop_lc
