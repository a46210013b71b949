#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "loop_lc/common.hpp"

namespace loop_lc {

/// f(u, x) = 1/2 u'Qu + c'u
struct QuadraticForm {
  Mat q;
  Vec c;
};

/// Objective f(u, x) as an evaluation/gradient contract. Quadratic and
/// builtin objectives also carry a description so they can be serialised.
class Objective {
 public:
  using ValueFn = std::function<double(const Vec& u, const Vec& x)>;
  using GradientFn = std::function<Vec(const Vec& u, const Vec& x)>;

  Objective() = default;
  Objective(ValueFn value, GradientFn gradient_u)
      : value_(std::move(value)), gradient_(std::move(gradient_u)) {}

  static Objective quadratic(Mat q, Vec c);

  /// Builtins: "sum_squares" (||u||^2), "linear_last" (last coordinate of u),
  /// "nonconvex_wave" (sum u_i^2 + 0.5 sin(4 u_i)).
  static Objective builtin(const std::string& name);

  double value(const Vec& u, const Vec& x) const { return value_(u, x); }
  Vec gradient_u(const Vec& u, const Vec& x) const { return gradient_(u, x); }
  bool valid() const { return static_cast<bool>(value_) && static_cast<bool>(gradient_); }

  const std::optional<QuadraticForm>& quadratic_form() const { return quadratic_; }
  const std::string& builtin_name() const { return builtin_; }

 private:
  ValueFn value_;
  GradientFn gradient_;
  std::optional<QuadraticForm> quadratic_;
  std::string builtin_;
};

/// min f(u,x)  s.t.  A_eq u + B_eq x + b_eq = 0,  A_ineq u + B_ineq x + b_ineq <= 0
struct LinConProblem {
  Mat a_eq;
  Mat b_mat_eq;
  Vec b_vec_eq;
  Mat a_ineq;
  Mat b_mat_ineq;
  Vec b_vec_ineq;
  Index n_opt = 0;
  Index n_inp = 0;
  Objective objective;

  Index n_eq() const { return a_eq.rows(); }
  Index n_ineq() const { return a_ineq.rows(); }

  Vec eq_residual(const Vec& u, const Vec& x) const;
  Vec ineq_residual(const Vec& u, const Vec& x) const;
};

/// Assemble a problem and infer the dimensions from the matrices. Matrices
/// with zero rows must still carry the right column counts.
LinConProblem make_problem(Mat a_eq, Mat b_mat_eq, Vec b_vec_eq, Mat a_ineq, Mat b_mat_ineq,
                           Vec b_vec_ineq, Objective objective);

struct ValidationReport {
  bool ok = true;
  Index rank = 0;
  std::vector<std::string> findings;
};

inline constexpr double kRankTolerance = 1e-10;

ValidationReport validate(const LinConProblem& problem);

/// (u, x) evaluation pair.
using SolutionPair = std::pair<Vec, Vec>;

/// Mean over the batch of ||max(ineq, 0)||_1 + ||eq residual||_1.
double feasibility_gap(const LinConProblem& problem, const std::vector<SolutionPair>& pairs);

/// Per-instance term of feasibility_gap.
double feasibility_violation(const LinConProblem& problem, const Vec& u, const Vec& x);

/// Mean over the batch of ||u - u*||_1 / ||u*||_1.
double optimality_gap(const std::vector<Vec>& predicted, const std::vector<Vec>& reference);

struct MetricsReport {
  double optimality_gap = 0.0;
  double feasibility_gap = 0.0;
  double mean_time_per_instance = 0.0;  // seconds
};

}  // namespace loop_lc
