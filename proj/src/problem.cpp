#include "loop_lc/problem.hpp"

#include <cmath>
#include <sstream>

#include "loop_lc/linalg.hpp"

namespace loop_lc {

Objective Objective::quadratic(Mat q, Vec c) {
  require_dims(q.rows() == q.cols() && q.rows() == c.size(),
               "quadratic objective: Q must be square and match c");
  Mat qs = 0.5 * (q + q.transpose());
  Objective obj(
      [qs, c](const Vec& u, const Vec&) { return 0.5 * u.dot(qs * u) + c.dot(u); },
      [qs, c](const Vec& u, const Vec&) -> Vec { return qs * u + c; });
  obj.quadratic_ = QuadraticForm{std::move(q), std::move(c)};
  return obj;
}

Objective Objective::builtin(const std::string& name) {
  Objective obj;
  if (name == "sum_squares") {
    obj = Objective([](const Vec& u, const Vec&) { return u.squaredNorm(); },
                    [](const Vec& u, const Vec&) -> Vec { return 2.0 * u; });
  } else if (name == "linear_last") {
    obj = Objective([](const Vec& u, const Vec&) { return u(u.size() - 1); },
                    [](const Vec& u, const Vec&) -> Vec {
                      Vec g = Vec::Zero(u.size());
                      g(u.size() - 1) = 1.0;
                      return g;
                    });
  } else if (name == "nonconvex_wave") {
    obj = Objective(
        [](const Vec& u, const Vec&) {
          return u.squaredNorm() + 0.5 * u.array().unaryExpr([](double t) { return std::sin(4.0 * t); }).sum();
        },
        [](const Vec& u, const Vec&) -> Vec {
          return 2.0 * u + 2.0 * u.unaryExpr([](double t) { return std::cos(4.0 * t); });
        });
  } else {
    throw Error("unknown builtin objective '" + name + "'");
  }
  obj.builtin_ = name;
  return obj;
}

Vec LinConProblem::eq_residual(const Vec& u, const Vec& x) const {
  require_dims(u.size() == n_opt && x.size() == n_inp, "eq_residual: dimension mismatch");
  return a_eq * u + b_mat_eq * x + b_vec_eq;
}

Vec LinConProblem::ineq_residual(const Vec& u, const Vec& x) const {
  require_dims(u.size() == n_opt && x.size() == n_inp, "ineq_residual: dimension mismatch");
  return a_ineq * u + b_mat_ineq * x + b_vec_ineq;
}

LinConProblem make_problem(Mat a_eq, Mat b_mat_eq, Vec b_vec_eq, Mat a_ineq, Mat b_mat_ineq,
                           Vec b_vec_ineq, Objective objective) {
  LinConProblem p;
  p.n_opt = std::max(a_eq.cols(), a_ineq.cols());
  p.n_inp = std::max(b_mat_eq.cols(), b_mat_ineq.cols());
  p.a_eq = std::move(a_eq);
  p.b_mat_eq = std::move(b_mat_eq);
  p.b_vec_eq = std::move(b_vec_eq);
  p.a_ineq = std::move(a_ineq);
  p.b_mat_ineq = std::move(b_mat_ineq);
  p.b_vec_ineq = std::move(b_vec_ineq);
  p.objective = std::move(objective);
  return p;
}

ValidationReport validate(const LinConProblem& p) {
  ValidationReport rep;
  auto fail = [&rep](const std::string& msg) {
    rep.ok = false;
    rep.findings.push_back(msg);
  };
  auto shape = [](const Mat& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
  };

  if (p.n_opt <= 0) fail("n_opt must be positive");
  if (p.a_eq.cols() != p.n_opt) fail("a_eq is " + shape(p.a_eq) + ", expected n_opt columns");
  if (p.a_ineq.cols() != p.n_opt) fail("a_ineq is " + shape(p.a_ineq) + ", expected n_opt columns");
  if (p.b_mat_eq.rows() != p.a_eq.rows() || p.b_mat_eq.cols() != p.n_inp)
    fail("b_mat_eq is " + shape(p.b_mat_eq) + ", expected n_eq x n_inp");
  if (p.b_mat_ineq.rows() != p.a_ineq.rows() || p.b_mat_ineq.cols() != p.n_inp)
    fail("b_mat_ineq is " + shape(p.b_mat_ineq) + ", expected n_ineq x n_inp");
  if (p.b_vec_eq.size() != p.a_eq.rows()) fail("b_vec_eq length does not match n_eq");
  if (p.b_vec_ineq.size() != p.a_ineq.rows()) fail("b_vec_ineq length does not match n_ineq");
  if (!p.objective.valid()) fail("objective is not set");

  const Index n_eq = p.a_eq.rows();
  if (n_eq >= p.n_opt && p.n_opt > 0)
    fail("equality system is not under-determined: n_eq = " + std::to_string(n_eq) +
         " >= n_opt = " + std::to_string(p.n_opt));

  if (n_eq > 0 && p.a_eq.cols() > 0) {
    rep.rank = pivoted_rank(p.a_eq, kRankTolerance);
    if (rep.rank < n_eq)
      fail("a_eq is rank deficient: rank " + std::to_string(rep.rank) + " < n_eq " +
           std::to_string(n_eq));
  }
  return rep;
}

double feasibility_violation(const LinConProblem& p, const Vec& u, const Vec& x) {
  const Vec ineq = p.ineq_residual(u, x);
  const Vec eq = p.eq_residual(u, x);
  return ineq.cwiseMax(0.0).sum() + eq.cwiseAbs().sum();
}

double feasibility_gap(const LinConProblem& p, const std::vector<SolutionPair>& pairs) {
  if (pairs.empty()) throw Error("feasibility_gap: empty batch");
  double total = 0.0;
  for (const auto& [u, x] : pairs) total += feasibility_violation(p, u, x);
  return total / static_cast<double>(pairs.size());
}

double optimality_gap(const std::vector<Vec>& predicted, const std::vector<Vec>& reference) {
  require_dims(predicted.size() == reference.size(), "optimality_gap: batch sizes differ");
  if (predicted.empty()) throw Error("optimality_gap: empty batch");
  double total = 0.0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    require_dims(predicted[i].size() == reference[i].size(),
                 "optimality_gap: vector sizes differ at instance " + std::to_string(i));
    const double ref = reference[i].lpNorm<1>();
    if (ref == 0.0)
      throw Error("optimality_gap: reference solution " + std::to_string(i) + " has zero l1 norm");
    total += (predicted[i] - reference[i]).lpNorm<1>() / ref;
  }
  return total / static_cast<double>(predicted.size());
}

}  // namespace loop_lc
