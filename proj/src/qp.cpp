#include "loop_lc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "loop_lc/linalg.hpp"
#include "loop_lc/lp.hpp"

namespace loop_lc {

namespace {

Vec feasible_start(const QpProblem& qp) {
  StandardFormLP lp;
  lp.cost = Vec::Zero(qp.a.cols());
  lp.a = qp.a;
  lp.b = qp.b;
  lp.bounds.assign(static_cast<size_t>(qp.a.cols()),
                   VariableBounds{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()});
  const LpResult r = solve_lp(lp);
  if (r.status != LpStatus::optimal) throw InfeasibleError("solve_qp: constraint set is empty");
  return r.solution;
}

// Orthonormal basis of { p : rows p = 0 }.
Mat null_space(const Mat& rows, Index n) {
  if (rows.rows() == 0) return Mat::Identity(n, n);
  Eigen::HouseholderQR<Mat> qr(rows.transpose());
  const Mat q = qr.householderQ() * Mat::Identity(n, n);
  return q.rightCols(n - rows.rows());
}

}  // namespace

QpSolution solve_qp(const QpProblem& qp, const QpOptions& options) {
  const Index n = qp.q.rows();
  const Index m = qp.a.rows();
  require_dims(qp.q.cols() == n && qp.c.size() == n, "solve_qp: Q and c disagree");
  require_dims(qp.a.cols() == n && qp.b.size() == m, "solve_qp: constraint rows disagree");
  const Mat q = 0.5 * (qp.q + qp.q.transpose());
  if (n > 0) {
    const double min_eig = Eigen::SelfAdjointEigenSolver<Mat>(q, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    if (min_eig < options.psd_floor) throw Error("solve_qp: Q is not positive semidefinite");
  }

  QpSolution sol;
  sol.u = m > 0 ? feasible_start(qp) : Vec::Zero(n);
  sol.multipliers = Vec::Zero(m);

  // Start from an independent subset of the rows active at the start point.
  IndexList working;
  {
    IndexList active;
    for (Index i = 0; i < m; ++i)
      if (qp.a.row(i).dot(sol.u) - qp.b(i) >= -options.active_tol) active.push_back(i);
    if (!active.empty()) {
      const ColumnSelection sel = select_independent_columns(select_rows(qp.a, active).transpose());
      for (Index k : sel.selected) working.push_back(active[static_cast<size_t>(k)]);
      std::sort(working.begin(), working.end());
    }
  }

  const Index cap = options.max_iterations > 0 ? options.max_iterations : 50 * (m + n) + 100;
  for (Index it = 0; it < cap; ++it) {
    sol.iterations = it + 1;
    const Mat aw = select_rows(qp.a, working);
    const Mat z = null_space(aw, n);
    const Vec g = q * sol.u + qp.c;

    Vec p = Vec::Zero(n);
    bool ray = false;
    if (z.cols() > 0) {
      const Mat h = z.transpose() * q * z;
      const Vec zg = z.transpose() * g;
      Eigen::SelfAdjointEigenSolver<Mat> eig(h);
      const Vec& lam = eig.eigenvalues();
      const Mat& vecs = eig.eigenvectors();
      const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
      Vec coeff = vecs.transpose() * zg;
      Vec step = Vec::Zero(h.rows());
      Vec flat = Vec::Zero(h.rows());  // component of zg along zero curvature
      for (Index k = 0; k < h.rows(); ++k) {
        if (lam(k) > 1e-12 * scale) {
          step(k) = -coeff(k) / lam(k);
        } else {
          flat(k) = coeff(k);
        }
      }
      if (flat.norm() > 1e-12 * std::max(1.0, zg.norm())) {
        // Linear decrease along a direction of zero curvature.
        p = -z * (vecs * flat);
        ray = true;
      } else {
        p = z * (vecs * step);
      }
    }

    if (!ray && p.norm() <= options.step_tol * std::max(1.0, sol.u.norm())) {
      // Stationary on the working set: check multiplier signs.
      sol.multipliers.setZero();
      if (!working.empty()) {
        const Vec lam = aw.transpose().colPivHouseholderQr().solve(-g);
        Index worst = -1;
        double worst_val = -options.multiplier_tol;
        for (size_t k = 0; k < working.size(); ++k) {
          if (lam(static_cast<Index>(k)) < worst_val) {
            worst_val = lam(static_cast<Index>(k));
            worst = static_cast<Index>(k);
          }
        }
        if (worst >= 0) {
          working.erase(working.begin() + worst);
          continue;
        }
        for (size_t k = 0; k < working.size(); ++k)
          sol.multipliers(working[k]) = std::max(0.0, lam(static_cast<Index>(k)));
      }
      sol.active = working;
      return sol;
    }

    double alpha = ray ? std::numeric_limits<double>::infinity() : 1.0;
    Index blocking = -1;
    for (Index i = 0; i < m; ++i) {
      if (std::find(working.begin(), working.end(), i) != working.end()) continue;
      const double ap = qp.a.row(i).dot(p);
      if (ap <= 1e-14 * std::max(1.0, p.norm())) continue;
      const double slack = std::max(0.0, qp.b(i) - qp.a.row(i).dot(sol.u));
      const double t = slack / ap;
      if (t < alpha) {
        alpha = t;
        blocking = i;
      }
    }
    if (!std::isfinite(alpha)) throw NumericalError("solve_qp: objective is unbounded below on the feasible set");
    sol.u += alpha * p;
    if (blocking >= 0) {
      working.push_back(blocking);
      std::sort(working.begin(), working.end());
    }
  }
  std::ostringstream os;
  os << "solve_qp: no convergence after " << cap << " iterations";
  throw NumericalError(os.str());
}

double kkt_residual(const QpProblem& qp, const Vec& u, const Vec& multipliers) {
  const Vec stationarity = 0.5 * (qp.q + qp.q.transpose()) * u + qp.c + qp.a.transpose() * multipliers;
  double r = stationarity.size() ? stationarity.cwiseAbs().maxCoeff() : 0.0;
  for (Index i = 0; i < qp.a.rows(); ++i) {
    const double s = qp.a.row(i).dot(u) - qp.b(i);
    r = std::max({r, s, -multipliers(i), std::abs(multipliers(i) * s)});
  }
  return r;
}

QpProblem reduced_qp(const ReducedProblem& red, const Vec& x) {
  const auto& form = red.parent->objective.quadratic_form();
  if (!form) throw Error("reduced_qp: the objective has no quadratic form");
  const Index n = red.parent->n_opt;
  const Index k = red.n_indep();
  // u = L u_indep + l
  Mat lin = Mat::Zero(n, k);
  for (Index j = 0; j < k; ++j) lin(red.partition.indep_idx[static_cast<size_t>(j)], j) = 1.0;
  for (Index d = 0; d < red.partition.n_dep(); ++d)
    lin.row(red.partition.dep_idx[static_cast<size_t>(d)]) = -red.dep_from_indep.row(d);
  const Vec l = lift_solution(red, Vec::Zero(k), x);

  QpProblem qp;
  qp.q = lin.transpose() * form->q * lin;
  qp.c = lin.transpose() * (form->q * l + form->c);
  qp.a = red.a_red;
  qp.b = -red.offset(x);
  return qp;
}

Vec solve_reference(const ReducedProblem& red, const Vec& x) {
  return lift_solution(red, solve_qp(reduced_qp(red, x)).u, x);
}

Vec project_onto_polytope(const ReducedProblem& red, const Vec& x, const Vec& y) {
  require_dims(y.size() == red.n_indep(), "project_onto_polytope: y has wrong size");
  QpProblem qp;
  qp.q = 2.0 * Mat::Identity(y.size(), y.size());
  qp.c = -2.0 * y;
  qp.a = red.a_red;
  qp.b = -red.offset(x);
  return solve_qp(qp).u;
}

}  // namespace loop_lc
