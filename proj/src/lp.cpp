#include "loop_lc/lp.hpp"

#include <cmath>

namespace loop_lc {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

// Original variable j = offset + sum coef_k * internal_k with internal_k >= 0.
struct VariableMap {
  double offset = 0.0;
  Index pos = -1;
  double pos_coef = 1.0;
  Index neg = -1;
};

enum class SimplexOutcome { optimal, unbounded };

class Tableau {
 public:
  Tableau(Mat t, IndexList basis) : t_(std::move(t)), basis_(std::move(basis)) {}

  Index rows() const { return t_.rows(); }
  Index cols() const { return t_.cols() - 1; }
  double rhs(Index i) const { return t_(i, cols()); }
  double at(Index i, Index j) const { return t_(i, j); }
  const IndexList& basis() const { return basis_; }

  void pivot(Index r, Index c) {
    t_.row(r) /= t_(r, c);
    for (Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double factor = t_(i, c);
      if (factor != 0.0) t_.row(i) -= factor * t_.row(r);
    }
    basis_[static_cast<size_t>(r)] = c;
  }

  void drop_rows(const std::vector<bool>& drop) {
    IndexList keep;
    for (Index i = 0; i < rows(); ++i)
      if (!drop[static_cast<size_t>(i)]) keep.push_back(i);
    Mat t(static_cast<Index>(keep.size()), t_.cols());
    IndexList basis;
    for (size_t k = 0; k < keep.size(); ++k) {
      t.row(static_cast<Index>(k)) = t_.row(keep[k]);
      basis.push_back(basis_[static_cast<size_t>(keep[k])]);
    }
    t_ = std::move(t);
    basis_ = std::move(basis);
  }

  void keep_leading_columns(Index n) {
    Mat t(t_.rows(), n + 1);
    t.leftCols(n) = t_.leftCols(n);
    t.col(n) = t_.col(t_.cols() - 1);
    t_ = std::move(t);
  }

  SimplexOutcome run(const Vec& cost, Index allowed_cols, const LpOptions& opt, Index& iterations,
                     bool& bland_engaged) {
    const Index m = rows();
    const Index n = cols();
    const Index bland_cap = 10 * (m + n);
    const Index hard_cap = 200 * (m + n) + 1000;
    int degenerate_run = 0;
    Index bland_pivots = 0;
    Index local = 0;
    std::vector<bool> is_basic(static_cast<size_t>(n), false);

    while (true) {
      std::fill(is_basic.begin(), is_basic.end(), false);
      Vec cb(m);
      for (Index i = 0; i < m; ++i) {
        cb(i) = cost(basis_[static_cast<size_t>(i)]);
        is_basic[static_cast<size_t>(basis_[static_cast<size_t>(i)])] = true;
      }
      const Vec reduced = cost.head(n) - t_.leftCols(n).transpose() * cb;

      Index entering = -1;
      double most_negative = -opt.optimality_tol;
      for (Index j = 0; j < allowed_cols; ++j) {
        if (is_basic[static_cast<size_t>(j)]) continue;
        if (bland_engaged) {
          if (reduced(j) < -opt.optimality_tol) {
            entering = j;
            break;
          }
        } else if (reduced(j) < most_negative) {
          most_negative = reduced(j);
          entering = j;
        }
      }
      if (entering < 0) return SimplexOutcome::optimal;

      Index leaving = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m; ++i) {
        const double piv = t_(i, entering);
        if (piv <= opt.pivot_tol) continue;
        const double ratio = std::max(rhs(i), 0.0) / piv;
        if (leaving < 0 || ratio < best_ratio - 1e-12) {
          best_ratio = ratio;
          leaving = i;
        } else if (ratio <= best_ratio + 1e-12) {
          const bool prefer = bland_engaged
                                  ? basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leaving)]
                                  : piv > t_(leaving, entering);
          if (prefer) {
            leaving = i;
            best_ratio = std::min(best_ratio, ratio);
          }
        }
      }
      if (leaving < 0) {
        // Column `entering` is an unbounded ray.
        return SimplexOutcome::unbounded;
      }

      degenerate_run = best_ratio <= opt.feasibility_tol ? degenerate_run + 1 : 0;
      if (!bland_engaged && degenerate_run >= opt.degenerate_before_bland) bland_engaged = true;

      pivot(leaving, entering);
      ++iterations;
      ++local;
      if (bland_engaged && ++bland_pivots > bland_cap)
        throw NumericalError("simplex: iteration cap reached after Bland's rule engaged");
      if (local > hard_cap) throw NumericalError("simplex: iteration cap reached");
    }
  }

 private:
  Mat t_;
  IndexList basis_;
};

}  // namespace

LpResult solve_lp(const StandardFormLP& lp, const LpOptions& opt) {
  const Index n_orig = lp.cost.size();
  const Index m_orig = lp.a.rows();
  require_dims(lp.a.cols() == n_orig || m_orig == 0, "solve_lp: a has wrong column count");
  require_dims(lp.b.size() == m_orig, "solve_lp: b has wrong length");
  require_dims(lp.sense.empty() || static_cast<Index>(lp.sense.size()) == m_orig,
               "solve_lp: sense has wrong length");
  require_dims(lp.bounds.empty() || static_cast<Index>(lp.bounds.size()) == n_orig,
               "solve_lp: bounds has wrong length");

  // Substitute bounded / free variables by non-negative internal ones.
  std::vector<VariableMap> vars(static_cast<size_t>(n_orig));
  std::vector<std::pair<Index, double>> upper_rows;  // (internal col, bound)
  Index n_int = 0;
  for (Index j = 0; j < n_orig; ++j) {
    const VariableBounds bd = lp.bounds.empty() ? VariableBounds{} : lp.bounds[static_cast<size_t>(j)];
    VariableMap& vm = vars[static_cast<size_t>(j)];
    if (std::isfinite(bd.lower)) {
      vm.offset = bd.lower;
      vm.pos = n_int++;
      if (std::isfinite(bd.upper)) upper_rows.emplace_back(vm.pos, bd.upper - bd.lower);
    } else if (std::isfinite(bd.upper)) {
      vm.offset = bd.upper;
      vm.pos = n_int++;
      vm.pos_coef = -1.0;
    } else {
      vm.pos = n_int++;
      vm.neg = n_int++;
    }
  }

  const Index m = m_orig + static_cast<Index>(upper_rows.size());
  Mat a_int = Mat::Zero(m, n_int);
  Vec b_int(m);
  std::vector<RowSense> sense(static_cast<size_t>(m), RowSense::less_equal);
  Vec c_int = Vec::Zero(n_int);
  double c_offset = 0.0;
  for (Index j = 0; j < n_orig; ++j) {
    const VariableMap& vm = vars[static_cast<size_t>(j)];
    c_offset += lp.cost(j) * vm.offset;
    c_int(vm.pos) += lp.cost(j) * vm.pos_coef;
    if (vm.neg >= 0) c_int(vm.neg) -= lp.cost(j);
  }
  for (Index i = 0; i < m_orig; ++i) {
    double shift = 0.0;
    for (Index j = 0; j < n_orig; ++j) {
      const double aij = lp.a(i, j);
      if (aij == 0.0) continue;
      const VariableMap& vm = vars[static_cast<size_t>(j)];
      shift += aij * vm.offset;
      a_int(i, vm.pos) += aij * vm.pos_coef;
      if (vm.neg >= 0) a_int(i, vm.neg) -= aij;
    }
    b_int(i) = lp.b(i) - shift;
    if (!lp.sense.empty()) sense[static_cast<size_t>(i)] = lp.sense[static_cast<size_t>(i)];
  }
  for (size_t k = 0; k < upper_rows.size(); ++k) {
    const Index i = m_orig + static_cast<Index>(k);
    a_int(i, upper_rows[k].first) = 1.0;
    b_int(i) = upper_rows[k].second;
  }

  // Slack columns, then sign-normalise so that b >= 0.
  Index n_slack = 0;
  for (auto s : sense)
    if (s != RowSense::equal) ++n_slack;
  const Index n_struct = n_int + n_slack;
  Mat a_eq = Mat::Zero(m, n_struct);
  a_eq.leftCols(n_int) = a_int;
  Index slack = n_int;
  for (Index i = 0; i < m; ++i) {
    const RowSense s = sense[static_cast<size_t>(i)];
    if (s == RowSense::less_equal) a_eq(i, slack++) = 1.0;
    if (s == RowSense::greater_equal) a_eq(i, slack++) = -1.0;
  }
  Vec b_eq = b_int;
  for (Index i = 0; i < m; ++i) {
    if (b_eq(i) < 0.0) {
      a_eq.row(i) *= -1.0;
      b_eq(i) *= -1.0;
    }
  }
  Vec cost_struct = Vec::Zero(n_struct);
  cost_struct.head(n_int) = c_int;

  // Phase I on [A | I | b] with artificial basis.
  Mat t = Mat::Zero(m, n_struct + m + 1);
  t.leftCols(n_struct) = a_eq;
  t.block(0, n_struct, m, m) = Mat::Identity(m, m);
  t.col(n_struct + m) = b_eq;
  IndexList basis(static_cast<size_t>(m));
  for (Index i = 0; i < m; ++i) basis[static_cast<size_t>(i)] = n_struct + i;
  Tableau tab(std::move(t), std::move(basis));

  LpResult res;
  Vec phase1_cost = Vec::Zero(n_struct + m);
  phase1_cost.tail(m).setOnes();
  tab.run(phase1_cost, n_struct + m, opt, res.iterations, res.bland_engaged);

  double infeasibility = 0.0;
  for (Index i = 0; i < tab.rows(); ++i)
    if (tab.basis()[static_cast<size_t>(i)] >= n_struct) infeasibility += std::max(tab.rhs(i), 0.0);
  const double b_scale = 1.0 + (m > 0 ? b_eq.cwiseAbs().maxCoeff() : 0.0);
  if (infeasibility > opt.feasibility_tol * b_scale) {
    res.status = LpStatus::infeasible;
    return res;
  }

  // Drive remaining artificials out of the basis; rows where that is
  // impossible are redundant.
  std::vector<bool> drop(static_cast<size_t>(tab.rows()), false);
  bool any_drop = false;
  for (Index i = 0; i < tab.rows(); ++i) {
    if (tab.basis()[static_cast<size_t>(i)] < n_struct) continue;
    Index best = -1;
    double best_abs = opt.pivot_tol;
    for (Index j = 0; j < n_struct; ++j) {
      if (std::abs(tab.at(i, j)) > best_abs) {
        best_abs = std::abs(tab.at(i, j));
        best = j;
      }
    }
    if (best >= 0) {
      tab.pivot(i, best);
    } else {
      drop[static_cast<size_t>(i)] = true;
      any_drop = true;
    }
  }
  IndexList kept_rows;
  for (Index i = 0; i < m; ++i)
    if (!drop[static_cast<size_t>(i)]) kept_rows.push_back(i);
  if (any_drop) tab.drop_rows(drop);
  tab.keep_leading_columns(n_struct);

  // Phase II.
  const SimplexOutcome outcome = tab.run(cost_struct, n_struct, opt, res.iterations, res.bland_engaged);

  Vec p = Vec::Zero(n_struct);
  for (Index i = 0; i < tab.rows(); ++i) p(tab.basis()[static_cast<size_t>(i)]) = std::max(tab.rhs(i), 0.0);
  res.solution.resize(n_orig);
  for (Index j = 0; j < n_orig; ++j) {
    const VariableMap& vm = vars[static_cast<size_t>(j)];
    double val = vm.offset + vm.pos_coef * p(vm.pos);
    if (vm.neg >= 0) val -= p(vm.neg);
    res.solution(j) = val;
  }
  res.objective = n_orig > 0 ? lp.cost.dot(res.solution) : 0.0;
  res.basis = tab.basis();

  if (outcome == SimplexOutcome::unbounded) {
    res.status = LpStatus::unbounded;
    return res;
  }
  res.status = LpStatus::optimal;

  // Dual reconstruction from the final basis.
  const Index mk = static_cast<Index>(kept_rows.size());
  if (mk > 0) {
    Mat bmat(mk, mk);
    Vec cb(mk), bk(mk);
    for (Index r = 0; r < mk; ++r) {
      bk(r) = b_eq(kept_rows[static_cast<size_t>(r)]);
      cb(r) = cost_struct(res.basis[static_cast<size_t>(r)]);
      for (Index c = 0; c < mk; ++c)
        bmat(r, c) = a_eq(kept_rows[static_cast<size_t>(r)], res.basis[static_cast<size_t>(c)]);
    }
    const Vec y = bmat.transpose().partialPivLu().solve(cb);
    Mat a_kept(mk, n_struct);
    for (Index r = 0; r < mk; ++r) a_kept.row(r) = a_eq.row(kept_rows[static_cast<size_t>(r)]);
    res.dual_objective = y.dot(bk) + c_offset;
    res.min_reduced_cost = n_struct > 0 ? (cost_struct - a_kept.transpose() * y).minCoeff() : 0.0;
  } else {
    res.dual_objective = c_offset;
    res.min_reduced_cost = n_struct > 0 ? cost_struct.minCoeff() : 0.0;
  }
  return res;
}

}  // namespace loop_lc
