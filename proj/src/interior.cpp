#include "loop_lc/interior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "loop_lc/linalg.hpp"
#include "loop_lc/lp.hpp"

namespace loop_lc {

const char* to_string(InteriorMethod method) {
  switch (method) {
    case InteriorMethod::artificial_lp: return "artificial_lp";
    case InteriorMethod::bfs_average: return "bfs_average";
    case InteriorMethod::two_phase: return "two_phase";
  }
  return "unknown";
}

double verify_interior(const ReducedProblem& red, const Vec& x, const Vec& point) {
  if (red.n_ineq() == 0) return -std::numeric_limits<double>::infinity();
  return red.residual(point, x).maxCoeff();
}

InteriorResult find_interior_artificial(const ReducedProblem& red, const Vec& x, double big_m) {
  if (!(big_m > 0.0)) throw Error("find_interior_artificial: big_m must be positive");
  require_dims(x.size() == red.n_inp(), "find_interior_artificial: x has wrong size");
  const Index n = red.n_indep();
  const Index m = red.n_ineq();

  StandardFormLP lp;
  lp.cost = Vec::Zero(n + 1);
  lp.cost(n) = big_m;
  lp.a.resize(m, n + 1);
  lp.a.leftCols(n) = red.a_red;
  lp.a.col(n).setConstant(-1.0);
  lp.b = -red.offset(x);
  const double inf = std::numeric_limits<double>::infinity();
  lp.bounds.assign(static_cast<size_t>(n + 1), VariableBounds{-inf, inf});

  const LpResult res = solve_lp(lp);
  if (res.status == LpStatus::unbounded)
    throw NumericalError("artificial problem is unbounded: the reduced polytope is unbounded");
  if (res.status != LpStatus::optimal) throw NumericalError("artificial problem could not be solved");

  const double slack = res.solution(n);
  if (slack >= -kArtificialSlackTolerance) {
    std::ostringstream os;
    os << "reduced polytope has no strict interior (artificial slack " << slack << ")";
    throw EmptyInteriorError(os.str());
  }
  InteriorResult out;
  out.point = res.solution.head(n);
  out.margin = verify_interior(red, x, out.point);
  out.method = InteriorMethod::artificial_lp;
  return out;
}

namespace {

double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

// Advance `comb` (strictly increasing, values < n) to the next combination.
bool next_combination(IndexList& comb, Index n) {
  const Index k = static_cast<Index>(comb.size());
  Index i = k - 1;
  while (i >= 0 && comb[static_cast<size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++comb[static_cast<size_t>(i)];
  for (Index j = i + 1; j < k; ++j) comb[static_cast<size_t>(j)] = comb[static_cast<size_t>(j - 1)] + 1;
  return true;
}

}  // namespace

BfsIndexSets build_bfs_structures(const ReducedProblem& red, Index subset_cap) {
  const Mat& a = red.a_red;
  const Index m = a.rows();
  const Index n = a.cols();

  BfsIndexSets out;
  out.a_red = red.a_red;
  out.b_mat_red = red.b_mat_red;
  out.b_vec_red = red.b_vec_red;

  const ColumnSelection rows_sel = select_independent_columns(a.transpose(), kRankTolerance);
  if (rows_sel.rank < n)
    throw RankDeficientError("a_red has rank " + std::to_string(rows_sel.rank) + " < " +
                             std::to_string(n) + "; basic points are not vertices");
  out.pivot_rows = rows_sel.selected;
  std::sort(out.pivot_rows.begin(), out.pivot_rows.end());
  out.pivot_lu.compute(select_rows(a, out.pivot_rows));

  // a_hat = I - A (A_pivot)^-1 I_pivot
  const Mat a_times_inv = a * out.pivot_lu.solve(Mat::Identity(n, n));  // A (A_pivot)^-1
  out.a_hat = Mat::Identity(m, m);
  for (Index c = 0; c < n; ++c) out.a_hat.col(out.pivot_rows[static_cast<size_t>(c)]) -= a_times_inv.col(c);

  // Pivot rows of a_hat vanish; the remaining m - n rows are independent.
  const IndexList free_rows = complement(out.pivot_rows, m);
  out.rank = static_cast<Index>(free_rows.size());
  const Mat a_hat_free = select_rows(out.a_hat, free_rows);
  const Mat b_hat_free = a_hat_free * red.b_mat_red;
  const Vec b_hat_vec_free = a_hat_free * red.b_vec_red;

  const double count = binomial(m, out.rank);
  if (count > static_cast<double>(subset_cap)) {
    std::ostringstream os;
    os << "basic-point enumeration needs " << count << " index sets (cap " << subset_cap
       << "); use the artificial-LP finder instead";
    throw Error(os.str());
  }

  IndexList comb(static_cast<size_t>(out.rank));
  for (Index i = 0; i < out.rank; ++i) comb[static_cast<size_t>(i)] = i;
  do {
    ++out.subsets_examined;
    const Mat block = select_columns(a_hat_free, comb);
    if (out.rank > 0 && pivoted_rank(block, kRankTolerance) < out.rank) continue;
    BfsIndexSets::Basis basis;
    basis.columns = comb;
    if (out.rank > 0) {
      const Eigen::PartialPivLU<Mat> lu(block);
      basis.z_from_input = -lu.solve(b_hat_free);
      basis.z_offset = -lu.solve(b_hat_vec_free);
    } else {
      basis.z_from_input = Mat(0, red.n_inp());
      basis.z_offset = Vec(0);
    }
    out.bases.push_back(std::move(basis));
  } while (out.rank > 0 && next_combination(comb, m));
  return out;
}

namespace {

std::optional<Vec> basic_point(const BfsIndexSets& s, const BfsIndexSets::Basis& basis, const Vec& x) {
  const Vec z_basic = basis.z_from_input * x + basis.z_offset;
  if (z_basic.size() > 0 && z_basic.minCoeff() < kBfsAcceptTolerance) return std::nullopt;
  // u = -(A_pivot)^-1 I_pivot (B x + b + z)
  Vec z_pivot = Vec::Zero(static_cast<Index>(s.pivot_rows.size()));
  for (size_t c = 0; c < basis.columns.size(); ++c) {
    const auto it = std::find(s.pivot_rows.begin(), s.pivot_rows.end(), basis.columns[c]);
    if (it != s.pivot_rows.end()) z_pivot(it - s.pivot_rows.begin()) = z_basic(static_cast<Index>(c));
  }
  const Vec rhs = select_rows(s.b_mat_red, s.pivot_rows) * x + select_entries(s.b_vec_red, s.pivot_rows) + z_pivot;
  return Vec(-s.pivot_lu.solve(rhs));
}

}  // namespace

std::vector<Vec> basic_feasible_points(const BfsIndexSets& s, const Vec& x, Execution exec) {
  require_dims(x.size() == s.b_mat_red.cols(), "basic_feasible_points: x has wrong size");
  const Index count = static_cast<Index>(s.bases.size());
  std::vector<std::optional<Vec>> slots(static_cast<size_t>(count));
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < count; ++i) slots[static_cast<size_t>(i)] = basic_point(s, s.bases[static_cast<size_t>(i)], x);
  } else {
    for (Index i = 0; i < count; ++i) slots[static_cast<size_t>(i)] = basic_point(s, s.bases[static_cast<size_t>(i)], x);
  }
  std::vector<Vec> out;
  for (auto& slot : slots)
    if (slot) out.push_back(std::move(*slot));
  return out;
}

InteriorResult find_interior_bfs_average(const BfsIndexSets& s, const Vec& x, Execution exec) {
  const std::vector<Vec> points = basic_feasible_points(s, x, exec);
  if (points.empty()) throw InfeasibleError("no basic feasible point: the reduced polytope is empty");
  Vec mean = Vec::Zero(s.a_red.cols());
  for (const Vec& p : points) mean += p;
  mean /= static_cast<double>(points.size());

  InteriorResult out;
  out.point = mean;
  out.margin = s.a_red.rows() > 0 ? (s.a_red * mean + s.b_mat_red * x + s.b_vec_red).maxCoeff()
                                  : -std::numeric_limits<double>::infinity();
  out.method = InteriorMethod::bfs_average;
  if (out.margin >= -kStrictInteriorMargin) {
    std::ostringstream os;
    os << "average of " << points.size() << " basic feasible points lies on the boundary (margin "
       << out.margin << "); the polytope has no strict interior";
    throw EmptyInteriorError(os.str());
  }
  return out;
}

}  // namespace loop_lc
