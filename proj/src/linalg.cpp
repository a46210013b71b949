#include "loop_lc/linalg.hpp"

#include <algorithm>

namespace loop_lc {

ColumnSelection select_independent_columns(const Mat& m, double tol) {
  ColumnSelection out;
  const Index rows = m.rows();
  const Index cols = m.cols();
  Mat residual = m;
  std::vector<bool> used(static_cast<size_t>(cols), false);

  for (Index step = 0; step < std::min(rows, cols); ++step) {
    Index best = -1;
    double best_norm = tol;
    for (Index j = 0; j < cols; ++j) {
      if (used[static_cast<size_t>(j)]) continue;
      const double nrm = residual.col(j).norm();
      if (nrm > best_norm) {
        best_norm = nrm;
        best = j;
      }
    }
    if (best < 0) break;
    used[static_cast<size_t>(best)] = true;
    out.selected.push_back(best);
    const Vec q = residual.col(best) / best_norm;
    // Two passes of orthogonalisation keep the residual norms honest.
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < cols; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        residual.col(j) -= q * q.dot(residual.col(j));
      }
    }
    residual.col(best).setZero();
  }
  out.rank = static_cast<Index>(out.selected.size());
  return out;
}

Mat select_columns(const Mat& m, const IndexList& cols) {
  Mat out(m.rows(), static_cast<Index>(cols.size()));
  for (size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = m.col(cols[k]);
  return out;
}

Mat select_rows(const Mat& m, const IndexList& rows) {
  Mat out(static_cast<Index>(rows.size()), m.cols());
  for (size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = m.row(rows[k]);
  return out;
}

Vec select_entries(const Vec& v, const IndexList& idx) {
  Vec out(static_cast<Index>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) out(static_cast<Index>(k)) = v(idx[k]);
  return out;
}

IndexList complement(const IndexList& idx, Index n) {
  std::vector<bool> taken(static_cast<size_t>(n), false);
  for (Index i : idx) taken[static_cast<size_t>(i)] = true;
  IndexList out;
  for (Index i = 0; i < n; ++i)
    if (!taken[static_cast<size_t>(i)]) out.push_back(i);
  return out;
}

}  // namespace loop_lc
