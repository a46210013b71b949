#pragma once

#include "loop_lc/common.hpp"

namespace loop_lc {

/// Result of greedy column selection on a dense matrix.
struct ColumnSelection {
  IndexList selected;  // in pivot order
  Index rank = 0;
};

/// Column-pivoted Gram-Schmidt: at each step the remaining column with the
/// largest residual norm is taken, lowest index on exact ties. Selection stops
/// when the largest residual norm drops to `tol` (absolute) or the row count is
/// reached.
ColumnSelection select_independent_columns(const Mat& m, double tol = 1e-10);

/// Numerical rank under the same pivoting rule.
inline Index pivoted_rank(const Mat& m, double tol = 1e-10) {
  return select_independent_columns(m, tol).rank;
}

/// Largest absolute entry; 0 for an empty matrix.
inline double max_abs(const Mat& m) { return m.size() > 0 ? m.cwiseAbs().maxCoeff() : 0.0; }

Mat select_columns(const Mat& m, const IndexList& cols);
Mat select_rows(const Mat& m, const IndexList& rows);
Vec select_entries(const Vec& v, const IndexList& idx);

/// Complement of `idx` within [0, n), ascending.
IndexList complement(const IndexList& idx, Index n);

}  // namespace loop_lc
