#pragma once

#include <limits>
#include <vector>

#include "loop_lc/common.hpp"

namespace loop_lc {

enum class RowSense { less_equal, equal, greater_equal };

struct VariableBounds {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
};

/// min cost'x  s.t.  a x (sense) b,  lower <= x <= upper.
/// Empty `sense` means every row is <=; empty `bounds` means x >= 0.
struct StandardFormLP {
  Vec cost;
  Mat a;
  Vec b;
  std::vector<RowSense> sense;
  std::vector<VariableBounds> bounds;
};

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vec solution;
  double objective = 0.0;
  /// Basic columns of the internal equality form at termination.
  IndexList basis;
  /// y'b of the dual solution reconstructed from the final basis.
  double dual_objective = 0.0;
  /// min_j (c_j - a_j'y) over internal columns; >= -1e-8 at optimality.
  double min_reduced_cost = 0.0;
  Index iterations = 0;
  bool bland_engaged = false;
};

struct LpOptions {
  double feasibility_tol = 1e-8;
  double pivot_tol = 1e-10;
  double optimality_tol = 1e-9;
  int degenerate_before_bland = 50;
};

/// Dense two-phase tableau simplex, Dantzig pricing with a switch to Bland's
/// rule after `degenerate_before_bland` consecutive degenerate pivots.
/// Throws NumericalError if 10 (m + n) pivots pass after Bland engages.
LpResult solve_lp(const StandardFormLP& lp, const LpOptions& options = {});

}  // namespace loop_lc
