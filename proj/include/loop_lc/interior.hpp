#pragma once

#include <string>
#include <vector>

#include "loop_lc/parallel.hpp"
#include "loop_lc/reduction.hpp"

namespace loop_lc {

enum class InteriorMethod { artificial_lp, bfs_average, two_phase };

const char* to_string(InteriorMethod method);

struct InteriorResult {
  Vec point;
  /// max_j (a_red point + b_mat_red x + b_vec_red)_j; negative means strictly interior.
  double margin = 0.0;
  InteriorMethod method = InteriorMethod::artificial_lp;
};

inline constexpr double kDefaultBigM = 1e4;
inline constexpr double kArtificialSlackTolerance = 1e-9;
inline constexpr double kStrictInteriorMargin = 1e-10;

double verify_interior(const ReducedProblem& red, const Vec& x, const Vec& point);

/// min M u_a  s.t.  a_red u + b_mat_red x + b_vec_red - 1 u_a <= 0.
/// Throws EmptyInteriorError when the optimal u_a >= -1e-9.
InteriorResult find_interior_artificial(const ReducedProblem& red, const Vec& x,
                                        double big_m = kDefaultBigM);

/// Index sets of basic solutions of the slack system, built once per problem.
/// Everything here is independent of x.
struct BfsIndexSets {
  struct Basis {
    IndexList columns;       // slack indices kept basic
    Mat z_from_input;        // z_basic = z_from_input x + z_offset
    Vec z_offset;
  };

  IndexList pivot_rows;      // rows of a_red forming the invertible block
  Eigen::PartialPivLU<Mat> pivot_lu;
  Mat a_hat;                 // I - A (A_pivot)^-1 I_pivot
  Index rank = 0;            // rank of a_hat
  std::vector<Basis> bases;  // linearly independent column subsets

  Mat a_red;
  Mat b_mat_red;
  Vec b_vec_red;

  Index subsets_examined = 0;
};

inline constexpr Index kDefaultBfsSubsetCap = 20000;
inline constexpr double kBfsAcceptTolerance = -1e-10;

BfsIndexSets build_bfs_structures(const ReducedProblem& red, Index subset_cap = kDefaultBfsSubsetCap);

/// Mean of all basic feasible points for this x.
InteriorResult find_interior_bfs_average(const BfsIndexSets& structures, const Vec& x,
                                         Execution exec = Execution::parallel);

/// Basic feasible points for this x (one per accepted index set, in order).
std::vector<Vec> basic_feasible_points(const BfsIndexSets& structures, const Vec& x,
                                       Execution exec = Execution::parallel);

}  // namespace loop_lc
