#pragma once

#include "loop_lc/reduction.hpp"

namespace loop_lc {

/// The reduced polytope shifted by an interior point u_o so that the origin is
/// strictly interior: { w : F w <= g } with g > 0.
struct ShiftedPolytope {
  Mat f_rows;
  Vec g_offsets;
  Vec u_o;

  Index dim() const { return f_rows.cols(); }
  Index rows() const { return f_rows.rows(); }
};

struct UnitBall {};

struct GaugeEvaluation {
  double value = 0.0;
  Index active_row = 0;  // argmax, lowest index on ties
};

inline constexpr double kInteriorOffsetTolerance = 1e-12;
inline constexpr double kOriginRadius = 1e-12;
inline constexpr double kBallTolerance = 1e-9;

/// Throws NotInteriorError naming the first row whose offset is <= 1e-12.
ShiftedPolytope build_shifted(const ReducedProblem& red, const Vec& x, const Vec& u_o);

/// Same construction from raw rows (residual r(u) = a u + offset).
ShiftedPolytope build_shifted(const Mat& a, const Vec& offset, const Vec& u_o);

/// max_j F^j c / g^j clamped below at 0.
GaugeEvaluation minkowski_gauge(const ShiftedPolytope& poly, const Vec& c);
/// ||c||_inf; active_row is the coordinate attaining it.
GaugeEvaluation minkowski_gauge(UnitBall, const Vec& c);

/// T(v) = (phi_B(v) / phi_S(v)) v + u_o; T(0) = u_o.
Vec gauge_map(const ShiftedPolytope& poly, const Vec& v);

/// Inverse of gauge_map for a feasible point u.
Vec gauge_map_inverse(const ShiftedPolytope& poly, const Vec& u);

/// dT/dv at v using the active pieces of both gauges. At the origin the map
/// is not differentiable; r I is returned with r the radius of the largest
/// l-infinity ball inside the shifted polytope (min_j g_j / ||F^j||_1).
Mat gauge_map_jacobian(const ShiftedPolytope& poly, const Vec& v);

/// Largest signed row residual F u' - g for u' = u - u_o. Negative means u is
/// strictly inside the unshifted polytope.
double shifted_margin(const ShiftedPolytope& poly, const Vec& u);

}  // namespace loop_lc
