#include "loop_lc/gauge.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace loop_lc {

ShiftedPolytope build_shifted(const Mat& a, const Vec& offset, const Vec& u_o) {
  require_dims(a.cols() == u_o.size(), "build_shifted: u_o has wrong size");
  require_dims(a.rows() == offset.size(), "build_shifted: offset has wrong size");
  ShiftedPolytope poly;
  poly.f_rows = a;
  poly.g_offsets = -(a * u_o + offset);
  for (Index j = 0; j < poly.g_offsets.size(); ++j) {
    if (!(poly.g_offsets(j) > kInteriorOffsetTolerance)) {
      std::ostringstream os;
      os << "shift point is not strictly interior: row " << j << " has slack "
         << -poly.g_offsets(j) << " (needs < -" << kInteriorOffsetTolerance << ")";
      throw NotInteriorError(os.str(), j, poly.g_offsets(j));
    }
  }
  poly.u_o = u_o;
  return poly;
}

ShiftedPolytope build_shifted(const ReducedProblem& red, const Vec& x, const Vec& u_o) {
  require_dims(x.size() == red.n_inp(), "build_shifted: x has wrong size");
  return build_shifted(red.a_red, red.offset(x), u_o);
}

GaugeEvaluation minkowski_gauge(const ShiftedPolytope& poly, const Vec& c) {
  require_dims(c.size() == poly.dim(), "minkowski_gauge: dimension mismatch");
  GaugeEvaluation out{0.0, 0};
  double best = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < poly.rows(); ++j) {
    const double s = poly.f_rows.row(j).dot(c) / poly.g_offsets(j);
    if (s > best) {
      best = s;
      out.active_row = j;
    }
  }
  out.value = std::max(best, 0.0);
  return out;
}

GaugeEvaluation minkowski_gauge(UnitBall, const Vec& c) {
  GaugeEvaluation out{0.0, 0};
  for (Index i = 0; i < c.size(); ++i) {
    if (std::abs(c(i)) > out.value) {
      out.value = std::abs(c(i));
      out.active_row = i;
    }
  }
  return out;
}

Vec gauge_map(const ShiftedPolytope& poly, const Vec& v) {
  require_dims(v.size() == poly.dim(), "gauge_map: dimension mismatch");
  const double ball = minkowski_gauge(UnitBall{}, v).value;
  if (ball > 1.0 + kBallTolerance) {
    std::ostringstream os;
    os << "gauge_map: ||v||_inf = " << ball << " lies outside the unit ball";
    throw Error(os.str());
  }
  if (ball < kOriginRadius) return poly.u_o;
  const double target = minkowski_gauge(poly, v).value;
  if (!(target > 0.0)) throw NumericalError("gauge_map: polytope is unbounded along v");
  return (ball / target) * v + poly.u_o;
}

double shifted_margin(const ShiftedPolytope& poly, const Vec& u) {
  if (poly.rows() == 0) return -std::numeric_limits<double>::infinity();
  return (poly.f_rows * (u - poly.u_o) - poly.g_offsets).maxCoeff();
}

Vec gauge_map_inverse(const ShiftedPolytope& poly, const Vec& u) {
  require_dims(u.size() == poly.dim(), "gauge_map_inverse: dimension mismatch");
  const Vec w = u - poly.u_o;
  if (poly.rows() > 0) {
    const double margin = shifted_margin(poly, u);
    if (margin > kBallTolerance) {
      std::ostringstream os;
      os << "gauge_map_inverse: point violates the polytope by " << margin;
      throw InfeasibleError(os.str());
    }
  }
  const double ball = minkowski_gauge(UnitBall{}, w).value;
  if (ball < kOriginRadius) return Vec::Zero(u.size());
  return (minkowski_gauge(poly, w).value / ball) * w;
}

Mat gauge_map_jacobian(const ShiftedPolytope& poly, const Vec& v) {
  require_dims(v.size() == poly.dim(), "gauge_map_jacobian: dimension mismatch");
  const Index n = v.size();
  const GaugeEvaluation ball = minkowski_gauge(UnitBall{}, v);
  if (ball.value < kOriginRadius) {
    double radius = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < poly.rows(); ++j) {
      const double l1 = poly.f_rows.row(j).lpNorm<1>();
      if (l1 > 0.0) radius = std::min(radius, poly.g_offsets(j) / l1);
    }
    if (!std::isfinite(radius)) radius = 1.0;
    return radius * Mat::Identity(n, n);
  }
  const GaugeEvaluation target = minkowski_gauge(poly, v);
  if (!(target.value > 0.0)) throw NumericalError("gauge_map_jacobian: polytope is unbounded along v");

  const Index k = ball.active_row;
  const Index j = target.active_row;
  const double sign = v(k) >= 0.0 ? 1.0 : -1.0;
  const double phi_b = ball.value;
  const double phi_s = target.value;

  Vec grad_b = Vec::Zero(n);
  grad_b(k) = sign;
  const Vec grad_s = poly.f_rows.row(j).transpose() / poly.g_offsets(j);
  const Vec grad_ratio = grad_b / phi_s - (phi_b / (phi_s * phi_s)) * grad_s;
  return (phi_b / phi_s) * Mat::Identity(n, n) + v * grad_ratio.transpose();
}

}  // namespace loop_lc
