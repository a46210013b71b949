#pragma once

#include <memory>
#include <random>

#include "loop_lc/problem.hpp"
#include "loop_lc/reduction.hpp"
#include "oracles.hpp"

namespace test_support {

using loop_lc::Index;
using loop_lc::LinConProblem;
using loop_lc::Mat;
using loop_lc::Objective;
using loop_lc::Vec;

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Mat rows(Index r, Index c, std::initializer_list<double> xs) {
  Mat m(r, c);
  auto it = xs.begin();
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = *it++;
  return m;
}

/// Inequality-only problem a u + b <= 0 without inputs.
inline LinConProblem ineq_only(const Mat& a, const Vec& b, Objective f = Objective::builtin("sum_squares")) {
  return loop_lc::make_problem(Mat::Zero(0, a.cols()), Mat::Zero(0, 0), Vec::Zero(0), a, Mat::Zero(a.rows(), 0), b,
                               std::move(f));
}

/// {u1, u2 >= 0, u1 + u2 <= 1}
inline LinConProblem triangle() { return ineq_only(rows(3, 2, {-1, 0, 0, -1, 1, 1}), vec({0, 0, -1})); }

/// [lo, hi]^n
inline LinConProblem box(Index n, double lo, double hi, Objective f = Objective::builtin("sum_squares")) {
  Mat a(2 * n, n);
  a << Mat::Identity(n, n), -Mat::Identity(n, n);
  Vec b(2 * n);
  b << Vec::Constant(n, -hi), Vec::Constant(n, lo);
  return ineq_only(a, b, std::move(f));
}

/// Bounded polytope with a strict interior around a random centre: random
/// rows plus a box, offsets depending on an input x of size n_inp. The
/// polytope is nonempty for x in [-1, 1]^n_inp.
inline LinConProblem random_polytope(std::mt19937_64& rng, Index n, Index m_extra, Index n_inp = 2) {
  std::uniform_real_distribution<double> unif(0.2, 1.0);
  const Vec centre = oracle::random_vec(rng, n, -0.5, 0.5);
  Mat a(m_extra + 2 * n, n);
  a.topRows(m_extra) = oracle::random_mat(rng, m_extra, n);
  a.bottomRows(2 * n) << Mat::Identity(n, n), -Mat::Identity(n, n);
  const Index m = a.rows();
  Mat b_mat = 0.05 * oracle::random_mat(rng, m, n_inp);
  Vec b(m);
  for (Index j = 0; j < m; ++j) {
    // a_j centre + b_j + (b_mat x)_j <= -margin for |x| <= 1
    const double margin = unif(rng) + b_mat.row(j).cwiseAbs().sum();
    b(j) = -a.row(j).dot(centre) - margin;
  }
  return loop_lc::make_problem(Mat::Zero(0, n), Mat::Zero(0, n_inp), Vec::Zero(0), a, b_mat, b,
                               Objective::builtin("sum_squares"));
}

/// Random problem with equalities: n_opt variables, n_eq equalities and a box
/// plus random rows, all around a feasible interior point. Input size n_inp.
inline LinConProblem random_problem(std::mt19937_64& rng, Index n_opt, Index n_eq, Index m_extra, Index n_inp) {
  const Vec centre = oracle::random_vec(rng, n_opt, -0.5, 0.5);
  const Vec x0 = Vec::Zero(n_inp);
  Mat a_eq = oracle::random_mat(rng, n_eq, n_opt);
  Mat b_mat_eq = 0.1 * oracle::random_mat(rng, n_eq, n_inp);
  Vec b_eq = -a_eq * centre;
  Mat a(m_extra + 2 * n_opt, n_opt);
  a.topRows(m_extra) = oracle::random_mat(rng, m_extra, n_opt);
  a.bottomRows(2 * n_opt) << Mat::Identity(n_opt, n_opt), -Mat::Identity(n_opt, n_opt);
  Mat b_mat = 0.05 * oracle::random_mat(rng, a.rows(), n_inp);
  std::uniform_real_distribution<double> unif(0.5, 1.0);
  Vec b(a.rows());
  for (Index j = 0; j < a.rows(); ++j) b(j) = -a.row(j).dot(centre) - unif(rng);
  return loop_lc::make_problem(a_eq, b_mat_eq, b_eq, a, b_mat, b, Objective::builtin("sum_squares"));
}

}  // namespace test_support
