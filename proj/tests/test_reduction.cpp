#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "loop_lc/reduction.hpp"

using namespace loop_lc;
using namespace test_support;

namespace {

LinConProblem eq_problem(const Mat& a_eq, const Vec& b_eq, Objective f = Objective::builtin("sum_squares")) {
  return make_problem(a_eq, Mat::Zero(a_eq.rows(), 0), b_eq, Mat::Zero(0, a_eq.cols()), Mat::Zero(0, 0),
                      Vec::Zero(0), std::move(f));
}

}  // namespace

TEST_CASE("partition picks the first pivot for [1, 1]") {
  const VariablePartition part = partition_variables(eq_problem(rows(1, 2, {1, 1}), vec({0})));
  CHECK(part.dep_idx == IndexList{0});
  CHECK(part.indep_idx == IndexList{1});
}

TEST_CASE("partition picks the largest column under pivoting") {
  // Column norms 0, 2, 1: the pivoted factorisation starts with column 1.
  const VariablePartition part = partition_variables(eq_problem(rows(1, 3, {0, 2, 1}), vec({0})));
  CHECK(part.dep_idx == IndexList{1});
  CHECK(part.indep_idx == IndexList{0, 2});
}

TEST_CASE("partition rejects rank-deficient equalities") {
  CHECK_THROWS_AS(partition_variables(eq_problem(rows(2, 3, {0, 1, 0, 0, 0, 0}), vec({0, 0}))),
                  RankDeficientError);
  CHECK_THROWS_AS(reduce(eq_problem(rows(2, 3, {0, 1, 0, 0, 0, 0}), vec({0, 0}))), RankDeficientError);
}

TEST_CASE("partition is deterministic and covers every index once") {
  std::mt19937_64 rng(5);
  const LinConProblem p = random_problem(rng, 6, 3, 2, 2);
  const VariablePartition a = partition_variables(p);
  const VariablePartition b = partition_variables(p);
  CHECK(a.dep_idx == b.dep_idx);
  CHECK(a.indep_idx == b.indep_idx);
  std::vector<int> seen(6, 0);
  for (Index i : a.dep_idx) ++seen[static_cast<size_t>(i)];
  for (Index i : a.indep_idx) ++seen[static_cast<size_t>(i)];
  for (int s : seen) CHECK(s == 1);
  CHECK(std::isfinite(a.rcond));
  CHECK(a.rcond > 0.0);
}

TEST_CASE("reconstruct_dependent on u1 + u2 - 1 = 0") {
  const ReducedProblem red = reduce(eq_problem(rows(1, 2, {1, 1}), vec({-1})));
  CHECK(reconstruct_dependent(red, vec({0.25}), Vec::Zero(0))(0) == doctest::Approx(0.75));
  CHECK(reconstruct_dependent(red, vec({0.0}), Vec::Zero(0))(0) == doctest::Approx(1.0));
  const Vec u = lift_solution(red, vec({0.25}), Vec::Zero(0));
  CHECK(u(0) == doctest::Approx(0.75));
  CHECK(u(1) == doctest::Approx(0.25));
}

TEST_CASE("reconstruction matches a dense linear solve") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> ints(-4, 4);
  for (int t = 0; t < 20; ++t) {
    Mat a_eq(2, 3);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 3; ++j) a_eq(i, j) = ints(rng);
    if (oracle::rows_of(a_eq, {0, 1}).fullPivLu().rank() < 2) continue;
    const Mat b_mat = oracle::random_mat(rng, 2, 2);
    const Vec b = oracle::random_vec(rng, 2);
    const LinConProblem p = make_problem(a_eq, b_mat, b, Mat::Zero(0, 3), Mat::Zero(0, 2), Vec::Zero(0),
                                         Objective::builtin("sum_squares"));
    const ReducedProblem red = reduce(p);
    const Vec x = oracle::random_vec(rng, 2);
    const Vec u_indep = oracle::random_vec(rng, 1);
    std::vector<int> indep;
    for (Index i : red.partition.indep_idx) indep.push_back(static_cast<int>(i));
    const Vec dense = oracle::dense_completion(a_eq, -(b_mat * x + b), indep, u_indep);
    CHECK((lift_solution(red, u_indep, x) - dense).norm() < 1e-9);
  }
}

TEST_CASE("reduce without equalities keeps the inequalities") {
  const LinConProblem p = triangle();
  const ReducedProblem red = reduce(p);
  CHECK(red.a_red == p.a_ineq);
  CHECK(red.b_vec_red == p.b_vec_ineq);
  CHECK(red.partition.indep_idx == IndexList{0, 1});
  CHECK(lift_solution(red, vec({0.2, 0.3}), Vec::Zero(0)) == vec({0.2, 0.3}));
}

TEST_CASE("reduce a two-generator dispatch to an interval") {
  // P1 + P2 = D, 0 <= P1 <= 1, 0 <= P2 <= 2, x = D.
  const Mat a_ineq = rows(4, 2, {1, 0, 0, 1, -1, 0, 0, -1});
  const LinConProblem p = make_problem(rows(1, 2, {1, 1}), rows(1, 1, {-1}), vec({0}), a_ineq, Mat::Zero(4, 1),
                                       vec({-1, -2, 0, 0}), Objective::builtin("sum_squares"));
  const ReducedProblem red = reduce(p);
  REQUIRE(red.partition.dep_idx == IndexList{0});
  // P1 = D - P2: rows become  D - P2 <= 1,  P2 <= 2,  P2 - D <= 0,  -P2 <= 0.
  CHECK(red.a_red == rows(4, 1, {-1, 1, 1, -1}));
  CHECK(red.b_mat_red == rows(4, 1, {1, 0, -1, 0}));
  CHECK(red.b_vec_red == vec({-1, -2, 0, 0}));
  // D = 2.5 gives P2 in [1.5, 2].
  const Vec x = vec({2.5});
  CHECK(red.residual(vec({1.5}), x).maxCoeff() == doctest::Approx(0.0));
  CHECK(red.residual(vec({2.0}), x).maxCoeff() == doctest::Approx(0.0));
  CHECK(red.residual(vec({1.75}), x).maxCoeff() < 0.0);
  CHECK(red.residual(vec({1.4}), x).maxCoeff() > 0.0);
}

TEST_CASE("reduced feasibility matches full feasibility under sampling") {
  std::mt19937_64 rng(23);
  const LinConProblem p = random_problem(rng, 5, 2, 4, 2);
  const ReducedProblem red = reduce(p);
  int inside = 0;
  for (int t = 0; t < 4000; ++t) {
    const Vec x = oracle::random_vec(rng, 2, -0.5, 0.5);
    const Vec u_indep = oracle::random_vec(rng, 3, -1.5, 1.5);
    const Vec u = lift_solution(red, u_indep, x);
    CHECK(p.eq_residual(u, x).cwiseAbs().maxCoeff() <= 1e-9);
    const bool reduced_ok = (red.residual(u_indep, x).array() <= 0.0).all();
    const Vec full = p.ineq_residual(u, x);
    const bool full_ok = (full.array() <= 1e-12).all();
    const bool full_strict = (full.array() <= -1e-12).all();
    if (reduced_ok) {
      ++inside;
      CHECK(full_ok);
    } else {
      CHECK_FALSE(full_strict);
    }
  }
  CHECK(inside > 20);

  // The other direction: feasible full points restrict to feasible reduced points.
  int full_hits = 0;
  for (int t = 0; t < 4000; ++t) {
    const Vec x = oracle::random_vec(rng, 2, -0.5, 0.5);
    const Vec u_indep = oracle::random_vec(rng, 3, -1.5, 1.5);
    const Vec u = lift_solution(red, u_indep, x);
    if ((p.ineq_residual(u, x).array() <= 0.0).all()) {
      ++full_hits;
      CHECK((red.residual(u_indep, x).array() <= 1e-12).all());
    }
  }
  CHECK(full_hits > 20);
}

TEST_CASE("lift satisfies equalities on random instances") {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 50; ++t) {
    const LinConProblem p = random_problem(rng, 6, 3, 2, 3);
    const ReducedProblem red = reduce(p);
    const Vec x = oracle::random_vec(rng, 3);
    const Vec u = lift_solution(red, oracle::random_vec(rng, 3, -10, 10), x);
    CHECK(p.eq_residual(u, x).cwiseAbs().maxCoeff() <= kEqualityTolerance);
  }
}

TEST_CASE("reduced objective without equalities") {
  const LinConProblem p = ineq_only(Mat::Zero(0, 2), Vec::Zero(0), Objective::quadratic(Mat::Identity(2, 2), vec({0, 0})));
  const ReducedProblem red = reduce(p);
  const ReducedObjective r = reduced_objective(red, vec({0.3, -0.2}), Vec::Zero(0));
  CHECK(r.grad == vec({0.3, -0.2}));
}

TEST_CASE("reduced objective chain rule by hand") {
  // f = ||u||^2 / 2 with u1 + u2 = 1 and u2 = 0.25 independent.
  const ReducedProblem red =
      reduce(eq_problem(rows(1, 2, {1, 1}), vec({-1}), Objective::quadratic(Mat::Identity(2, 2), vec({0, 0}))));
  const ReducedObjective r = reduced_objective(red, vec({0.25}), Vec::Zero(0));
  CHECK(r.value == doctest::Approx(0.3125));
  CHECK(r.grad(0) == doctest::Approx(-0.5));
}

TEST_CASE("reduced objective gradient matches finite differences") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 20; ++t) {
    LinConProblem p = random_problem(rng, 5, 2, 1, 2);
    const Mat l = oracle::random_mat(rng, 5, 5);
    p.objective = Objective::quadratic(l * l.transpose(), oracle::random_vec(rng, 5));
    const ReducedProblem red = reduce(p);
    const Vec x = oracle::random_vec(rng, 2);
    const Vec u = oracle::random_vec(rng, 3);
    const Vec fd = oracle::fd_gradient([&](const Vec& v) { return reduced_objective(red, v, x).value; }, u);
    CHECK(oracle::rel_err(reduced_objective(red, u, x).grad, fd) < 1e-5);
  }
}

TEST_CASE("reduction reports dimension errors") {
  const ReducedProblem red = reduce(eq_problem(rows(1, 2, {1, 1}), vec({-1})));
  CHECK_THROWS_AS(lift_solution(red, vec({1, 2}), Vec::Zero(0)), DimensionError);
  CHECK_THROWS_AS(reconstruct_dependent(red, vec({1}), vec({1})), DimensionError);
}
