#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "loop_lc/interior.hpp"

using namespace loop_lc;
using namespace test_support;

namespace {

// u1 + u2 = D, 0 <= P1 <= 1, 0 <= P2 <= 2 with x = D.
LinConProblem two_generators() {
  return make_problem(rows(1, 2, {1, 1}), rows(1, 1, {-1}), vec({0}), rows(4, 2, {1, 0, 0, 1, -1, 0, 0, -1}),
                      Mat::Zero(4, 1), vec({-1, -2, 0, 0}), Objective::builtin("sum_squares"));
}

bool contains(const std::vector<Vec>& pts, const Vec& v) {
  return std::any_of(pts.begin(), pts.end(), [&](const Vec& p) { return (p - v).norm() < 1e-9; });
}

}  // namespace

TEST_CASE("artificial LP finder on the triangle") {
  const ReducedProblem red = reduce(triangle());
  const InteriorResult r = find_interior_artificial(red, Vec::Zero(0));
  CHECK(r.method == InteriorMethod::artificial_lp);
  CHECK(r.margin < -1e-9);
  CHECK(r.margin == doctest::Approx(verify_interior(red, Vec::Zero(0), r.point)));
  // The largest uniform slack in the triangle is 1/3 at its centroid.
  CHECK(r.margin == doctest::Approx(-1.0 / 3));
  CHECK((r.point - vec({1.0 / 3, 1.0 / 3})).norm() < 1e-9);
  CHECK_THROWS_AS(find_interior_artificial(red, Vec::Zero(0), 0.0), Error);
}

TEST_CASE("artificial LP finder on the two-generator interval") {
  const ReducedProblem red = reduce(two_generators());
  // D = 2.5: P2 in [1.5, 2], best uniform slack 0.25 at 1.75
  const InteriorResult r = find_interior_artificial(red, vec({2.5}));
  CHECK(r.point(0) == doctest::Approx(1.75));
  CHECK(r.margin == doctest::Approx(-0.25));
  // D = 3: a single feasible point
  CHECK_THROWS_AS(find_interior_artificial(red, vec({3.0})), EmptyInteriorError);
}

TEST_CASE("a degenerate segment has no interior") {
  // 0 <= u1 <= 1, u2 = 0 written as two inequalities
  const ReducedProblem red = reduce(ineq_only(rows(4, 2, {1, 0, -1, 0, 0, 1, 0, -1}), vec({-1, 0, 0, 0})));
  CHECK_THROWS_AS(find_interior_artificial(red, Vec::Zero(0)), EmptyInteriorError);
  const BfsIndexSets s = build_bfs_structures(red);
  CHECK(basic_feasible_points(s, Vec::Zero(0)).size() >= 2);
  CHECK_THROWS_AS(find_interior_bfs_average(s, Vec::Zero(0)), EmptyInteriorError);
}

TEST_CASE("basic feasible points of the triangle and the box") {
  const ReducedProblem tri = reduce(triangle());
  const BfsIndexSets s = build_bfs_structures(tri);
  // m = 3, n = 2: C(3, 1) index sets, all independent
  CHECK(s.rank == 1);
  CHECK(s.subsets_examined == 3);
  const std::vector<Vec> pts = basic_feasible_points(s, Vec::Zero(0));
  CHECK(pts.size() == 3);
  CHECK(contains(pts, vec({0, 0})));
  CHECK(contains(pts, vec({1, 0})));
  CHECK(contains(pts, vec({0, 1})));
  const InteriorResult avg = find_interior_bfs_average(s, Vec::Zero(0));
  CHECK((avg.point - vec({1.0 / 3, 1.0 / 3})).norm() < 1e-12);
  CHECK(avg.method == InteriorMethod::bfs_average);

  const ReducedProblem sq = reduce(box(2, 0.0, 1.0));
  const BfsIndexSets sb = build_bfs_structures(sq);
  CHECK(sb.subsets_examined == 6);
  const std::vector<Vec> corners = basic_feasible_points(sb, Vec::Zero(0));
  CHECK(corners.size() == 4);
  CHECK((find_interior_bfs_average(sb, Vec::Zero(0)).point - vec({0.5, 0.5})).norm() < 1e-12);
}

TEST_CASE("basic points of the two-generator interval track the input") {
  const ReducedProblem red = reduce(two_generators());
  const BfsIndexSets s = build_bfs_structures(red);
  const std::vector<Vec> pts = basic_feasible_points(s, vec({2.5}));
  CHECK(pts.size() == 2);
  CHECK(contains(pts, vec({1.5})));
  CHECK(contains(pts, vec({2.0})));
  CHECK(find_interior_bfs_average(s, vec({2.5})).point(0) == doctest::Approx(1.75));
  // D = 1: P2 in [0, 1]; P2 = 0 is degenerate (P1 <= 1 and P2 >= 0 both tight)
  // and appears once per basis
  CHECK(basic_feasible_points(s, vec({1.0})).size() == 3);
  CHECK(find_interior_bfs_average(s, vec({1.0})).point(0) == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(find_interior_bfs_average(s, vec({4.0})), InfeasibleError);
}

TEST_CASE("enumeration cap and rank checks") {
  std::mt19937_64 rng(59);
  const ReducedProblem red = reduce(random_polytope(rng, 3, 20, 1));
  CHECK_THROWS_AS(build_bfs_structures(red, 10), Error);
  // a_red of rank 1 in two dimensions
  const ReducedProblem flat = reduce(ineq_only(rows(2, 2, {1, 0, -1, 0}), vec({-1, 0})));
  CHECK_THROWS_AS(build_bfs_structures(flat), RankDeficientError);
}

TEST_CASE("basic points match vertex enumeration on random polytopes") {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 50; ++t) {
    const Index n = 1 + t % 3;
    const ReducedProblem red = reduce(random_polytope(rng, n, 2 + t % 3, 2));
    const BfsIndexSets s = build_bfs_structures(red);
    const Vec x = oracle::random_vec(rng, 2);
    const std::vector<Vec> expected = oracle::vertices(red.a_red, -red.offset(x));
    const std::vector<Vec> got = basic_feasible_points(s, x);
    CHECK(got.size() == expected.size());
    for (const Vec& v : expected) CHECK(contains(got, v));
    const InteriorResult avg = find_interior_bfs_average(s, x);
    CHECK((avg.point - oracle::vertex_centroid(red.a_red, -red.offset(x))).norm() < 1e-9);
    CHECK(avg.margin < 0.0);
  }
}

TEST_CASE("both finders return strictly interior points") {
  std::mt19937_64 rng(67);
  for (int t = 0; t < 100; ++t) {
    const LinConProblem p = random_problem(rng, 4, 1 + t % 2, 2, 2);
    const ReducedProblem red = reduce(p);
    const BfsIndexSets s = build_bfs_structures(red);
    const Vec x = oracle::random_vec(rng, 2, -0.5, 0.5);
    const InteriorResult lp = find_interior_artificial(red, x);
    const InteriorResult bfs = find_interior_bfs_average(s, x);
    CHECK(lp.margin < -1e-9);
    CHECK(bfs.margin < -1e-10);
    CHECK((red.residual(lp.point, x).array() < 0.0).all());
    CHECK((red.residual(bfs.point, x).array() < 0.0).all());
  }
}

TEST_CASE("index sets do not depend on the input") {
  std::mt19937_64 rng(71);
  const ReducedProblem red = reduce(random_polytope(rng, 2, 3, 2));
  const BfsIndexSets s = build_bfs_structures(red);
  const BfsIndexSets again = build_bfs_structures(red);
  REQUIRE(s.bases.size() == again.bases.size());
  for (size_t i = 0; i < s.bases.size(); ++i) CHECK(s.bases[i].columns == again.bases[i].columns);
  for (int t = 0; t < 20; ++t) {
    const Vec x = oracle::random_vec(rng, 2);
    const std::vector<Vec> expected = oracle::vertices(red.a_red, -red.offset(x));
    CHECK(basic_feasible_points(s, x).size() == expected.size());
  }
}

TEST_CASE("serial and parallel enumeration agree bit for bit") {
  std::mt19937_64 rng(73);
  const ReducedProblem red = reduce(random_polytope(rng, 3, 5, 2));
  const BfsIndexSets s = build_bfs_structures(red);
  const Vec x = oracle::random_vec(rng, 2);
  const std::vector<Vec> a = basic_feasible_points(s, x, Execution::serial);
  const std::vector<Vec> b = basic_feasible_points(s, x, Execution::parallel);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  CHECK(find_interior_bfs_average(s, x, Execution::serial).point ==
        find_interior_bfs_average(s, x, Execution::parallel).point);
}
