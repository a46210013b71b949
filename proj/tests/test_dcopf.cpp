#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "loop_lc/dcopf.hpp"

using namespace loop_lc;
using namespace test_support;

namespace {

// Line flows for bus injections p (sum zero) by solving the reduced B theta = p
// with theta_0 = 0.
Vec dc_flows(const DcopfSystem& s, const Vec& injections) {
  Mat lap = Mat::Zero(s.n_bus, s.n_bus);
  for (Index l = 0; l < s.n_line; ++l) {
    const auto [i, j] = s.lines[static_cast<size_t>(l)];
    const double b = s.susceptance(l);
    lap(i, i) += b;
    lap(j, j) += b;
    lap(i, j) -= b;
    lap(j, i) -= b;
  }
  const Index k = s.n_bus - 1;
  Vec theta = Vec::Zero(s.n_bus);
  theta.tail(k) = lap.bottomRightCorner(k, k).fullPivLu().solve(injections.tail(k));
  Vec flows(s.n_line);
  for (Index l = 0; l < s.n_line; ++l) {
    const auto [i, j] = s.lines[static_cast<size_t>(l)];
    flows(l) = s.susceptance(l) * (theta(i) - theta(j));
  }
  return flows;
}

Vec bus_injections(const DcopfSystem& s, const Vec& p_gen, const Vec& p_load) {
  Vec inj = Vec::Zero(s.n_bus);
  for (Index g = 0; g < s.n_gen; ++g) inj(s.gen_bus[static_cast<size_t>(g)]) += p_gen(g);
  for (Index d = 0; d < s.n_load; ++d) inj(s.load_bus[static_cast<size_t>(d)]) -= p_load(d);
  return inj;
}

}  // namespace

TEST_CASE("golden system for two generators, two loads, one line") {
  std::ifstream f(std::string(LOOP_LC_FIXTURE_DIR) + "/dcopf_g2_l2_line1_seed7.json");
  REQUIRE(f.good());
  const LinConProblem golden = problem_from_json(json::parse(f));
  const LinConProblem p = to_lincon(generate_system(2, 2, 1, 7));
  CHECK((p.a_eq - golden.a_eq).norm() == 0.0);
  CHECK((p.a_ineq - golden.a_ineq).norm() == 0.0);
  CHECK((p.b_mat_ineq - golden.b_mat_ineq).norm() <= 1e-15);
  CHECK((p.b_vec_ineq - golden.b_vec_ineq).norm() <= 1e-15);
  CHECK((p.objective.quadratic_form()->q - golden.objective.quadratic_form()->q).norm() <= 1e-15);
  CHECK((p.objective.quadratic_form()->c - golden.objective.quadratic_form()->c).norm() <= 1e-15);
}

TEST_CASE("system generation is deterministic per seed") {
  CHECK(system_to_json(generate_system(3, 4, 3, 11)) == system_to_json(generate_system(3, 4, 3, 11)));
  CHECK(system_to_json(generate_system(3, 4, 3, 11)) != system_to_json(generate_system(3, 4, 3, 12)));
  const DcopfSystem s = generate_system(3, 4, 3, 11);
  const DcopfSystem back = system_from_json(system_to_json(s));
  CHECK(back.ptdf_gen == s.ptdf_gen);
  CHECK(back.lines == s.lines);
  CHECK(back.gen_bus == s.gen_bus);
  CHECK_THROWS_AS(generate_system(1, 2, 1, 0), Error);
  CHECK_THROWS_AS(generate_system(2, 0, 1, 0), Error);
}

TEST_CASE("PTDF columns match a direct power-flow solve") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DcopfSystem s = generate_system(3, 3, 4, seed);
    CHECK((s.n_bus == 4 || s.n_bus == 5));
    for (Index g = 0; g < s.n_gen; ++g) {
      Vec p = Vec::Zero(s.n_gen);
      p(g) = 1.0;
      Vec inj = bus_injections(s, p, Vec::Zero(s.n_load));
      inj(0) -= 1.0;  // withdrawn at the slack bus
      CHECK((s.ptdf_gen.col(g) - dc_flows(s, inj)).norm() <= 1e-12);
    }
    // a balanced dispatch: PTDF flows equal the direct solve
    const Vec p_gen = s.p_max * (s.base_load.sum() / s.p_max.sum());
    const Vec flows = s.ptdf_gen * p_gen - s.ptdf_load * s.base_load;
    CHECK((flows - dc_flows(s, bus_injections(s, p_gen, s.base_load))).norm() <= 1e-12);
  }
}

TEST_CASE("both topologies occur") {
  std::set<bool> seen;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DcopfSystem s = generate_system(2, 2, 4, seed);
    seen.insert(s.n_bus == s.n_line);
  }
  CHECK(seen.size() == 2);
  CHECK(generate_system(2, 2, 2, 3).n_bus == 3);
}

TEST_CASE("generated systems have headroom across seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const DcopfSystem s = generate_system(2 + static_cast<Index>(seed % 3), 3, 1 + static_cast<Index>(seed % 4), seed);
    const double demand = s.base_load.sum();
    CHECK(s.p_max.sum() == doctest::Approx(1.8 * demand));
    CHECK((s.p_min.array() == 0.0).all());
    CHECK((s.line_limits.array() > 0.0).all());
    CHECK((s.cost_a.array() >= 0.5).all());
    CHECK((s.cost_b.array() <= 5.0).all());
    const ReducedProblem red = reduce(to_lincon(s));
    // interior at 1.1x base load in every direction of the sampling box
    CHECK(find_interior_artificial(red, s.base_load).margin < 0.0);
    CHECK(find_interior_artificial(red, 1.1 * s.base_load).margin < 0.0);
  }
}

TEST_CASE("to_lincon on a hand-built system") {
  DcopfSystem s;
  s.n_gen = 2;
  s.n_load = 1;
  s.n_line = 1;
  s.n_bus = 2;
  s.cost_a = vec({1, 2});
  s.cost_b = vec({3, 4});
  s.p_min = vec({0.1, 0.2});
  s.p_max = vec({1, 2});
  s.ptdf_gen = rows(1, 2, {0, -1});
  s.ptdf_load = rows(1, 1, {-1});
  s.line_limits = vec({0.5});
  const LinConProblem p = to_lincon(s);
  CHECK(p.a_eq == rows(1, 2, {1, 1}));
  CHECK(p.b_mat_eq == rows(1, 1, {-1}));
  CHECK(p.a_ineq == rows(6, 2, {1, 0, 0, 1, -1, 0, 0, -1, 0, -1, 0, 1}));
  CHECK(p.b_mat_ineq == rows(6, 1, {0, 0, 0, 0, 1, -1}));
  CHECK(p.b_vec_ineq == vec({-1, -2, 0.1, 0.2, -0.5, -0.5}));
  // cost a P^2 + b P
  CHECK(p.objective.value(vec({1, 1}), vec({2})) == doctest::Approx(1 + 3 + 2 + 4));
}

TEST_CASE("uncongested dispatch equalises marginal cost") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    DcopfSystem s = generate_system(3, 2, 2, seed);
    s.line_limits.setConstant(1e3);
    s.p_max.setConstant(1e3);
    const ReducedProblem red = reduce(to_lincon(s));
    const Vec x = 10.0 * s.base_load;
    const Vec p = solve_reference(red, x);
    const Vec marginal = 2.0 * s.cost_a.cwiseProduct(p) + s.cost_b;
    // every generator that runs is at the common marginal cost; idle ones are dearer
    double lambda = -1.0;
    for (Index g = 0; g < 3; ++g)
      if (p(g) > 1e-9) lambda = marginal(g);
    for (Index g = 0; g < 3; ++g) {
      if (p(g) > 1e-9) CHECK(marginal(g) == doctest::Approx(lambda).epsilon(1e-9));
      else CHECK(marginal(g) >= lambda - 1e-9);
    }
    CHECK(p.sum() == doctest::Approx(x.sum()));
  }
}

TEST_CASE("dataset sampling") {
  const DcopfSystem s = generate_system(3, 4, 3, 2);
  const ReducedProblem red = reduce(to_lincon(s));
  const DcopfDataset a = sample_dataset(s, red, 41, 0.1, 5);
  const DcopfDataset b = sample_dataset(s, red, 41, 0.1, 5);
  CHECK(a.samples.size() == 41);
  CHECK(a.train_idx.size() == 20);
  CHECK(a.test_idx.size() == 21);
  CHECK(a.train_idx == b.train_idx);
  for (size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);
  std::set<Index> all(a.train_idx.begin(), a.train_idx.end());
  all.insert(a.test_idx.begin(), a.test_idx.end());
  CHECK(all.size() == 41);
  CHECK(std::is_sorted(a.train_idx.begin(), a.train_idx.end()));
  for (const Vec& x : a.samples) {
    const Vec ratio = x.cwiseQuotient(s.base_load);
    CHECK(ratio.minCoeff() >= 0.9);
    CHECK(ratio.maxCoeff() <= 1.1);
    CHECK(find_interior_artificial(red, x).margin < 0.0);
  }
  CHECK_THROWS_AS(sample_dataset(s, red, 1, 0.1, 5), Error);
  CHECK_THROWS_AS(sample_dataset(s, red, 10, 1.5, 5), Error);
}

TEST_CASE("benchmark CSV is reproducible in deterministic mode") {
  const DcopfSystem s = generate_system(2, 3, 2, 4);
  const ReducedProblem red = reduce(to_lincon(s));
  const DcopfDataset ds = sample_dataset(s, red, 20, 0.1, 6);
  BenchmarkConfig cfg;
  cfg.deterministic = true;
  cfg.loop_train.epochs = 5;
  cfg.loop_train.batch_size = 5;
  cfg.baseline_train.epochs = 5;
  cfg.baseline_train.mode = TrainingMode::objective_only;
  cfg.baseline_train.learning_rate = 1e-4;
  auto csv = [&] {
    std::ostringstream out;
    write_csv(out, run_benchmark(s, ds, cfg), true);
    return out.str();
  };
  const std::string first = csv();
  CHECK(first == csv());
  CHECK(std::count(first.begin(), first.end(), '\n') == 5);
  CHECK(first.rfind("method,optimality_gap,feasibility_gap,mean_inference_ms,train_seconds,status", 0) == 0);

  const BenchmarkResult r = run_benchmark(s, ds, cfg);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows[0].method == "loop");
  CHECK(r.rows[0].status == "ok");
  CHECK(r.rows[0].metrics.feasibility_gap <= 1e-9);
  CHECK(r.rows[2].metrics.feasibility_gap <= 1e-9);  // projection
  CHECK(r.rows[0].instance_optimality_gap.size() == ds.test_idx.size());

  std::ostringstream plot;
  write_plot_data(plot, r);
  const std::string text = plot.str();
  CHECK(static_cast<size_t>(std::count(text.begin(), text.end(), '\n')) == 1 + 4 * ds.test_idx.size());

  cfg.methods = {"loop", "nonsense"};
  const BenchmarkResult bad = run_benchmark(s, ds, cfg);
  REQUIRE(bad.rows.size() == 2);
  CHECK(bad.rows[1].status != "ok");
}

TEST_CASE("zero fluctuation reproduces the base load") {
  const DcopfSystem s = generate_system(2, 3, 2, 8);
  const DcopfDataset ds = sample_dataset(s, reduce(to_lincon(s)), 6, 0.0, 1);
  for (const Vec& x : ds.samples) CHECK(x == s.base_load);
}

TEST_CASE("pipeline output stays feasible before, during and after training") {
  const DcopfSystem s = generate_system(3, 4, 3, 1);
  const LinConProblem p = to_lincon(s);
  const ReducedProblem red = reduce(p);
  const DcopfDataset ds = sample_dataset(s, red, 40, 0.1, 2);
  std::vector<TrainingSample> data;
  for (Index i : ds.train_idx) {
    const Vec& x = ds.samples[static_cast<size_t>(i)];
    data.push_back({x, solve_reference(red, x)});
  }
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.batch_size = 8;
  cfg.learning_rate = 1e-2;
  MlpModel model = make_loop_model(red, 5);
  double worst = -1.0;
  for (int stage = 0; stage < 4; ++stage) {
    for (Index i : ds.test_idx) {
      const Vec& x = ds.samples[static_cast<size_t>(i)];
      const Vec u = pipeline_forward(model, red, x, find_interior_artificial(red, x).point).u_full;
      worst = std::max(worst, feasibility_violation(p, u, x));
    }
    cfg.fit_normalization = stage == 0;
    model = train(model, red, data, cfg).model;
  }
  CHECK(worst <= 1e-9);
}
