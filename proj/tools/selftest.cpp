#include "selftest.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "loop_lc/dcopf.hpp"
#include "loop_lc/gauge.hpp"
#include "loop_lc/interior.hpp"
#include "loop_lc/pipeline.hpp"
#include "loop_lc/qp.hpp"

namespace loop_lc_tools {

using namespace loop_lc;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// {u1, u2 >= 0, u1 + u2 <= 1}, no input.
LinConProblem triangle() {
  Mat a(3, 2);
  a << -1, 0, 0, -1, 1, 1;
  return make_problem(Mat::Zero(0, 2), Mat::Zero(0, 0), Vec::Zero(0), a, Mat::Zero(3, 0), vec({0, 0, -1}),
                      Objective::builtin("sum_squares"));
}

struct Check {
  std::string name;
  std::function<std::string()> body;  // returns detail, throws on failure
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

}  // namespace

nlohmann::json run_selftest(std::uint64_t seed) {
  std::vector<Check> checks;

  checks.push_back({"equality_completion", [] {
    Mat a_eq(1, 2);
    a_eq << 1, 1;
    const LinConProblem p = make_problem(a_eq, Mat::Zero(1, 0), vec({-1}), Mat::Zero(0, 2), Mat::Zero(0, 0),
                                         Vec::Zero(0), Objective::builtin("sum_squares"));
    const ReducedProblem red = reduce(p);
    const Vec u = lift_solution(red, vec({0.25}), Vec::Zero(0));
    expect(std::abs(u(0) - 0.75) < 1e-12 && std::abs(u(1) - 0.25) < 1e-12, "lift of 0.25 is not [0.75, 0.25]");
    return std::string("lift(0.25) = [0.75, 0.25]");
  }});

  checks.push_back({"interior_finders_triangle", [] {
    const ReducedProblem red = reduce(triangle());
    const InteriorResult lp = find_interior_artificial(red, Vec::Zero(0));
    expect(std::abs(lp.margin + 1.0 / 3.0) < 1e-9, "LP margin is not -1/3");
    const InteriorResult bfs = find_interior_bfs_average(build_bfs_structures(red), Vec::Zero(0));
    expect((bfs.point - Vec::Constant(2, 1.0 / 3.0)).norm() < 1e-9, "BFS average is not (1/3, 1/3)");
    return std::string("LP margin -1/3, BFS average (1/3, 1/3)");
  }});

  checks.push_back({"gauge_round_trip", [seed] {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const ReducedProblem red = reduce(triangle());
    const Vec u_o = Vec::Constant(2, 0.25);
    const ShiftedPolytope poly = build_shifted(red, Vec::Zero(0), u_o);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      Vec v(2);
      v << unif(rng), unif(rng);
      if (v.lpNorm<Eigen::Infinity>() < 1e-6) continue;
      worst = std::max(worst, (gauge_map_inverse(poly, gauge_map(poly, v)) - v).lpNorm<Eigen::Infinity>());
    }
    expect(worst <= 1e-9, "round-trip deviation above 1e-9");
    std::ostringstream os;
    os << "max deviation " << worst;
    return os.str();
  }});

  checks.push_back({"qp_clipped_optimum", [] {
    QpProblem qp;
    qp.q = Mat::Constant(1, 1, 2.0);
    qp.c = vec({-4});
    qp.a = Mat(2, 1);
    qp.a << 1, -1;
    qp.b = vec({1, 1});
    const QpSolution s = solve_qp(qp);
    expect(std::abs(s.u(0) - 1.0) < 1e-9, "min (u-2)^2 on [-1,1] is not 1");
    return std::string("argmin = 1");
  }});

  checks.push_back({"hard_feasibility_dcopf", [seed] {
    const DcopfSystem sys = generate_system(3, 3, 3, seed);
    auto problem = std::make_shared<const LinConProblem>(to_lincon(sys));
    const ReducedProblem red = reduce(problem);
    const DcopfDataset ds = sample_dataset(sys, red, 10, 0.1, seed);
    std::vector<Vec> u_os;
    for (const Vec& x : ds.samples) u_os.push_back(find_interior_artificial(red, x).point);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      MlpModel model = make_loop_model(red, seed + static_cast<std::uint64_t>(k));
      model.parameters() *= 1.0 + 10.0 * k;  // include saturated outputs
      const auto outs = batch_pipeline_forward(model, red, ds.samples, u_os);
      for (size_t i = 0; i < outs.size(); ++i)
        worst = std::max(worst, feasibility_violation(*problem, outs[i], ds.samples[i]));
    }
    expect(worst <= 1e-9, "pipeline output violates constraints");
    std::ostringstream os;
    os << "max violation " << worst << " over 1000 outputs";
    return os.str();
  }});

  nlohmann::json report;
  report["checks"] = nlohmann::json::array();
  bool all = true;
  for (const auto& c : checks) {
    nlohmann::json entry{{"name", c.name}};
    try {
      entry["detail"] = c.body();
      entry["passed"] = true;
    } catch (const std::exception& e) {
      entry["detail"] = e.what();
      entry["passed"] = false;
      all = false;
    }
    report["checks"].push_back(entry);
  }
  report["passed"] = all;
  return report;
}

}  // namespace loop_lc_tools
