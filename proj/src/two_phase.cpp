#include "loop_lc/two_phase.hpp"

#include <sstream>

namespace loop_lc {

Phase1Problem make_phase1_problem(const ReducedProblem& red) {
  const Index n = red.n_indep();
  const Index m = red.n_ineq();
  const Index p = red.n_inp();

  Mat a_ineq = Mat::Zero(m + 1, n + 1);
  a_ineq.topLeftCorner(m, n) = red.a_red;
  a_ineq.topRightCorner(m, 1).setConstant(-1.0);
  a_ineq(m, n) = 1.0;

  Mat b_mat = Mat::Zero(m + 1, p + 1);
  b_mat.topLeftCorner(m, p) = red.b_mat_red;
  b_mat(m, p) = -1.0;  // u_a - cap <= 0

  Vec b_vec = Vec::Zero(m + 1);
  b_vec.head(m) = red.b_vec_red;

  auto problem = std::make_shared<LinConProblem>(make_problem(Mat::Zero(0, n + 1), Mat::Zero(0, p + 1), Vec::Zero(0),
                                                              a_ineq, b_mat, b_vec, Objective::builtin("linear_last")));
  Phase1Problem out;
  out.reduced = reduce(std::shared_ptr<const LinConProblem>(problem));
  out.problem = problem;
  out.base = red;
  return out;
}

Vec phase1_input(const ReducedProblem& red, const Vec& x) {
  Vec x1(x.size() + 1);
  x1 << x, 2.0 * (red.offset(x).norm() + 1.0);
  return x1;
}

Vec phase1_anchor(const ReducedProblem& red, const Vec& x) {
  Vec w = Vec::Zero(red.n_indep() + 1);
  w(red.n_indep()) = red.offset(x).norm() + 1.0;
  return w;
}

InteriorResult find_interior_two_phase(const Phase1Problem& phase1, const Vec& x,
                                       const Phase1Predictor& predictor) {
  const Index n = phase1.n_indep();
  require_dims(x.size() == phase1.base.n_inp(), "find_interior_two_phase: x has wrong size");
  const Vec x1 = phase1_input(phase1.base, x);
  const Vec anchor = phase1_anchor(phase1.base, x);

  const ShiftedPolytope poly = build_shifted(phase1.reduced, x1, anchor);
  const Vec w = gauge_map(poly, predictor(x1, anchor));
  const double u_a = w(n);

  InteriorResult out;
  out.point = w.head(n);
  out.margin = verify_interior(phase1.base, x, out.point);
  out.method = InteriorMethod::two_phase;
  if (!(u_a < 0.0) || !(out.margin < 0.0)) {
    std::ostringstream os;
    os << "two-phase finder: predicted slack u_a = " << u_a << " is not negative (margin " << out.margin
       << "); fall back to the artificial LP";
    throw PredictionMissError(os.str(), u_a);
  }
  return out;
}

InteriorResult find_interior_two_phase(const Phase1Problem& phase1, const Vec& x, const MlpModel& model) {
  return find_interior_two_phase(phase1, x, [&](const Vec& x1, const Vec& anchor) {
    return forward(model, x1, anchor);
  });
}

Phase1Training train_phase1(const Phase1Problem& phase1, const std::vector<Vec>& xs, TrainConfig cfg,
                            const std::vector<Index>& hidden) {
  if (xs.empty()) throw Error("train_phase1: no inputs");
  std::vector<TrainingSample> data;
  std::vector<Vec> anchors;
  for (const Vec& x : xs) {
    require_dims(x.size() == phase1.base.n_inp(), "train_phase1: x has wrong size");
    data.push_back({phase1_input(phase1.base, x), std::nullopt});
    anchors.push_back(phase1_anchor(phase1.base, x));
  }
  cfg.mode = TrainingMode::objective_only;
  TrainResult r = train(make_loop_model(phase1.reduced, cfg.seed, hidden), phase1.reduced, data, cfg, anchors);
  return {std::move(r.model), std::move(r.history)};
}

}  // namespace loop_lc
