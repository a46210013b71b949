#pragma once

#include <functional>
#include <memory>

#include "loop_lc/train.hpp"

namespace loop_lc {

/// The artificial problem posed as a LOOP-LC instance over w = [u; u_a]:
///   a_red u - u_a + b_mat_red x + b_vec_red <= 0,   u_a <= cap,
/// minimise u_a. The cap keeps the set bounded; it travels as an extra input
/// so the Phase-I input is x1 = [x; cap(x)] with cap(x) = 2 (||b_mat_red x + b_vec_red||_2 + 1).
struct Phase1Problem {
  std::shared_ptr<const LinConProblem> problem;
  ReducedProblem reduced;  // Phase-I rows over w
  ReducedProblem base;     // the problem whose interior is sought
  Index n_indep() const { return base.n_indep(); }
};

Phase1Problem make_phase1_problem(const ReducedProblem& red);

/// x1 = [x; 2 (||offset(x)||_2 + 1)].
Vec phase1_input(const ReducedProblem& red, const Vec& x);

/// [0; ||b_mat_red x + b_vec_red||_2 + 1]: every Phase-I row has slack at least 1.
Vec phase1_anchor(const ReducedProblem& red, const Vec& x);

/// Returns v in the l-infinity ball for (x1, anchor).
using Phase1Predictor = std::function<Vec(const Vec& x1, const Vec& anchor)>;

/// Runs the Phase-I pipeline and returns u if the predicted u_a is negative.
/// Throws PredictionMissError otherwise; callers fall back to the LP finder.
InteriorResult find_interior_two_phase(const Phase1Problem& phase1, const Vec& x,
                                       const Phase1Predictor& predictor);
InteriorResult find_interior_two_phase(const Phase1Problem& phase1, const Vec& x, const MlpModel& model);

struct Phase1Training {
  MlpModel model;
  TrainHistory history;
};

/// Objective-only training of the Phase-I network on inputs xs.
Phase1Training train_phase1(const Phase1Problem& phase1, const std::vector<Vec>& xs, TrainConfig cfg,
                            const std::vector<Index>& hidden = {16});

}  // namespace loop_lc
