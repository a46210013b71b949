#pragma once

#include <string>

#include "loop_lc/qp.hpp"
#include "loop_lc/train.hpp"

namespace loop_lc {

enum class BaselineMethod { penalty, projection, dc3 };

const char* to_string(BaselineMethod method);
BaselineMethod baseline_method_from_string(const std::string& name);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::penalty;
  double penalty_coefficient = 1e4;
  double dc3_step_size = 1e-4;
  int dc3_inner_iters_train = 3;
  int dc3_inner_iters_test = 3;
};

void validate(const BaselineConfig& cfg);

/// MLP on x alone with a linear head: N_opt outputs for the penalty method,
/// N_opt - N_eq for projection and DC3 (the rest comes from completion).
MlpModel make_baseline_model(const ReducedProblem& red, BaselineMethod method, std::uint64_t seed,
                             const std::vector<Index>& hidden = {16});

/// ||A_eq u + B_eq x + b_eq||^2 + ||max(A_ineq u + B_ineq x + b_ineq, 0)||^2 and its u-gradient.
struct PenaltyTerm {
  double value = 0.0;
  Vec grad;
};
PenaltyTerm squared_violation(const LinConProblem& problem, const Vec& u, const Vec& x);

/// Gradient steps on 1/2 ||max(a_red u + b_mat_red x + b_vec_red, 0)||^2 from
/// u0 (reduced coordinates). The dependent block follows by completion, so the
/// full-space violation equals the reduced one. Returns the reduced point.
Vec dc3_correct(const ReducedProblem& red, const Vec& x, const Vec& u0_indep, double step_size, int iterations);

/// Baseline inference: u_full for one x.
Vec baseline_infer(const MlpModel& model, const ReducedProblem& red, const Vec& x, const BaselineConfig& cfg);

/// Per-sample training loss. Penalty and DC3 minimise f + rho * violation^2
/// (the DC3 loss is taken after the training-time correction steps and is
/// differentiated through them). Projection uses the mode of `train_cfg`
/// (squared distance to u* or f) after the projection layer.
double baseline_sample_loss(const MlpModel& model, const ReducedProblem& red, const TrainingSample& sample,
                            TrainingMode mode, const BaselineConfig& cfg, MlpParameters* grad);

TrainResult train_baseline(MlpModel model, const ReducedProblem& red, const std::vector<TrainingSample>& data,
                           const TrainConfig& train_cfg, const BaselineConfig& cfg,
                           const ProgressFn& progress = {});

}  // namespace loop_lc
