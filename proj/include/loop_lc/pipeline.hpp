#pragma once

#include <vector>

#include "loop_lc/gauge.hpp"
#include "loop_lc/mlp.hpp"
#include "loop_lc/parallel.hpp"

namespace loop_lc {

/// v = xi(x, u_o), the network output in the l-infinity ball.
Vec forward(const MlpModel& model, const Vec& x, const Vec& u_o);

struct PipelineTrace {
  MlpModel::Cache mlp;
  Vec v;
  ShiftedPolytope poly;
  Vec u_indep;
};

struct PipelineOutput {
  Vec u_full;
  PipelineTrace trace;
};

/// network -> gauge map -> dependent-variable reconstruction. The output
/// satisfies every constraint of the full problem for any weights.
PipelineOutput pipeline_forward(const MlpModel& model, const ReducedProblem& red, const Vec& x,
                                const Vec& u_o);

/// Parameter gradient of <upstream, u_indep> at the traced point.
MlpParameters pipeline_backward(const MlpModel& model, const PipelineTrace& trace,
                                const Vec& upstream_grad_u_indep);

/// Batched inference kernel. xs[i] is paired with u_os[i].
std::vector<Vec> batch_pipeline_forward(const MlpModel& model, const ReducedProblem& red,
                                        const std::vector<Vec>& xs, const std::vector<Vec>& u_os,
                                        Execution exec = Execution::parallel);

/// Per-sample gradient function: returns the loss and writes the gradient.
/// Must only read the model.
using SampleGradientFn = std::function<double(Index sample, const MlpModel& model, MlpParameters& grad)>;

struct BatchGradient {
  double loss_sum = 0.0;
  MlpParameters grad_sum;
  bool finite = true;
};

/// Sum of per-sample losses and gradients over `batch`, accumulated in batch
/// order regardless of the execution policy.
BatchGradient accumulate_batch_gradient(const MlpModel& model, const std::vector<Index>& batch,
                                        const SampleGradientFn& fn,
                                        Execution exec = Execution::parallel);

}  // namespace loop_lc
