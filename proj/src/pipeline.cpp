#include "loop_lc/pipeline.hpp"

#include <cmath>

namespace loop_lc {

Vec forward(const MlpModel& model, const Vec& x, const Vec& u_o) {
  return model.forward(concat(x, u_o));
}

PipelineOutput pipeline_forward(const MlpModel& model, const ReducedProblem& red, const Vec& x,
                                const Vec& u_o) {
  require_dims(model.input_dim() == red.n_inp() + red.n_indep(),
               "pipeline_forward: model input size must be n_inp + n_indep");
  require_dims(model.output_dim() == red.n_indep(), "pipeline_forward: model output size must be n_indep");
  PipelineOutput out;
  out.trace.poly = build_shifted(red, x, u_o);
  out.trace.v = model.forward(concat(x, u_o), out.trace.mlp);
  out.trace.u_indep = gauge_map(out.trace.poly, out.trace.v);
  out.u_full = lift_solution(red, out.trace.u_indep, x);
  return out;
}

MlpParameters pipeline_backward(const MlpModel& model, const PipelineTrace& trace,
                                const Vec& upstream_grad_u_indep) {
  require_dims(upstream_grad_u_indep.size() == trace.v.size(), "pipeline_backward: gradient has wrong size");
  const Mat jac = gauge_map_jacobian(trace.poly, trace.v);
  return model.backward(trace.mlp, jac.transpose() * upstream_grad_u_indep);
}

std::vector<Vec> batch_pipeline_forward(const MlpModel& model, const ReducedProblem& red,
                                        const std::vector<Vec>& xs, const std::vector<Vec>& u_os,
                                        Execution exec) {
  require_dims(xs.size() == u_os.size(), "batch_pipeline_forward: xs and u_os differ in length");
  const Index n = static_cast<Index>(xs.size());
  std::vector<Vec> out(xs.size());
  if (exec == Execution::parallel) {
    // Exceptions must not escape the parallel region; the first is rethrown.
    std::exception_ptr error;
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
      try {
        out[static_cast<size_t>(i)] =
            pipeline_forward(model, red, xs[static_cast<size_t>(i)], u_os[static_cast<size_t>(i)]).u_full;
      } catch (...) {
#pragma omp critical(loop_lc_batch_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (Index i = 0; i < n; ++i)
      out[static_cast<size_t>(i)] =
          pipeline_forward(model, red, xs[static_cast<size_t>(i)], u_os[static_cast<size_t>(i)]).u_full;
  }
  return out;
}

BatchGradient accumulate_batch_gradient(const MlpModel& model, const std::vector<Index>& batch,
                                        const SampleGradientFn& fn, Execution exec) {
  const Index n = static_cast<Index>(batch.size());
  std::vector<double> losses(batch.size(), 0.0);
  std::vector<MlpParameters> grads(batch.size());
  if (exec == Execution::parallel) {
    std::exception_ptr error;
#pragma omp parallel for schedule(static)
    for (Index k = 0; k < n; ++k) {
      try {
        grads[static_cast<size_t>(k)] = model.zero_like();
        losses[static_cast<size_t>(k)] = fn(batch[static_cast<size_t>(k)], model, grads[static_cast<size_t>(k)]);
      } catch (...) {
#pragma omp critical(loop_lc_grad_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (Index k = 0; k < n; ++k) {
      grads[static_cast<size_t>(k)] = model.zero_like();
      losses[static_cast<size_t>(k)] = fn(batch[static_cast<size_t>(k)], model, grads[static_cast<size_t>(k)]);
    }
  }

  BatchGradient out;
  out.grad_sum = model.zero_like();
  for (size_t k = 0; k < batch.size(); ++k) {
    out.loss_sum += losses[k];
    out.grad_sum += grads[k];
  }
  out.finite = std::isfinite(out.loss_sum) && out.grad_sum.all_finite();
  return out;
}

}  // namespace loop_lc
