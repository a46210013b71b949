#include "loop_lc/baselines.hpp"

#include "loop_lc/linalg.hpp"

namespace loop_lc {

const char* to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::penalty: return "penalty";
    case BaselineMethod::projection: return "projection";
    case BaselineMethod::dc3: return "dc3";
  }
  return "unknown";
}

BaselineMethod baseline_method_from_string(const std::string& name) {
  if (name == "penalty") return BaselineMethod::penalty;
  if (name == "projection") return BaselineMethod::projection;
  if (name == "dc3") return BaselineMethod::dc3;
  throw Error("unknown baseline method '" + name + "'");
}

void validate(const BaselineConfig& cfg) {
  if (!(cfg.penalty_coefficient > 0.0)) throw Error("penalty_coefficient must be positive");
  if (!(cfg.dc3_step_size > 0.0)) throw Error("dc3_step_size must be positive");
  if (cfg.dc3_inner_iters_train < 0 || cfg.dc3_inner_iters_test < 0)
    throw Error("dc3 inner iteration counts must be non-negative");
}

MlpModel make_baseline_model(const ReducedProblem& red, BaselineMethod method, std::uint64_t seed,
                             const std::vector<Index>& hidden) {
  std::vector<Index> dims{red.n_inp()};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(method == BaselineMethod::penalty ? red.parent->n_opt : red.n_indep());
  return MlpModel(dims, OutputActivation::identity, seed);
}

PenaltyTerm squared_violation(const LinConProblem& problem, const Vec& u, const Vec& x) {
  const Vec eq = problem.eq_residual(u, x);
  const Vec ineq = problem.ineq_residual(u, x).cwiseMax(0.0);
  PenaltyTerm out;
  out.value = eq.squaredNorm() + ineq.squaredNorm();
  out.grad = 2.0 * (problem.a_eq.transpose() * eq + problem.a_ineq.transpose() * ineq);
  return out;
}

Vec dc3_correct(const ReducedProblem& red, const Vec& x, const Vec& u0_indep, double step_size, int iterations) {
  require_dims(u0_indep.size() == red.n_indep(), "dc3_correct: u0 has wrong size");
  const Vec offset = red.offset(x);
  Vec u = u0_indep;
  for (int k = 0; k < iterations; ++k) {
    const Vec viol = (red.a_red * u + offset).cwiseMax(0.0);
    u -= step_size * (red.a_red.transpose() * viol);
  }
  return u;
}

namespace {

// Projection onto the polytope together with its Jacobian Z Z' (Z spans the
// null space of the active rows).
struct Projection {
  Vec u;
  Mat jacobian;
};

Projection project_with_jacobian(const ReducedProblem& red, const Vec& x, const Vec& y) {
  QpProblem qp;
  const Index n = y.size();
  qp.q = 2.0 * Mat::Identity(n, n);
  qp.c = -2.0 * y;
  qp.a = red.a_red;
  qp.b = -red.offset(x);
  const QpSolution sol = solve_qp(qp);
  Projection out;
  out.u = sol.u;
  IndexList binding;
  for (Index i : sol.active)
    if (sol.multipliers(i) > 1e-12) binding.push_back(i);
  if (binding.empty()) {
    out.jacobian = Mat::Identity(n, n);
  } else {
    const Mat w = select_rows(red.a_red, binding);
    out.jacobian = Mat::Identity(n, n) - w.transpose() * (w * w.transpose()).ldlt().solve(w);
  }
  return out;
}

double task_loss(const ReducedProblem& red, const TrainingSample& sample, const Vec& u, TrainingMode mode,
                 Vec& grad) {
  if (mode == TrainingMode::solver_in_loop) {
    if (!sample.u_star) throw Error("solver-in-loop training needs reference optima u*");
    const Vec diff = u - *sample.u_star;
    grad = 2.0 * diff;
    return diff.squaredNorm();
  }
  grad = red.parent->objective.gradient_u(u, sample.x);
  return red.parent->objective.value(u, sample.x);
}

}  // namespace

Vec baseline_infer(const MlpModel& model, const ReducedProblem& red, const Vec& x, const BaselineConfig& cfg) {
  const Vec y = model.forward(x);
  switch (cfg.method) {
    case BaselineMethod::penalty:
      return y;
    case BaselineMethod::projection:
      return lift_solution(red, project_onto_polytope(red, x, y), x);
    case BaselineMethod::dc3:
      return lift_solution(red, dc3_correct(red, x, y, cfg.dc3_step_size, cfg.dc3_inner_iters_test), x);
  }
  throw Error("baseline_infer: unknown method");
}

double baseline_sample_loss(const MlpModel& model, const ReducedProblem& red, const TrainingSample& sample,
                            TrainingMode mode, const BaselineConfig& cfg, MlpParameters* grad) {
  const LinConProblem& problem = *red.parent;
  MlpModel::Cache cache;
  const Vec y = model.forward(sample.x, cache);
  Vec g_out;
  double loss = 0.0;

  if (cfg.method == BaselineMethod::penalty) {
    Vec g_task;
    loss = task_loss(red, sample, y, TrainingMode::objective_only, g_task);
    const PenaltyTerm pen = squared_violation(problem, y, sample.x);
    loss += cfg.penalty_coefficient * pen.value;
    g_out = g_task + cfg.penalty_coefficient * pen.grad;
  } else if (cfg.method == BaselineMethod::projection) {
    const Projection proj = project_with_jacobian(red, sample.x, y);
    const Vec u = lift_solution(red, proj.u, sample.x);
    Vec g_full;
    loss = task_loss(red, sample, u, mode, g_full);
    g_out = proj.jacobian.transpose() * reduce_gradient(red, g_full);
  } else {
    // Forward through the correction steps, keeping each step's active rows.
    const Vec offset = red.offset(sample.x);
    std::vector<Eigen::Array<bool, Eigen::Dynamic, 1>> actives;
    Vec u = y;
    for (int k = 0; k < cfg.dc3_inner_iters_train; ++k) {
      const Vec r = red.a_red * u + offset;
      actives.push_back(r.array() > 0.0);
      u -= cfg.dc3_step_size * (red.a_red.transpose() * r.cwiseMax(0.0));
    }
    const Vec u_full = lift_solution(red, u, sample.x);
    Vec g_task;
    loss = task_loss(red, sample, u_full, TrainingMode::objective_only, g_task);
    const PenaltyTerm pen = squared_violation(problem, u_full, sample.x);
    loss += cfg.penalty_coefficient * pen.value;
    Vec g = reduce_gradient(red, g_task + cfg.penalty_coefficient * pen.grad);
    // Each step is u - eta A' D A u + const, symmetric in A' D A.
    for (size_t k = actives.size(); k-- > 0;) {
      const Vec d = actives[k].cast<double>().matrix();
      g -= cfg.dc3_step_size * (red.a_red.transpose() * d.cwiseProduct(red.a_red * g));
    }
    g_out = g;
  }
  if (grad) *grad = model.backward(cache, g_out);
  return loss;
}

TrainResult train_baseline(MlpModel model, const ReducedProblem& red, const std::vector<TrainingSample>& data,
                           const TrainConfig& train_cfg, const BaselineConfig& cfg, const ProgressFn& progress) {
  validate(cfg);
  if (data.empty()) throw Error("train_baseline: dataset is empty");
  if (cfg.method == BaselineMethod::projection && train_cfg.mode == TrainingMode::solver_in_loop)
    for (const auto& s : data)
      if (!s.u_star) throw Error("solver-in-loop training needs u* for every sample");
  if (train_cfg.fit_normalization) {
    std::vector<Vec> inputs;
    for (const auto& s : data) inputs.push_back(s.x);
    fit_input_normalization(model, inputs);
  }
  const SampleGradientFn fn = [&](Index i, const MlpModel& m, MlpParameters& g) {
    return baseline_sample_loss(m, red, data[static_cast<size_t>(i)], train_cfg.mode, cfg, &g);
  };
  TrainResult result;
  result.history = run_training(model, static_cast<Index>(data.size()), fn, train_cfg, progress);
  result.model = std::move(model);
  return result;
}

}  // namespace loop_lc
