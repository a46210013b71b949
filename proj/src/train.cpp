#include "loop_lc/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace loop_lc {

const char* to_string(TrainingMode mode) {
  return mode == TrainingMode::solver_in_loop ? "solver" : "objective";
}

TrainingMode training_mode_from_string(const std::string& name) {
  if (name == "solver" || name == "solver_in_loop") return TrainingMode::solver_in_loop;
  if (name == "objective" || name == "objective_only") return TrainingMode::objective_only;
  throw Error("unknown training mode '" + name + "'");
}

TrainHistory run_training(MlpModel& model, Index n_samples, const SampleGradientFn& fn,
                          const TrainConfig& cfg, const ProgressFn& progress) {
  if (!(cfg.learning_rate >= 0.0)) throw Error("learning_rate must be non-negative");
  if (cfg.batch_size <= 0) throw Error("batch_size must be positive");
  if (n_samples <= 0) throw Error("training set is empty");

  TrainHistory history;
  std::mt19937_64 rng(cfg.seed);
  std::vector<Index> order(static_cast<size_t>(n_samples));
  std::iota(order.begin(), order.end(), Index{0});
  MlpParameters velocity = model.zero_like();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (Index start = 0; start < n_samples; start += cfg.batch_size) {
      const Index stop = std::min(n_samples, start + cfg.batch_size);
      const std::vector<Index> batch(order.begin() + start, order.begin() + stop);
      BatchGradient bg = accumulate_batch_gradient(model, batch, fn, cfg.exec);
      if (!bg.finite) {
        std::ostringstream os;
        os << "training diverged at epoch " << epoch << ", batch starting at " << start
           << ": batch loss " << bg.loss_sum << ", last epoch loss "
           << (history.epoch_loss.empty() ? std::nan("") : history.epoch_loss.back());
        throw TrainingDivergedError(os.str());
      }
      epoch_loss += bg.loss_sum;
      MlpParameters& grad = bg.grad_sum;
      grad *= 1.0 / static_cast<double>(batch.size());
      if (cfg.grad_clip > 0.0) {
        const double norm = std::sqrt(grad.squared_norm());
        if (norm > cfg.grad_clip) grad *= cfg.grad_clip / norm;
      }
      velocity *= cfg.momentum;
      grad *= -cfg.learning_rate;
      velocity += grad;
      model.parameters() += velocity;
    }
    epoch_loss /= static_cast<double>(n_samples);
    if (!std::isfinite(epoch_loss)) {
      std::ostringstream os;
      os << "training diverged: non-finite loss at epoch " << epoch;
      throw TrainingDivergedError(os.str());
    }
    history.epoch_loss.push_back(epoch_loss);
    if (progress) progress(epoch, epoch_loss);
  }
  return history;
}

std::vector<Vec> find_interior_points(const ReducedProblem& red, const std::vector<TrainingSample>& data,
                                      InteriorStrategy strategy, double big_m) {
  std::vector<Vec> points;
  points.reserve(data.size());
  if (data.empty()) return points;
  if (strategy == InteriorStrategy::per_sample_lp) {
    for (const auto& s : data) points.push_back(find_interior_artificial(red, s.x, big_m).point);
    return points;
  }
  const Vec shared = find_interior_artificial(red, data.front().x, big_m).point;
  for (size_t i = 0; i < data.size(); ++i) {
    const double margin = verify_interior(red, data[i].x, shared);
    if (!(margin < 0.0)) {
      std::ostringstream os;
      os << "shared interior point is not interior for sample " << i << " (margin " << margin << ")";
      throw EmptyInteriorError(os.str());
    }
    points.push_back(shared);
  }
  return points;
}

MlpModel make_loop_model(const ReducedProblem& red, std::uint64_t seed, const std::vector<Index>& hidden) {
  std::vector<Index> dims;
  dims.push_back(red.n_inp() + red.n_indep());
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(red.n_indep());
  return MlpModel(dims, OutputActivation::tanh, seed);
}

double loop_sample_loss(const MlpModel& model, const ReducedProblem& red, const TrainingSample& sample,
                        const Vec& u_o, TrainingMode mode, MlpParameters* grad) {
  const PipelineOutput out = pipeline_forward(model, red, sample.x, u_o);
  double loss = 0.0;
  Vec grad_full;
  if (mode == TrainingMode::solver_in_loop) {
    if (!sample.u_star) throw Error("solver-in-loop training needs reference optima u*");
    const Vec diff = out.u_full - *sample.u_star;
    loss = diff.squaredNorm();
    grad_full = 2.0 * diff;
  } else {
    const Objective& f = red.parent->objective;
    loss = f.value(out.u_full, sample.x);
    grad_full = f.gradient_u(out.u_full, sample.x);
  }
  if (grad) *grad = pipeline_backward(model, out.trace, reduce_gradient(red, grad_full));
  return loss;
}

TrainResult train(MlpModel model, const ReducedProblem& red, const std::vector<TrainingSample>& data,
                  const TrainConfig& cfg, std::vector<Vec> interior, const ProgressFn& progress) {
  if (data.empty()) throw Error("train: dataset is empty");
  if (cfg.mode == TrainingMode::solver_in_loop) {
    for (size_t i = 0; i < data.size(); ++i)
      if (!data[i].u_star)
        throw Error("solver-in-loop training needs u* for every sample (missing at " + std::to_string(i) + ")");
  }
  if (interior.empty()) interior = find_interior_points(red, data, cfg.interior, cfg.big_m);
  require_dims(interior.size() == data.size(), "train: one interior point per sample is required");

  if (cfg.fit_normalization) {
    std::vector<Vec> inputs;
    inputs.reserve(data.size());
    for (size_t i = 0; i < data.size(); ++i) inputs.push_back(concat(data[i].x, interior[i]));
    fit_input_normalization(model, inputs);
  }

  const SampleGradientFn fn = [&](Index i, const MlpModel& m, MlpParameters& g) {
    return loop_sample_loss(m, red, data[static_cast<size_t>(i)], interior[static_cast<size_t>(i)], cfg.mode, &g);
  };
  TrainResult result;
  result.history = run_training(model, static_cast<Index>(data.size()), fn, cfg, progress);
  result.model = std::move(model);
  result.interior_points = std::move(interior);
  return result;
}

}  // namespace loop_lc
