#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "loop_lc/interior.hpp"
#include "loop_lc/pipeline.hpp"

namespace loop_lc {

enum class TrainingMode { solver_in_loop, objective_only };

/// How u_o is chosen for each training input.
enum class InteriorStrategy {
  per_sample_lp,  // artificial-LP finder per x, cached for the run
  shared_point,   // one artificial-LP point (from the first x) reused for all x
};

const char* to_string(TrainingMode mode);
TrainingMode training_mode_from_string(const std::string& name);

struct TrainConfig {
  TrainingMode mode = TrainingMode::solver_in_loop;
  int epochs = 100;
  Index batch_size = 32;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  InteriorStrategy interior = InteriorStrategy::per_sample_lp;
  double big_m = kDefaultBigM;
  /// Global-norm clip on the mean batch gradient; 0 disables.
  double grad_clip = 0.0;
  /// Fit input standardisation on the training inputs before the first epoch.
  bool fit_normalization = true;
  Execution exec = Execution::parallel;
};

struct TrainingSample {
  Vec x;
  std::optional<Vec> u_star;
};

struct TrainHistory {
  std::vector<double> epoch_loss;  // mean per-sample loss over each epoch
};

using ProgressFn = std::function<void(int epoch, double loss)>;

/// Mini-batch gradient descent with momentum over `n_samples` samples. The
/// loss of each sample and its gradient come from `fn`; batches are reshuffled
/// every epoch from cfg.seed. Throws TrainingDivergedError on a non-finite
/// loss or gradient.
TrainHistory run_training(MlpModel& model, Index n_samples, const SampleGradientFn& fn,
                          const TrainConfig& cfg, const ProgressFn& progress = {});

std::vector<Vec> find_interior_points(const ReducedProblem& red, const std::vector<TrainingSample>& data,
                                      InteriorStrategy strategy, double big_m = kDefaultBigM);

/// One hidden layer of 16 ReLU units by default, tanh output.
MlpModel make_loop_model(const ReducedProblem& red, std::uint64_t seed,
                         const std::vector<Index>& hidden = {16});

/// Loss of one sample through the full pipeline. When `grad` is non-null the
/// parameter gradient is written to it.
double loop_sample_loss(const MlpModel& model, const ReducedProblem& red, const TrainingSample& sample,
                        const Vec& u_o, TrainingMode mode, MlpParameters* grad);

struct TrainResult {
  MlpModel model;
  TrainHistory history;
  std::vector<Vec> interior_points;
};

/// Train the network through the gauge map and reconstruction. `interior`
/// may supply u_o per sample; otherwise cfg.interior decides.
TrainResult train(MlpModel model, const ReducedProblem& red, const std::vector<TrainingSample>& data,
                  const TrainConfig& cfg, std::vector<Vec> interior = {}, const ProgressFn& progress = {});

}  // namespace loop_lc
