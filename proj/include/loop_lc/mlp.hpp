#pragma once

#include <cstdint>
#include <vector>

#include "loop_lc/common.hpp"

namespace loop_lc {

enum class OutputActivation { tanh, identity };

const char* to_string(OutputActivation act);
OutputActivation output_activation_from_string(const std::string& name);

/// Parameter-shaped container used for gradients and optimizer state.
struct MlpParameters {
  std::vector<Mat> weights;
  std::vector<Vec> biases;

  void set_zero();
  MlpParameters& operator+=(const MlpParameters& other);
  MlpParameters& operator*=(double s);
  double squared_norm() const;
  bool all_finite() const;
};

/// Fully connected network, ReLU hidden layers, tanh (or identity) output.
/// Inputs are standardised with a stored affine map before the first layer.
class MlpModel {
 public:
  struct Cache {
    std::vector<Vec> activations;  // activations[0] is the standardised input
    std::vector<Vec> pre;          // pre-activation of each layer
  };

  MlpModel() = default;
  /// He-initialised weights, zero biases, deterministic per seed.
  MlpModel(std::vector<Index> layer_dims, OutputActivation output, std::uint64_t seed);

  static MlpModel zeros(std::vector<Index> layer_dims, OutputActivation output);

  const std::vector<Index>& layer_dims() const { return dims_; }
  Index input_dim() const { return dims_.front(); }
  Index output_dim() const { return dims_.back(); }
  Index num_layers() const { return static_cast<Index>(params_.weights.size()); }
  OutputActivation output_activation() const { return output_; }

  Vec forward(const Vec& input) const;
  Vec forward(const Vec& input, Cache& cache) const;

  /// Gradient of <grad_output, forward(input)> with respect to the parameters.
  MlpParameters backward(const Cache& cache, const Vec& grad_output) const;
  /// Gradient of <grad_output, forward(input)> with respect to the raw input.
  Vec input_gradient(const Cache& cache, const Vec& grad_output) const;

  MlpParameters& parameters() { return params_; }
  const MlpParameters& parameters() const { return params_; }
  MlpParameters zero_like() const;

  void set_input_normalization(Vec shift, Vec scale);
  const Vec& input_shift() const { return shift_; }
  const Vec& input_scale() const { return scale_; }

  Index parameter_count() const;
  Vec flat_parameters() const;
  void set_flat_parameters(const Vec& flat);

 private:
  std::vector<Index> dims_;
  OutputActivation output_ = OutputActivation::tanh;
  MlpParameters params_;
  Vec shift_;
  Vec scale_;
};

/// Flatten a parameter-shaped container in the same order as flat_parameters().
Vec flatten(const MlpParameters& p);

/// Standardisation fitted on a set of raw inputs (std floored at 1e-8 -> 1).
void fit_input_normalization(MlpModel& model, const std::vector<Vec>& inputs);

}  // namespace loop_lc
