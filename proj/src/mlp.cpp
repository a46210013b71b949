#include "loop_lc/mlp.hpp"

#include <cmath>
#include <random>

namespace loop_lc {

const char* to_string(OutputActivation act) {
  return act == OutputActivation::tanh ? "tanh" : "identity";
}

OutputActivation output_activation_from_string(const std::string& name) {
  if (name == "tanh") return OutputActivation::tanh;
  if (name == "identity") return OutputActivation::identity;
  throw Error("unknown output activation '" + name + "'");
}

void MlpParameters::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

MlpParameters& MlpParameters::operator+=(const MlpParameters& other) {
  for (size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    biases[l] += other.biases[l];
  }
  return *this;
}

MlpParameters& MlpParameters::operator*=(double s) {
  for (size_t l = 0; l < weights.size(); ++l) {
    weights[l] *= s;
    biases[l] *= s;
  }
  return *this;
}

double MlpParameters::squared_norm() const {
  double acc = 0.0;
  for (size_t l = 0; l < weights.size(); ++l) acc += weights[l].squaredNorm() + biases[l].squaredNorm();
  return acc;
}

bool MlpParameters::all_finite() const {
  for (size_t l = 0; l < weights.size(); ++l)
    if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
  return true;
}

MlpModel::MlpModel(std::vector<Index> layer_dims, OutputActivation output, std::uint64_t seed)
    : MlpModel(zeros(std::move(layer_dims), output)) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& w : params_.weights) {
    const double stddev = std::sqrt(2.0 / static_cast<double>(w.cols()));
    for (Index c = 0; c < w.cols(); ++c)
      for (Index r = 0; r < w.rows(); ++r) w(r, c) = stddev * normal(rng);
  }
}

MlpModel MlpModel::zeros(std::vector<Index> layer_dims, OutputActivation output) {
  if (layer_dims.size() < 2) throw Error("MlpModel needs at least input and output dimensions");
  for (Index d : layer_dims)
    if (d <= 0) throw Error("MlpModel layer dimensions must be positive");
  MlpModel m;
  m.dims_ = std::move(layer_dims);
  m.output_ = output;
  for (size_t l = 0; l + 1 < m.dims_.size(); ++l) {
    m.params_.weights.push_back(Mat::Zero(m.dims_[l + 1], m.dims_[l]));
    m.params_.biases.push_back(Vec::Zero(m.dims_[l + 1]));
  }
  m.shift_ = Vec::Zero(m.dims_.front());
  m.scale_ = Vec::Ones(m.dims_.front());
  return m;
}

Vec MlpModel::forward(const Vec& input) const {
  Cache cache;
  return forward(input, cache);
}

Vec MlpModel::forward(const Vec& input, Cache& cache) const {
  require_dims(input.size() == input_dim(), "MlpModel::forward: input has wrong size");
  const size_t layers = params_.weights.size();
  cache.activations.resize(layers + 1);
  cache.pre.resize(layers);
  cache.activations[0] = (input - shift_).cwiseQuotient(scale_);
  for (size_t l = 0; l < layers; ++l) {
    cache.pre[l] = params_.weights[l] * cache.activations[l] + params_.biases[l];
    if (l + 1 < layers) {
      cache.activations[l + 1] = cache.pre[l].cwiseMax(0.0);
    } else if (output_ == OutputActivation::tanh) {
      // tanh rounds to exactly +-1 for large inputs; keep the open interval.
      const double edge = std::nextafter(1.0, 0.0);
      cache.activations[l + 1] = cache.pre[l].array().tanh().min(edge).max(-edge).matrix();
    } else {
      cache.activations[l + 1] = cache.pre[l];
    }
  }
  return cache.activations.back();
}

namespace {

// Gradients w.r.t. each layer's pre-activation, last layer first.
Vec output_delta(const MlpModel& m, const MlpModel::Cache& cache, const Vec& grad_output) {
  if (m.output_activation() == OutputActivation::tanh) {
    const Vec& y = cache.activations.back();
    return grad_output.cwiseProduct((1.0 - y.array().square()).matrix());
  }
  return grad_output;
}

}  // namespace

MlpParameters MlpModel::backward(const Cache& cache, const Vec& grad_output) const {
  require_dims(grad_output.size() == output_dim(), "MlpModel::backward: gradient has wrong size");
  MlpParameters grad = zero_like();
  Vec delta = output_delta(*this, cache, grad_output);
  for (size_t l = params_.weights.size(); l-- > 0;) {
    grad.weights[l].noalias() = delta * cache.activations[l].transpose();
    grad.biases[l] = delta;
    if (l > 0) {
      Vec back = params_.weights[l].transpose() * delta;
      delta = back.cwiseProduct((cache.pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return grad;
}

Vec MlpModel::input_gradient(const Cache& cache, const Vec& grad_output) const {
  Vec delta = output_delta(*this, cache, grad_output);
  for (size_t l = params_.weights.size(); l-- > 0;) {
    Vec back = params_.weights[l].transpose() * delta;
    if (l > 0) {
      delta = back.cwiseProduct((cache.pre[l - 1].array() > 0.0).cast<double>().matrix());
    } else {
      delta = back;
    }
  }
  return delta.cwiseQuotient(scale_);
}

MlpParameters MlpModel::zero_like() const {
  MlpParameters p;
  for (size_t l = 0; l < params_.weights.size(); ++l) {
    p.weights.push_back(Mat::Zero(params_.weights[l].rows(), params_.weights[l].cols()));
    p.biases.push_back(Vec::Zero(params_.biases[l].size()));
  }
  return p;
}

void MlpModel::set_input_normalization(Vec shift, Vec scale) {
  require_dims(shift.size() == input_dim() && scale.size() == input_dim(),
               "set_input_normalization: wrong size");
  if ((scale.array() <= 0.0).any()) throw Error("input scale must be positive");
  shift_ = std::move(shift);
  scale_ = std::move(scale);
}

Index MlpModel::parameter_count() const {
  Index n = 0;
  for (size_t l = 0; l < params_.weights.size(); ++l) n += params_.weights[l].size() + params_.biases[l].size();
  return n;
}

Vec flatten(const MlpParameters& p) {
  Index n = 0;
  for (size_t l = 0; l < p.weights.size(); ++l) n += p.weights[l].size() + p.biases[l].size();
  Vec flat(n);
  Index off = 0;
  for (size_t l = 0; l < p.weights.size(); ++l) {
    flat.segment(off, p.weights[l].size()) = p.weights[l].reshaped();
    off += p.weights[l].size();
    flat.segment(off, p.biases[l].size()) = p.biases[l];
    off += p.biases[l].size();
  }
  return flat;
}

Vec MlpModel::flat_parameters() const { return flatten(params_); }

void MlpModel::set_flat_parameters(const Vec& flat) {
  require_dims(flat.size() == parameter_count(), "set_flat_parameters: wrong size");
  Index off = 0;
  for (size_t l = 0; l < params_.weights.size(); ++l) {
    Mat& w = params_.weights[l];
    w.reshaped() = flat.segment(off, w.size());
    off += w.size();
    params_.biases[l] = flat.segment(off, params_.biases[l].size());
    off += params_.biases[l].size();
  }
}

void fit_input_normalization(MlpModel& model, const std::vector<Vec>& inputs) {
  if (inputs.empty()) return;
  const Index d = model.input_dim();
  Vec mean = Vec::Zero(d);
  for (const Vec& v : inputs) mean += v;
  mean /= static_cast<double>(inputs.size());
  Vec var = Vec::Zero(d);
  for (const Vec& v : inputs) var += (v - mean).cwiseAbs2();
  var /= static_cast<double>(inputs.size());
  Vec scale = var.cwiseSqrt();
  for (Index i = 0; i < d; ++i)
    if (!(scale(i) > 1e-8)) scale(i) = 1.0;
  model.set_input_normalization(mean, scale);
}

}  // namespace loop_lc
