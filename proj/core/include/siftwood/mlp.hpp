#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "siftwood/samples.hpp"

namespace siftwood::ml {

/// One sigmoid hidden layer and a softmax output layer.
struct MlpModel {
  std::size_t input_dim = 0;
  std::size_t hidden = 0;
  std::size_t classes = 0;
  std::vector<double> w1;  // hidden x input_dim, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // classes x hidden, row-major
  std::vector<double> b2;  // classes

  static MlpModel zeros(std::size_t input_dim, std::size_t hidden, std::size_t classes);

  std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
  /// Parameters in the order w1, b1, w2, b2.
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> params);
};

struct MlpOptions {
  std::size_t hidden = 100;
  std::uint64_t rng_seed = 0;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::size_t patience = 25;
  std::size_t max_epochs = 5000;
};

struct MlpTrainingLog {
  std::vector<double> train_loss;       // at the start of each epoch
  std::vector<double> validation_loss;  // after each epoch's update
  std::size_t best_epoch = 0;
  bool early_stopped = false;
};

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // same order as MlpModel::flatten
};

/// Mean softmax cross-entropy over the set and its analytic gradient.
LossAndGradient mlp_loss_and_gradient(const MlpModel& model, const SampleSet& samples);
double mlp_loss(const MlpModel& model, const SampleSet& samples);

/// Full-batch gradient descent with momentum and validation early stopping;
/// the returned weights are those with the lowest validation loss. Weights
/// start uniform in +-sqrt(6 / (fan_in + fan_out)).
MlpModel mlp_train(const SampleSet& train, const SampleSet& validation,
                   const MlpOptions& options, MlpTrainingLog* log = nullptr);

struct MlpPrediction {
  int label = 0;
  std::vector<double> probabilities;
};

std::vector<double> mlp_probabilities(const MlpModel& model, std::span<const double> x);

/// Argmax of the softmax output, ties to the lowest class id.
MlpPrediction mlp_predict(const MlpModel& model, std::span<const double> x);

}  // namespace siftwood::ml
