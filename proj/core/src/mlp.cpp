#include "siftwood/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "siftwood/errors.hpp"
#include "siftwood/rng.hpp"

namespace siftwood::ml {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void softmax_inplace(std::vector<double>& z) {
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

struct Activations {
  std::vector<double> hidden;
  std::vector<double> probs;
};

Activations forward(const MlpModel& m, std::span<const double> x) {
  Activations a;
  a.hidden.resize(m.hidden);
  for (std::size_t h = 0; h < m.hidden; ++h) {
    const double* w = m.w1.data() + h * m.input_dim;
    double z = m.b1[h];
    for (std::size_t i = 0; i < m.input_dim; ++i) z += w[i] * x[i];
    a.hidden[h] = sigmoid(z);
  }
  a.probs.resize(m.classes);
  for (std::size_t c = 0; c < m.classes; ++c) {
    const double* w = m.w2.data() + c * m.hidden;
    double z = m.b2[c];
    for (std::size_t h = 0; h < m.hidden; ++h) z += w[h] * a.hidden[h];
    a.probs[c] = z;
  }
  softmax_inplace(a.probs);
  return a;
}

void check_compatible(const MlpModel& m, const SampleSet& s) {
  if (s.dim() != m.input_dim)
    throw InvalidArgument("MLP input dimension " + std::to_string(m.input_dim) +
                          " does not match samples of length " + std::to_string(s.dim()));
  if (static_cast<std::size_t>(s.num_classes()) != m.classes)
    throw InvalidArgument("MLP class count does not match the sample set");
}

double cross_entropy(double p) {
  return -std::log(std::max(p, std::numeric_limits<double>::min()));
}

}  // namespace

MlpModel MlpModel::zeros(std::size_t input_dim, std::size_t hidden, std::size_t classes) {
  MlpModel m;
  m.input_dim = input_dim;
  m.hidden = hidden;
  m.classes = classes;
  m.w1.assign(hidden * input_dim, 0.0);
  m.b1.assign(hidden, 0.0);
  m.w2.assign(classes * hidden, 0.0);
  m.b2.assign(classes, 0.0);
  return m;
}

std::vector<double> MlpModel::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto* v : {&w1, &b1, &w2, &b2}) out.insert(out.end(), v->begin(), v->end());
  return out;
}

void MlpModel::unflatten(std::span<const double> params) {
  if (params.size() != parameter_count())
    throw InvalidArgument("MlpModel::unflatten: parameter count mismatch");
  std::size_t offset = 0;
  for (auto* v : {&w1, &b1, &w2, &b2}) {
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(offset), v->size(), v->begin());
    offset += v->size();
  }
}

double mlp_loss(const MlpModel& model, const SampleSet& samples) {
  check_compatible(model, samples);
  if (samples.empty()) throw InvalidArgument("mlp_loss: empty sample set");
  double total = 0.0;
  for (std::size_t n = 0; n < samples.size(); ++n)
    total += cross_entropy(forward(model, samples.row(n)).probs[samples.label(n)]);
  return total / static_cast<double>(samples.size());
}

LossAndGradient mlp_loss_and_gradient(const MlpModel& m, const SampleSet& samples) {
  check_compatible(m, samples);
  if (samples.empty()) throw InvalidArgument("mlp_loss_and_gradient: empty sample set");
  MlpModel g = MlpModel::zeros(m.input_dim, m.hidden, m.classes);
  double total = 0.0;
  std::vector<double> d_hidden(m.hidden);
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const auto x = samples.row(n);
    const int label = samples.label(n);
    Activations a = forward(m, x);
    total += cross_entropy(a.probs[label]);

    std::vector<double>& d_out = a.probs;  // dL/dz = p - onehot
    d_out[label] -= 1.0;
    std::fill(d_hidden.begin(), d_hidden.end(), 0.0);
    for (std::size_t c = 0; c < m.classes; ++c) {
      const double d = d_out[c];
      g.b2[c] += d;
      double* gw = g.w2.data() + c * m.hidden;
      const double* w = m.w2.data() + c * m.hidden;
      for (std::size_t h = 0; h < m.hidden; ++h) {
        gw[h] += d * a.hidden[h];
        d_hidden[h] += d * w[h];
      }
    }
    for (std::size_t h = 0; h < m.hidden; ++h) {
      const double d = d_hidden[h] * a.hidden[h] * (1.0 - a.hidden[h]);
      g.b1[h] += d;
      double* gw = g.w1.data() + h * m.input_dim;
      for (std::size_t i = 0; i < m.input_dim; ++i) gw[i] += d * x[i];
    }
  }
  const double scale = 1.0 / static_cast<double>(samples.size());
  LossAndGradient out;
  out.loss = total * scale;
  out.gradient = g.flatten();
  for (double& v : out.gradient) v *= scale;
  return out;
}

MlpModel mlp_train(const SampleSet& train, const SampleSet& validation,
                   const MlpOptions& options, MlpTrainingLog* log) {
  if (train.empty()) throw InvalidArgument("mlp_train: empty training set");
  if (validation.empty()) throw InvalidArgument("mlp_train: empty validation set");
  if (options.hidden < 1) throw InvalidArgument("mlp_train: hidden size must be >= 1");
  if (validation.dim() != train.dim() || validation.num_classes() != train.num_classes())
    throw InvalidArgument("mlp_train: validation set does not match the training set");

  const std::size_t classes = static_cast<std::size_t>(train.num_classes());
  MlpModel model = MlpModel::zeros(train.dim(), options.hidden, classes);
  Rng rng(options.rng_seed);
  const double limit1 = std::sqrt(6.0 / static_cast<double>(train.dim() + options.hidden));
  const double limit2 = std::sqrt(6.0 / static_cast<double>(options.hidden + classes));
  for (double& w : model.w1) w = rng.uniform(-limit1, limit1);
  for (double& w : model.w2) w = rng.uniform(-limit2, limit2);

  std::vector<double> params = model.flatten();
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<double> best = params;
  double best_val = mlp_loss(model, validation);
  std::size_t since_best = 0;
  MlpTrainingLog local;
  MlpTrainingLog& record = log ? *log : local;
  record = {};

  for (std::size_t epoch = 1; epoch <= options.max_epochs; ++epoch) {
    const LossAndGradient lg = mlp_loss_and_gradient(model, train);
    record.train_loss.push_back(lg.loss);
    for (std::size_t i = 0; i < params.size(); ++i) {
      velocity[i] = options.momentum * velocity[i] - options.learning_rate * lg.gradient[i];
      params[i] += velocity[i];
    }
    model.unflatten(params);
    const double val = mlp_loss(model, validation);
    record.validation_loss.push_back(val);
    if (val < best_val) {
      best_val = val;
      best = params;
      record.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= options.patience) {
      record.early_stopped = true;
      break;
    }
  }
  model.unflatten(best);
  return model;
}

std::vector<double> mlp_probabilities(const MlpModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim)
    throw InvalidArgument("mlp_predict: query length " + std::to_string(x.size()) +
                          " does not match " + std::to_string(model.input_dim));
  return forward(model, x).probs;
}

MlpPrediction mlp_predict(const MlpModel& model, std::span<const double> x) {
  MlpPrediction out;
  out.probabilities = mlp_probabilities(model, x);
  out.label = static_cast<int>(
      std::max_element(out.probabilities.begin(), out.probabilities.end()) -
      out.probabilities.begin());
  return out;
}

}  // namespace siftwood::ml
