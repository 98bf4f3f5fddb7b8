#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "siftwood/knn.hpp"
#include "siftwood/mlp.hpp"
#include "siftwood/samples.hpp"
#include "siftwood/svm.hpp"

namespace siftwood::ml {

enum class Family { Knn, Svm, Mlp };
std::string_view to_string(Family f);

struct KnnSpec {
  std::size_t k = 1;
  KnnWeighting weighting = KnnWeighting::Uniform;
};

/// Named kernels of the comparison grid. Gaussian widths depend on the feature
/// dimension and are resolved at training time.
enum class KernelPreset { Linear, MediumGaussian, CoarseGaussian, Quadratic, Cubic };
std::string_view to_string(KernelPreset p);
KernelSpec resolve_kernel(KernelPreset preset, std::size_t dim);

struct SvmSpec {
  KernelPreset kernel = KernelPreset::Linear;
  double C = 1.0;
  SmoOptions smo;
};

struct MlpSpec {
  MlpOptions options;
};

using ClassifierSpec = std::variant<KnnSpec, SvmSpec, MlpSpec>;

Family family_of(const ClassifierSpec& spec);

/// Stable short name, e.g. "knn-fine", "knn-k7-weighted", "svm-quadratic-C10", "mlp-60".
std::string describe(const ClassifierSpec& spec);

/// Accepts the names produced by describe() plus the grid aliases
/// knn-fine | knn-medium | knn-coarse | knn-weighted | svm-linear |
/// svm-medium-gaussian | svm-coarse-gaussian | svm-quadratic | svm-cubic | mlp-<hidden>.
ClassifierSpec parse_classifier(std::string_view name);

/// Fine/medium/coarse/weighted k-NN, the five SVM kernels and MLPs with
/// 60..140 hidden units.
std::vector<ClassifierSpec> default_classifier_grid(std::uint64_t mlp_seed = 0);

/// Classifier plus the input preprocessing fitted with it.
struct TrainedModel {
  ClassifierSpec spec;
  int num_classes = 0;
  std::size_t input_dim = 0;
  std::optional<Standardizer> standardizer;
  std::variant<KnnModel, SvmModel, MlpModel> model;
};

struct TrainOptions {
  bool standardize = false;
};

/// Validation samples are used by the MLP only (early stopping).
TrainedModel train_classifier(const ClassifierSpec& spec, const SampleSet& train,
                              const SampleSet& validation, const TrainOptions& options = {},
                              MlpTrainingLog* mlp_log = nullptr);

int predict(const TrainedModel& model, std::span<const double> features);

/// Class probabilities for MLP models; empty for the other families.
std::vector<double> predict_probabilities(const TrainedModel& model,
                                          std::span<const double> features);

}  // namespace siftwood::ml
