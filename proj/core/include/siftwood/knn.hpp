#pragma once

#include <cstddef>
#include <span>

#include "siftwood/samples.hpp"

namespace siftwood::ml {

enum class KnnWeighting { Uniform, InverseDistance };

struct KnnModel {
  SampleSet samples;
  std::size_t k = 1;
  KnnWeighting weighting = KnnWeighting::Uniform;
};

/// Stores the training set. Throws InvalidArgument when it is empty or k is
/// outside [1, n].
KnnModel knn_train(const SampleSet& samples, std::size_t k,
                   KnnWeighting weighting = KnnWeighting::Uniform);

/// Euclidean k-nearest vote. Inverse-distance weights are 1 / (d^2 + 1e-12).
/// Vote ties go to the tied class whose member is nearest to the query, then
/// to the lowest class id.
int knn_predict(const KnnModel& model, std::span<const double> query);

}  // namespace siftwood::ml
