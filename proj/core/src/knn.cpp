#include "siftwood/knn.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "siftwood/errors.hpp"

namespace siftwood::ml {

KnnModel knn_train(const SampleSet& samples, std::size_t k, KnnWeighting weighting) {
  if (samples.empty()) throw InvalidArgument("knn_train: empty training set");
  if (k < 1 || k > samples.size())
    throw InvalidArgument("knn_train: k=" + std::to_string(k) + " is not in [1, " +
                          std::to_string(samples.size()) + "]");
  return KnnModel{samples, k, weighting};
}

int knn_predict(const KnnModel& model, std::span<const double> query) {
  const SampleSet& s = model.samples;
  if (query.size() != s.dim())
    throw InvalidArgument("knn_predict: query length " + std::to_string(query.size()) +
                          " does not match " + std::to_string(s.dim()));

  struct Neighbour {
    double d2;
    int label;
    std::size_t index;
  };
  std::vector<Neighbour> all(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto row = s.row(i);
    double d2 = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double diff = row[j] - query[j];
      d2 += diff * diff;
    }
    all[i] = {d2, s.label(i), i};
  }
  auto closer = [](const Neighbour& a, const Neighbour& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    if (a.label != b.label) return a.label < b.label;
    return a.index < b.index;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(model.k), all.end(),
                    closer);

  constexpr double kEpsilon = 1e-12;
  std::vector<double> votes(s.num_classes(), 0.0);
  for (std::size_t i = 0; i < model.k; ++i)
    votes[all[i].label] +=
        model.weighting == KnnWeighting::Uniform ? 1.0 : 1.0 / (all[i].d2 + kEpsilon);

  const double best = *std::max_element(votes.begin(), votes.end());
  for (std::size_t i = 0; i < model.k; ++i)
    if (votes[all[i].label] == best) return all[i].label;
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

}  // namespace siftwood::ml
