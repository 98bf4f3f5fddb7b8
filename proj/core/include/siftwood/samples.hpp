#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace siftwood::ml {

/// Labelled feature rows. Labels are dense class ids in [0, num_classes).
class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(std::size_t dim, int num_classes);

  std::size_t dim() const { return dim_; }
  int num_classes() const { return num_classes_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const { return labels_; }

  void add(std::span<const double> features, int label);

  /// Number of distinct labels actually present.
  int present_classes() const;

 private:
  std::size_t dim_ = 0;
  int num_classes_ = 0;
  std::vector<double> values_;
  std::vector<int> labels_;
};

/// Per-feature z-scoring fitted on a training set. Constant features keep
/// scale 1 so they map to 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const SampleSet& samples);
  std::vector<double> apply(std::span<const double> x) const;
  SampleSet apply(const SampleSet& samples) const;
};

}  // namespace siftwood::ml
