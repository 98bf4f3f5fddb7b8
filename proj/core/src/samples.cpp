#include "siftwood/samples.hpp"

#include <cmath>
#include <string>

#include "siftwood/errors.hpp"

namespace siftwood::ml {

SampleSet::SampleSet(std::size_t dim, int num_classes) : dim_(dim), num_classes_(num_classes) {
  if (dim == 0) throw InvalidArgument("SampleSet: feature dimension must be positive");
  if (num_classes < 1) throw InvalidArgument("SampleSet: need at least one class");
}

void SampleSet::add(std::span<const double> features, int label) {
  if (features.size() != dim_)
    throw InvalidArgument("SampleSet: feature length " + std::to_string(features.size()) +
                          " does not match " + std::to_string(dim_));
  if (label < 0 || label >= num_classes_)
    throw InvalidArgument("SampleSet: label " + std::to_string(label) + " out of range");
  values_.insert(values_.end(), features.begin(), features.end());
  labels_.push_back(label);
}

int SampleSet::present_classes() const {
  std::vector<bool> seen(num_classes_, false);
  int count = 0;
  for (int l : labels_)
    if (!seen[l]) {
      seen[l] = true;
      ++count;
    }
  return count;
}

Standardizer Standardizer::fit(const SampleSet& samples) {
  if (samples.empty()) throw InvalidArgument("Standardizer: empty training set");
  const std::size_t d = samples.dim();
  const double n = static_cast<double>(samples.size());
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += samples.row(i)[j];
  for (double& m : s.mean) m /= n;
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = samples.row(i)[j] - s.mean[j];
      s.scale[j] += c * c;
    }
  for (double& v : s.scale) {
    v = std::sqrt(v / n);
    if (!(v > 1e-12)) v = 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  if (x.size() != mean.size())
    throw InvalidArgument("Standardizer: feature length does not match");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
  return out;
}

SampleSet Standardizer::apply(const SampleSet& samples) const {
  SampleSet out(samples.dim(), samples.num_classes());
  for (std::size_t i = 0; i < samples.size(); ++i) out.add(apply(samples.row(i)), samples.label(i));
  return out;
}

}  // namespace siftwood::ml
