#include "siftwood/bow.hpp"

#include <array>

#include "siftwood/errors.hpp"

namespace siftwood::bow {

FeatureVector encode_histogram(std::span<const sift::KeypointDescriptor> descriptors,
                               const clustering::Codebook& codebook) {
  if (codebook.dim() != sift::kDescriptorLength)
    throw InvalidArgument("codebook dimension " + std::to_string(codebook.dim()) +
                          " does not match descriptor length 128");
  if (codebook.k() == 0) throw InvalidArgument("codebook is empty");
  if (descriptors.empty()) throw NoKeypointsError("image has no keypoints to encode");

  std::vector<std::size_t> counts(codebook.k(), 0);
  std::array<double, sift::kDescriptorLength> point{};
  for (const auto& d : descriptors) {
    std::copy(d.bins.begin(), d.bins.end(), point.begin());
    ++counts[clustering::assign_nearest(point, codebook.centroids).index];
  }
  FeatureVector out;
  out.method = FeatureMethod::SiftBow;
  out.values.resize(counts.size());
  const double total = static_cast<double>(descriptors.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    out.values[i] = static_cast<double>(counts[i]) / total;
  return out;
}

FeatureVector encode_with_training_codebook(
    std::span<const sift::KeypointDescriptor> test_descriptors,
    const clustering::Codebook& codebook) {
  return encode_histogram(test_descriptors, codebook);
}

void append_descriptors(clustering::PointSet& pool,
                        std::span<const sift::KeypointDescriptor> descriptors) {
  for (const auto& d : descriptors) pool.add_converted<float>(d.bins);
}

}  // namespace siftwood::bow
