#pragma once

#include <span>

#include "siftwood/clustering.hpp"
#include "siftwood/features.hpp"
#include "siftwood/sift.hpp"

namespace siftwood::bow {

/// Normalized keypoint histogram: each descriptor votes for its nearest
/// codeword, counts are divided by the descriptor count.
///
/// Throws NoKeypointsError on an empty descriptor list and InvalidArgument
/// when the codebook is not 128-dimensional.
FeatureVector encode_histogram(std::span<const sift::KeypointDescriptor> descriptors,
                               const clustering::Codebook& codebook);

/// Test-time encoding. Same computation as encode_histogram; the separate name
/// marks call sites whose descriptors must never have reached k-means.
FeatureVector encode_with_training_codebook(
    std::span<const sift::KeypointDescriptor> test_descriptors,
    const clustering::Codebook& codebook);

/// Appends every descriptor's 128 bins to a point set (dimension 128).
void append_descriptors(clustering::PointSet& pool,
                        std::span<const sift::KeypointDescriptor> descriptors);

}  // namespace siftwood::bow
