#pragma once

#include <cstdint>
#include <filesystem>

#include "siftwood/dataset.hpp"
#include "siftwood/image.hpp"

namespace siftwood::synthetic {

struct SyntheticSpec {
  int classes = 5;
  int images_per_class = 40;
  int size = 256;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Procedural wood-like texture: a warped grating (growth rings) with a
/// class-specific period and profile, a field of dark pores with
/// class-specific radius and density, and additive noise. Orientation, phase
/// and pore positions vary per image.
GrayImage synthesize_texture(int class_id, int image_index, const SyntheticSpec& spec);

/// Writes out_dir/class_XX/img_YYY.png for every class and image and returns
/// the loaded dataset. Output bytes depend only on the spec.
Dataset generate_synthetic_dataset(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

}  // namespace siftwood::synthetic
