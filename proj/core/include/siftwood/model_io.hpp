#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "siftwood/pipeline.hpp"

namespace siftwood::io {

// Model file: "SWMD", u32 version (1), u32 section count, then sections of
//   4-byte tag, u64 payload length, payload.
//
//   "META"  UTF-8 JSON: extraction config, class names, classifier spec,
//           input dimension.
//   "PREP"  optional standardizer: u32 dim, f32 mean[dim], f32 scale[dim].
//   "CBOK"  optional codebook, in the codebook binary format.
//   "KNN "  u32 k, u32 weighting (0 uniform, 1 inverse distance), u32 dim,
//           u32 classes, u64 n, then n x (i32 label, f32[dim]).
//   "SVM "  u32 kernel kind (0 linear, 1 rbf, 2 polynomial), f32 gamma,
//           u32 degree, f32 coef0, f32 C, u32 classes, u32 dim, u32 machines;
//           per machine i32 positive, i32 negative, f32 rho, u64 iterations,
//           f32 kkt gap, u64 support count, then per support vector
//           i32 y, f32 alpha, f32[dim].
//   "MLP "  u32 input dim, u32 hidden, u32 classes, f32 w1, b1, w2, b2.
//
// Exactly one classifier section is present. All numerics little-endian.

std::vector<std::uint8_t> encode_model(const PipelineModel& model);
PipelineModel decode_model(std::span<const std::uint8_t> bytes);

void write_model(const std::filesystem::path& path, const PipelineModel& model);
PipelineModel read_model(const std::filesystem::path& path);

}  // namespace siftwood::io
