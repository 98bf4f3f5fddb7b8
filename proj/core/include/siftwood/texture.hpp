#pragma once

#include <array>
#include <vector>

#include "siftwood/features.hpp"
#include "siftwood/image.hpp"

namespace siftwood::texture {

inline constexpr int kLbpBins = 256;
inline constexpr int kGlcmFeatureCount = 6;
inline constexpr int kGlcmDirections = 4;

/// 8-neighbour, radius-1 LBP code of the interior pixel (x, y). Neighbours are
/// read clockwise from the top-left; the top-left neighbour is the most
/// significant bit and a bit is set when neighbour >= centre.
int lbp_code(const GrayImage& img, int x, int y);

/// Normalized 256-bin histogram of interior-pixel LBP codes.
FeatureVector lbp_histogram(const GrayImage& img);

struct Offset {
  int dx = 0;
  int dy = 0;
};

/// 0, 45, 90 and 135 degrees at distance d. Image y grows downwards, so 45
/// degrees points up and to the right.
std::array<Offset, kGlcmDirections> glcm_offsets(int distance);

struct GlcmConfig {
  int gray_levels = 16;
  int distance = 1;

  void validate() const;
};

/// Symmetric, unit-mass co-occurrence matrix, row-major levels x levels.
struct GlcmMatrix {
  int levels = 0;
  std::vector<double> p;

  double at(int i, int j) const { return p[static_cast<std::size_t>(i) * levels + j]; }
};

/// Uniform quantization of [0, 1] into `levels` bins.
int quantize(float value, int levels);

GlcmMatrix glcm_matrix(const GrayImage& img, Offset offset, const GlcmConfig& cfg = {});

struct GlcmFeatures {
  double energy = 0.0;
  double entropy = 0.0;
  double inverse_difference_moment = 0.0;
  double dissimilarity = 0.0;
  double contrast = 0.0;
  double variance = 0.0;

  std::array<double, kGlcmFeatureCount> as_array() const {
    return {energy, entropy, inverse_difference_moment, dissimilarity, contrast, variance};
  }
};

GlcmFeatures glcm_features(const GlcmMatrix& m);

/// Six features per direction, directions in the order 0, 45, 90, 135.
FeatureVector glcm_feature_vector(const GrayImage& img, const GlcmConfig& cfg = {});

}  // namespace siftwood::texture
