#pragma once

#include <array>
#include <compare>
#include <optional>
#include <vector>

#include "siftwood/image.hpp"

namespace siftwood::sift {

inline constexpr int kDescriptorLength = 128;
inline constexpr int kOrientationBins = 36;

/// Detector parameters. Defaults are the Lowe (2004) values.
struct ScaleSpaceConfig {
  double base_sigma = 1.6;
  int intervals_per_octave = 3;
  int octave_count = 0;  // 0 selects floor(log2(min_dim / 8))
  double contrast_threshold = 0.03;
  double edge_ratio = 10.0;

  void validate() const;
};

/// Gaussian or difference-of-Gaussian stack, indexed [octave][level].
struct ScalePyramid {
  double base_sigma = 1.6;
  int intervals_per_octave = 3;
  std::vector<std::vector<Plane>> octaves;

  /// Blur of a level relative to its own octave's pixel grid.
  double octave_sigma(double level) const;
  /// Blur of a level in input-image pixels.
  double absolute_sigma(int octave, double level) const;
};

int auto_octave_count(int width, int height);

/// Octave 0 level i is the input blurred directly by base*2^(i/s). Octave o>0
/// starts from level s of octave o-1 downsampled 2x; its level i adds blur
/// sqrt(sigma_i^2 - sigma_0^2) on top of that base.
ScalePyramid build_gaussian_pyramid(const GrayImage& img, const ScaleSpaceConfig& cfg);

ScalePyramid build_dog_pyramid(const ScalePyramid& gauss);

/// Integer sample that is a strict extremum among its 26 scale-space neighbours.
struct Candidate {
  int octave = 0;
  int level = 0;
  int x = 0;
  int y = 0;
  auto operator<=>(const Candidate&) const = default;
};

std::vector<Candidate> find_candidates(const ScalePyramid& dog);

struct Keypoint {
  double x = 0.0;  // input-image pixels
  double y = 0.0;
  int octave = 0;
  double level = 0.0;  // refined, fractional level within the octave
  double scale_sigma = 0.0;  // input-image pixels
  double orientation = 0.0;  // radians in [0, 2pi)
  double peak_value = 0.0;  // refined DoG response

  double octave_x() const;
  double octave_y() const;
};

/// Candidates refined by one quadratic step, then filtered by contrast and by
/// the principal-curvature edge test. Sorted by (octave, y, x, scale).
std::vector<Keypoint> detect_extrema(const ScalePyramid& dog, const ScaleSpaceConfig& cfg);

/// 36-bin gradient orientation histogram around kp (Gaussian window with
/// sigma 1.5x the keypoint scale). Empty when the window leaves the image.
std::vector<double> orientation_histogram(const ScalePyramid& gauss, const Keypoint& kp);

/// One keypoint per histogram peak reaching 80% of the maximum.
std::vector<Keypoint> assign_orientation(const ScalePyramid& gauss, const Keypoint& kp);

struct KeypointDescriptor {
  std::array<float, kDescriptorLength> bins{};
  Keypoint keypoint;
};

/// Unit-normalizes, clamps every bin at 0.2 and normalizes again. False when
/// the histogram has no mass.
bool normalize_descriptor(std::array<double, kDescriptorLength>& bins);

/// 4x4x8 gradient histogram over a 16x16 rotated sample grid. Returns nullopt
/// when the window leaves the image or contains no gradient.
std::optional<KeypointDescriptor> compute_descriptor(const ScalePyramid& gauss,
                                                     const Keypoint& kp);

std::vector<KeypointDescriptor> extract_keypoints(const GrayImage& img,
                                                  const ScaleSpaceConfig& cfg = {});

}  // namespace siftwood::sift
