#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "siftwood/dataset.hpp"
#include "siftwood/image.hpp"

namespace fixtures {

siftwood::GrayImage constant(int w, int h, float v);

/// Dark background with one Gaussian bump of std dev sigma at (cx, cy).
siftwood::GrayImage blob(int w, int h, double cx, double cy, double sigma, float peak = 0.8f);

siftwood::GrayImage blobs(int w, int h, const std::vector<std::pair<double, double>>& centers,
                          double sigma, float peak = 0.8f);

/// Smooth sinusoidal grating: 0.5 + 0.4 sin(2 pi (x cos a + y sin a) / period).
siftwood::GrayImage grating(int w, int h, double period, double angle);

/// Binary grating along x: columns alternate between lo and hi in runs of `run`.
siftwood::GrayImage binary_columns(int w, int h, int run, float lo, float hi);

/// Values increase with y only.
siftwood::GrayImage vertical_ramp(int w, int h);

/// Uniform noise in [0, 1].
siftwood::GrayImage noise(int w, int h, std::uint64_t seed);

/// Textured test scene with blobs of several sizes over a low-contrast grating.
siftwood::GrayImage scene(int w, int h, std::uint64_t seed);

/// Rotate 90 degrees counter-clockwise: out(x, y) = in(w - 1 - y, x).
siftwood::GrayImage rotate90(const siftwood::GrayImage& img);

siftwood::GrayImage add_constant(const siftwood::GrayImage& img, float c);

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// The standard synthetic set (5 x 40, 256 px, seed 7), generated once per
/// process under the system temp directory.
const siftwood::Dataset& synthetic_set();

}  // namespace fixtures
