#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace siftwood {

/// 8-bit RGB raster, row-major, three interleaved channels per pixel.
class RgbImage {
 public:
  RgbImage(int width, int height, std::vector<std::uint8_t> rgb);

  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const std::uint8_t> data() const { return rgb_; }

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> rgb_;
};

/// Row-major float raster with no range restriction. Used for blurred
/// levels and difference-of-Gaussian images.
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, float fill = 0.0f);
  Plane(int width, int height, std::vector<float> values);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  float at(int x, int y) const { return values_[index(x, y)]; }
  float& at(int x, int y) { return values_[index(x, y)]; }

  // Coordinates outside the raster are clamped to the nearest border pixel.
  float clamped(int x, int y) const;

  // Bilinear sample at continuous pixel coordinates (pixel centers on integers),
  // clamped at the borders.
  double sample(double x, double y) const;

  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> values_;
};

/// Luminance image with every value in [0, 1].
class GrayImage {
 public:
  // Throws InvalidArgument if a value lies outside [0, 1] by more than 1e-5;
  // smaller rounding excursions are clamped.
  explicit GrayImage(Plane plane);
  GrayImage(int width, int height, std::vector<float> values);

  int width() const { return plane_.width(); }
  int height() const { return plane_.height(); }
  float at(int x, int y) const { return plane_.at(x, y); }
  const Plane& plane() const { return plane_; }
  std::span<const float> values() const { return plane_.values(); }

 private:
  Plane plane_;
};

/// BT.601 luma: (0.299 r + 0.587 g + 0.114 b) / 255.
GrayImage to_grayscale(const RgbImage& img);

/// Bilinear resampling with pixel-center alignment and edge clamping.
GrayImage resize_bilinear(const GrayImage& img, int new_width, int new_height);

/// Normalized 1-D Gaussian taps for radius ceil(4 sigma), centre tap at
/// index radius.
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian convolution with clamp-to-border edges.
Plane gaussian_blur(const Plane& img, double sigma);
GrayImage gaussian_blur(const GrayImage& img, double sigma);

/// Keeps every second pixel in each direction (output floor(w/2) x floor(h/2)).
Plane downsample_half(const Plane& img);

// ---------------------------------------------------------------------------
// Codecs. PNG and JPEG are recognized by their magic bytes; anything else is
// rejected with a FormatError.

enum class ImageFormat { Png, Jpeg, Unknown };

ImageFormat sniff_format(std::span<const std::uint8_t> bytes);

RgbImage decode_image(std::span<const std::uint8_t> bytes);
RgbImage read_image(const std::filesystem::path& path);

/// Encodes an 8-bit single-channel PNG (values quantized as round(v * 255)).
std::vector<std::uint8_t> encode_png_gray(const GrayImage& img);
void write_png_gray(const std::filesystem::path& path, const GrayImage& img);

/// Reads a file, converts to grayscale and optionally resizes. A zero target
/// dimension keeps the native size.
GrayImage load_gray(const std::filesystem::path& path, int target_width = 0,
                    int target_height = 0);

}  // namespace siftwood
