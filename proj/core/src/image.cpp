#include "siftwood/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "siftwood/errors.hpp"

namespace siftwood {

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), rgb_(std::move(rgb)) {
  if (width < 1 || height < 1) throw InvalidArgument("RgbImage: empty dimensions");
  if (rgb_.size() != static_cast<std::size_t>(width) * height * 3)
    throw InvalidArgument("RgbImage: pixel buffer does not match dimensions");
}

Plane::Plane(int width, int height, float fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) throw InvalidArgument("Plane: empty dimensions");
  values_.assign(static_cast<std::size_t>(width) * height, fill);
}

Plane::Plane(int width, int height, std::vector<float> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width < 1 || height < 1) throw InvalidArgument("Plane: empty dimensions");
  if (values_.size() != static_cast<std::size_t>(width) * height)
    throw InvalidArgument("Plane: value count does not match dimensions");
}

float Plane::clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return at(x, y);
}

double Plane::sample(double x, double y) const {
  x = std::clamp(x, 0.0, static_cast<double>(width_ - 1));
  y = std::clamp(y, 0.0, static_cast<double>(height_ - 1));
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, width_ - 1);
  const int y1 = std::min(y0 + 1, height_ - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = at(x0, y0) + fx * (at(x1, y0) - at(x0, y0));
  const double bottom = at(x0, y1) + fx * (at(x1, y1) - at(x0, y1));
  return top + fy * (bottom - top);
}

GrayImage::GrayImage(Plane plane) : plane_(std::move(plane)) {
  for (float& v : plane_.values()) {
    if (!(v >= -1e-5f && v <= 1.0f + 1e-5f))
      throw InvalidArgument("GrayImage: value outside [0, 1]: " + std::to_string(v));
    v = std::clamp(v, 0.0f, 1.0f);
  }
}

GrayImage::GrayImage(int width, int height, std::vector<float> values)
    : GrayImage(Plane(width, height, std::move(values))) {}

GrayImage to_grayscale(const RgbImage& img) {
  const auto rgb = img.data();
  std::vector<float> out(static_cast<std::size_t>(img.width()) * img.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = rgb[3 * i];
    const double g = rgb[3 * i + 1];
    const double b = rgb[3 * i + 2];
    out[i] = static_cast<float>((0.299 * r + 0.587 * g + 0.114 * b) / 255.0);
  }
  return GrayImage(img.width(), img.height(), std::move(out));
}

GrayImage resize_bilinear(const GrayImage& img, int new_width, int new_height) {
  if (new_width < 1 || new_height < 1)
    throw InvalidArgument("resize_bilinear: target dimensions must be positive");
  const Plane& src = img.plane();
  const double sx = static_cast<double>(img.width()) / new_width;
  const double sy = static_cast<double>(img.height()) / new_height;
  std::vector<float> out(static_cast<std::size_t>(new_width) * new_height);
  for (int y = 0; y < new_height; ++y) {
    const double fy = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < new_width; ++x) {
      const double fx = (x + 0.5) * sx - 0.5;
      out[static_cast<std::size_t>(y) * new_width + x] =
          static_cast<float>(src.sample(fx, fy));
    }
  }
  return GrayImage(new_width, new_height, std::move(out));
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian_kernel: sigma must be > 0");
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
    taps[i + radius] = w;
    sum += w;
  }
  for (double& w : taps) w /= sum;
  return taps;
}

Plane gaussian_blur(const Plane& img, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian_blur: sigma must be > 0");
  const auto taps = gaussian_kernel(sigma);
  const int radius = static_cast<int>(taps.size() / 2);
  const int w = img.width();
  const int h = img.height();

  std::vector<double> horizontal(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const float* row = img.values().data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += taps[k + radius] * row[std::clamp(x + k, 0, w - 1)];
      horizontal[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }

  Plane out(w, h);
  std::vector<double> column(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) column[y] = horizontal[static_cast<std::size_t>(y) * w + x];
    for (int y = 0; y < h; ++y) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += taps[k + radius] * column[std::clamp(y + k, 0, h - 1)];
      out.at(x, y) = static_cast<float>(acc);
    }
  }
  return out;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  return GrayImage(gaussian_blur(img.plane(), sigma));
}

Plane downsample_half(const Plane& img) {
  const int w = img.width() / 2;
  const int h = img.height() / 2;
  if (w < 1 || h < 1) throw InvalidArgument("downsample_half: image too small");
  Plane out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(x, y) = img.at(2 * x, 2 * y);
  return out;
}

GrayImage load_gray(const std::filesystem::path& path, int target_width,
                    int target_height) {
  GrayImage gray = to_grayscale(read_image(path));
  if (target_width > 0 && target_height > 0 &&
      (gray.width() != target_width || gray.height() != target_height))
    return resize_bilinear(gray, target_width, target_height);
  return gray;
}

}  // namespace siftwood
