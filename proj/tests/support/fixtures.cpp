#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <unistd.h>

#include "siftwood/synthetic.hpp"

namespace fixtures {

using siftwood::GrayImage;

namespace {

GrayImage from_fn(int w, int h, auto fn) {
  std::vector<float> v(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      v[static_cast<std::size_t>(y) * w + x] = std::clamp(static_cast<float>(fn(x, y)), 0.0f, 1.0f);
  return GrayImage(w, h, std::move(v));
}

}  // namespace

GrayImage constant(int w, int h, float v) {
  return from_fn(w, h, [v](int, int) { return v; });
}

GrayImage blob(int w, int h, double cx, double cy, double sigma, float peak) {
  return blobs(w, h, {{cx, cy}}, sigma, peak);
}

GrayImage blobs(int w, int h, const std::vector<std::pair<double, double>>& centers,
                double sigma, float peak) {
  return from_fn(w, h, [&](int x, int y) {
    double v = 0.1;
    for (const auto& [cx, cy] : centers) {
      const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      v += peak * std::exp(-r2 / (2.0 * sigma * sigma));
    }
    return v;
  });
}

GrayImage grating(int w, int h, double period, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return from_fn(w, h, [&](int x, int y) {
    return 0.5 + 0.4 * std::sin(2.0 * std::numbers::pi * (x * c + y * s) / period);
  });
}

GrayImage binary_columns(int w, int h, int run, float lo, float hi) {
  return from_fn(w, h, [&](int x, int) { return (x / run) % 2 == 0 ? lo : hi; });
}

GrayImage vertical_ramp(int w, int h) {
  return from_fn(w, h, [&](int, int y) { return 0.1 + 0.8 * y / (h - 1.0); });
}

GrayImage noise(int w, int h, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return from_fn(w, h, [&](int, int) { return (gen() >> 11) * 0x1.0p-53; });
}

GrayImage scene(int w, int h, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto u = [&] { return (gen() >> 11) * 0x1.0p-53; };
  struct Spot {
    double x, y, s, a;
  };
  std::vector<Spot> spots;
  for (int i = 0; i < 40; ++i) spots.push_back({u() * w, u() * h, 1.5 + 5.0 * u(), u() < 0.5 ? -0.35 : 0.35});
  return from_fn(w, h, [&](int x, int y) {
    double v = 0.5 + 0.05 * std::sin(x * 0.21 + y * 0.07);
    for (const auto& sp : spots) {
      const double r2 = (x - sp.x) * (x - sp.x) + (y - sp.y) * (y - sp.y);
      v += sp.a * std::exp(-r2 / (2.0 * sp.s * sp.s));
    }
    return v;
  });
}

GrayImage rotate90(const GrayImage& img) {
  const int w = img.width(), h = img.height();
  std::vector<float> v(static_cast<std::size_t>(w) * h);
  // Output is h wide and w tall.
  for (int y = 0; y < w; ++y)
    for (int x = 0; x < h; ++x) v[static_cast<std::size_t>(y) * h + x] = img.at(w - 1 - y, x);
  return GrayImage(h, w, std::move(v));
}

GrayImage add_constant(const GrayImage& img, float c) {
  return from_fn(img.width(), img.height(), [&](int x, int y) { return img.at(x, y) + c; });
}

TempDir::TempDir(const std::string& tag) {
  path_ = std::filesystem::temp_directory_path() /
          ("siftwood-test-" + tag + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

const siftwood::Dataset& synthetic_set() {
  static TempDir dir("synthetic");
  static const siftwood::Dataset ds =
      siftwood::synthetic::generate_synthetic_dataset({5, 40, 256, 7}, dir.path() / "data");
  return ds;
}

}  // namespace fixtures
