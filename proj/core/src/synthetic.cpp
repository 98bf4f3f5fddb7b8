#include "siftwood/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "siftwood/errors.hpp"
#include "siftwood/parallel.hpp"
#include "siftwood/rng.hpp"

namespace fs = std::filesystem;

namespace siftwood::synthetic {
namespace {

constexpr double kPi = std::numbers::pi;

// Fractional part of c * g: spreads class parameters so that neighbouring
// classes differ in more than one property.
double spread(int c, double g) { return c * g - std::floor(c * g); }

struct ClassStyle {
  double period;        // grating period in pixels
  double sharpness;     // 0 = sinusoid, 1 = square-ish profile
  double pore_radius;   // pixels
  double pore_density;  // pores per 10^4 pixels
  double warp;          // ring warp amplitude in radians
};

ClassStyle style_for(int c, int classes) {
  const double t = classes > 1 ? static_cast<double>(c) / (classes - 1) : 0.0;
  ClassStyle s;
  s.period = 7.0 + 22.0 * t;
  s.sharpness = spread(c, 0.618034);
  s.pore_radius = 1.5 + 3.0 * spread(c + 1, 0.381966);
  s.pore_density = 2.0 + 10.0 * spread(c + 2, 0.754878);
  s.warp = 0.4 + 1.2 * spread(c + 3, 0.569840);
  return s;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (classes < 2) throw InvalidArgument("synthetic dataset needs at least 2 classes");
  if (images_per_class < 1) throw InvalidArgument("images_per_class must be >= 1");
  if (size < 32) throw InvalidArgument("synthetic image size must be >= 32");
}

GrayImage synthesize_texture(int class_id, int image_index, const SyntheticSpec& spec) {
  spec.validate();
  const ClassStyle style = style_for(class_id, spec.classes);
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(class_id) * 1'000'003ull +
                                     static_cast<std::uint64_t>(image_index)));
  const int n = spec.size;

  const double angle = rng.uniform(0.0, kPi);
  const double phase = rng.uniform(0.0, 2.0 * kPi);
  const double period = style.period * rng.uniform(0.93, 1.07);
  const double warp_period = rng.uniform(3.0, 6.0) * n / 4.0;
  const double warp_phase = rng.uniform(0.0, 2.0 * kPi);
  const double brightness = rng.uniform(0.42, 0.58);
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);

  std::vector<float> px(static_cast<std::size_t>(n) * n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double u = x * ca + y * sa;
      const double v = -x * sa + y * ca;
      const double arg = 2.0 * kPi * u / period + phase +
                         style.warp * std::sin(2.0 * kPi * v / warp_period + warp_phase);
      const double s = std::sin(arg);
      const double profile = (1.0 - style.sharpness) * s + style.sharpness * std::tanh(4.0 * s);
      px[static_cast<std::size_t>(y) * n + x] = static_cast<float>(brightness + 0.18 * profile);
    }
  }

  const int pores = static_cast<int>(std::lround(style.pore_density * n * n / 1.0e4));
  for (int p = 0; p < pores; ++p) {
    const double cx = rng.uniform(0.0, n);
    const double cy = rng.uniform(0.0, n);
    const double r = style.pore_radius * rng.uniform(0.8, 1.2);
    const double depth = rng.uniform(0.25, 0.4);
    const int reach = static_cast<int>(std::ceil(3.0 * r));
    for (int y = std::max(0, static_cast<int>(cy) - reach);
         y <= std::min(n - 1, static_cast<int>(cy) + reach); ++y)
      for (int x = std::max(0, static_cast<int>(cx) - reach);
           x <= std::min(n - 1, static_cast<int>(cx) + reach); ++x) {
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        px[static_cast<std::size_t>(y) * n + x] -=
            static_cast<float>(depth * std::exp(-d2 / (2.0 * r * r)));
      }
  }

  for (float& v : px) v = std::clamp(static_cast<float>(v + rng.normal(0.0, 0.02)), 0.0f, 1.0f);
  return GrayImage(n, n, std::move(px));
}

Dataset generate_synthetic_dataset(const SyntheticSpec& spec, const fs::path& out_dir) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir))
    throw IoError("cannot create output directory " + out_dir.string());

  for (int c = 0; c < spec.classes; ++c) {
    char name[32];
    std::snprintf(name, sizeof name, "class_%02d", c);
    fs::create_directories(out_dir / name, ec);
    if (ec) throw IoError("cannot create " + (out_dir / name).string());
  }

  const std::size_t total = static_cast<std::size_t>(spec.classes) * spec.images_per_class;
  parallel::parallel_for(total, [&](std::size_t i) {
    const int c = static_cast<int>(i / spec.images_per_class);
    const int k = static_cast<int>(i % spec.images_per_class);
    char name[64];
    std::snprintf(name, sizeof name, "class_%02d/img_%03d.png", c, k);
    write_png_gray(out_dir / name, synthesize_texture(c, k, spec));
  });
  return load_dataset(out_dir);
}

}  // namespace siftwood::synthetic
