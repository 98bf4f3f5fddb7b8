#include "siftwood/sift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "siftwood/errors.hpp"

namespace siftwood::sift {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMinImageSide = 32;
constexpr int kMinOctaveSide = 8;
constexpr double kOrientationPeakRatio = 0.8;
constexpr double kOrientationSigmaFactor = 1.5;
constexpr double kDescriptorClamp = 0.2;
constexpr int kDescriptorCells = 4;
constexpr int kDescriptorOrientations = 8;
constexpr int kDescriptorSamples = 16;
constexpr double kMaxRefinementOffset = 1.0;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

bool is_strict_extremum(const Plane& below, const Plane& here, const Plane& above,
                        int x, int y) {
  const float v = here.at(x, y);
  bool is_max = true;
  bool is_min = true;
  for (const Plane* p : {&below, &here, &above}) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (p == &here && dx == 0 && dy == 0) continue;
        const float n = p->at(x + dx, y + dy);
        if (!(v > n)) is_max = false;
        if (!(v < n)) is_min = false;
        if (!is_max && !is_min) return false;
      }
    }
  }
  return true;
}

// Solves H * out = rhs for a symmetric 3x3 system; false if singular.
bool solve3(const double h[3][3], const double rhs[3], double out[3]) {
  const double det = h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1]) -
                     h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0]) +
                     h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
  if (std::abs(det) < 1e-18) return false;
  for (int c = 0; c < 3; ++c) {
    double m[3][3];
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) m[r][k] = (k == c) ? rhs[r] : h[r][k];
    out[c] = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
              m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
              m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])) /
             det;
  }
  return true;
}

std::optional<Keypoint> refine(const ScalePyramid& dog, const Candidate& c,
                               const ScaleSpaceConfig& cfg) {
  const auto& levels = dog.octaves[c.octave];
  const Plane& below = levels[c.level - 1];
  const Plane& here = levels[c.level];
  const Plane& above = levels[c.level + 1];
  const int x = c.x;
  const int y = c.y;
  const double v = here.at(x, y);

  const double dx = 0.5 * (here.at(x + 1, y) - here.at(x - 1, y));
  const double dy = 0.5 * (here.at(x, y + 1) - here.at(x, y - 1));
  const double ds = 0.5 * (above.at(x, y) - below.at(x, y));
  const double dxx = here.at(x + 1, y) + here.at(x - 1, y) - 2.0 * v;
  const double dyy = here.at(x, y + 1) + here.at(x, y - 1) - 2.0 * v;
  const double dss = above.at(x, y) + below.at(x, y) - 2.0 * v;
  const double dxy = 0.25 * (here.at(x + 1, y + 1) - here.at(x + 1, y - 1) -
                             here.at(x - 1, y + 1) + here.at(x - 1, y - 1));
  const double dxs = 0.25 * (above.at(x + 1, y) - above.at(x - 1, y) -
                             below.at(x + 1, y) + below.at(x - 1, y));
  const double dys = 0.25 * (above.at(x, y + 1) - above.at(x, y - 1) -
                             below.at(x, y + 1) + below.at(x, y - 1));

  const double hessian[3][3] = {{dxx, dxy, dxs}, {dxy, dyy, dys}, {dxs, dys, dss}};
  const double gradient[3] = {dx, dy, ds};
  const double neg_gradient[3] = {-dx, -dy, -ds};
  double offset[3] = {0.0, 0.0, 0.0};
  if (!solve3(hessian, neg_gradient, offset)) offset[0] = offset[1] = offset[2] = 0.0;
  for (double o : offset)
    if (!(std::abs(o) <= kMaxRefinementOffset)) return std::nullopt;

  const double refined = v + 0.5 * (gradient[0] * offset[0] + gradient[1] * offset[1] +
                                    gradient[2] * offset[2]);
  if (std::abs(refined) < cfg.contrast_threshold) return std::nullopt;

  const double trace = dxx + dyy;
  const double det = dxx * dyy - dxy * dxy;
  const double r = cfg.edge_ratio;
  if (det <= 0.0 || trace * trace / det >= (r + 1.0) * (r + 1.0) / r) return std::nullopt;

  const double ox = x + offset[0];
  const double oy = y + offset[1];
  const double level = c.level + offset[2];
  if (ox < 0.0 || oy < 0.0 || ox > here.width() - 1 || oy > here.height() - 1)
    return std::nullopt;

  Keypoint kp;
  const double step = std::ldexp(1.0, c.octave);
  kp.x = ox * step;
  kp.y = oy * step;
  kp.octave = c.octave;
  kp.level = level;
  kp.scale_sigma = dog.absolute_sigma(c.octave, level);
  kp.peak_value = refined;
  return kp;
}

const Plane& level_for(const ScalePyramid& gauss, const Keypoint& kp) {
  const auto& levels = gauss.octaves.at(static_cast<std::size_t>(kp.octave));
  const int idx = std::clamp(static_cast<int>(std::lround(kp.level)), 0,
                             static_cast<int>(levels.size()) - 1);
  return levels[idx];
}

bool canonical_less(const Keypoint& a, const Keypoint& b) {
  if (a.octave != b.octave) return a.octave < b.octave;
  if (a.y != b.y) return a.y < b.y;
  if (a.x != b.x) return a.x < b.x;
  if (a.scale_sigma != b.scale_sigma) return a.scale_sigma < b.scale_sigma;
  return a.orientation < b.orientation;
}

}  // namespace

void ScaleSpaceConfig::validate() const {
  if (!(base_sigma > 0.0)) throw InvalidArgument("base_sigma must be > 0");
  if (intervals_per_octave < 1) throw InvalidArgument("intervals_per_octave must be >= 1");
  if (octave_count < 0) throw InvalidArgument("octave_count must be >= 0 (0 = auto)");
  if (!(contrast_threshold >= 0.0)) throw InvalidArgument("contrast_threshold must be >= 0");
  if (!(edge_ratio >= 1.0)) throw InvalidArgument("edge_ratio must be >= 1");
}

double ScalePyramid::octave_sigma(double level) const {
  return base_sigma * std::exp2(level / intervals_per_octave);
}

double ScalePyramid::absolute_sigma(int octave, double level) const {
  return std::ldexp(octave_sigma(level), octave);
}

double Keypoint::octave_x() const { return std::ldexp(x, -octave); }
double Keypoint::octave_y() const { return std::ldexp(y, -octave); }

int auto_octave_count(int width, int height) {
  const int side = std::min(width, height);
  int count = 0;
  while ((side >> count) >= 2 * kMinOctaveSide) ++count;
  return count;
}

ScalePyramid build_gaussian_pyramid(const GrayImage& img, const ScaleSpaceConfig& cfg) {
  cfg.validate();
  const int side = std::min(img.width(), img.height());
  if (side < kMinImageSide)
    throw InvalidArgument("image too small for scale space: " + std::to_string(img.width()) +
                          "x" + std::to_string(img.height()) + " (need >= 32x32)");
  const int octaves = cfg.octave_count > 0 ? cfg.octave_count
                                           : auto_octave_count(img.width(), img.height());
  if ((side >> (octaves - 1)) < kMinOctaveSide)
    throw InvalidArgument("octave_count " + std::to_string(octaves) +
                          " leaves the last octave below 8x8");

  ScalePyramid pyr;
  pyr.base_sigma = cfg.base_sigma;
  pyr.intervals_per_octave = cfg.intervals_per_octave;
  const int levels = cfg.intervals_per_octave + 3;
  pyr.octaves.resize(octaves);

  for (int i = 0; i < levels; ++i)
    pyr.octaves[0].push_back(gaussian_blur(img.plane(), pyr.octave_sigma(i)));

  const double sigma0 = pyr.octave_sigma(0);
  for (int o = 1; o < octaves; ++o) {
    Plane base = downsample_half(pyr.octaves[o - 1][cfg.intervals_per_octave]);
    auto& out = pyr.octaves[o];
    out.reserve(levels);
    for (int i = 1; i < levels; ++i) {
      const double s = pyr.octave_sigma(i);
      out.push_back(gaussian_blur(base, std::sqrt(s * s - sigma0 * sigma0)));
    }
    out.insert(out.begin(), std::move(base));
  }
  return pyr;
}

ScalePyramid build_dog_pyramid(const ScalePyramid& gauss) {
  ScalePyramid dog;
  dog.base_sigma = gauss.base_sigma;
  dog.intervals_per_octave = gauss.intervals_per_octave;
  dog.octaves.resize(gauss.octaves.size());
  for (std::size_t o = 0; o < gauss.octaves.size(); ++o) {
    const auto& g = gauss.octaves[o];
    for (std::size_t d = 0; d + 1 < g.size(); ++d) {
      Plane diff(g[d].width(), g[d].height());
      const auto lo = g[d].values();
      const auto hi = g[d + 1].values();
      auto out = diff.values();
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = hi[i] - lo[i];
      dog.octaves[o].push_back(std::move(diff));
    }
  }
  return dog;
}

std::vector<Candidate> find_candidates(const ScalePyramid& dog) {
  std::vector<Candidate> out;
  for (std::size_t o = 0; o < dog.octaves.size(); ++o) {
    const auto& levels = dog.octaves[o];
    for (std::size_t l = 1; l + 1 < levels.size(); ++l) {
      const Plane& here = levels[l];
      for (int y = 1; y + 1 < here.height(); ++y)
        for (int x = 1; x + 1 < here.width(); ++x)
          if (is_strict_extremum(levels[l - 1], here, levels[l + 1], x, y))
            out.push_back({static_cast<int>(o), static_cast<int>(l), x, y});
    }
  }
  return out;
}

std::vector<Keypoint> detect_extrema(const ScalePyramid& dog, const ScaleSpaceConfig& cfg) {
  cfg.validate();
  std::vector<Keypoint> out;
  for (const Candidate& c : find_candidates(dog))
    if (auto kp = refine(dog, c, cfg)) out.push_back(*kp);
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

std::vector<double> orientation_histogram(const ScalePyramid& gauss, const Keypoint& kp) {
  const Plane& img = level_for(gauss, kp);
  const double sigma = kOrientationSigmaFactor * gauss.octave_sigma(kp.level);
  const int radius = static_cast<int>(std::lround(3.0 * sigma));
  const int cx = static_cast<int>(std::lround(kp.octave_x()));
  const int cy = static_cast<int>(std::lround(kp.octave_y()));
  if (cx - radius < 1 || cy - radius < 1 || cx + radius > img.width() - 2 ||
      cy + radius > img.height() - 2)
    return {};

  std::vector<double> hist(kOrientationBins, 0.0);
  const double denom = 2.0 * sigma * sigma;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      const int x = cx + dx;
      const int y = cy + dy;
      const double gx = static_cast<double>(img.at(x + 1, y)) - img.at(x - 1, y);
      const double gy = static_cast<double>(img.at(x, y + 1)) - img.at(x, y - 1);
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      const double angle = wrap_angle(std::atan2(gy, gx));
      const double weight = std::exp(-(dx * dx + dy * dy) / denom);
      const int bin =
          static_cast<int>(std::lround(angle * kOrientationBins / kTwoPi)) % kOrientationBins;
      hist[bin] += weight * mag;
    }
  }
  return hist;
}

std::vector<Keypoint> assign_orientation(const ScalePyramid& gauss, const Keypoint& kp) {
  const auto hist = orientation_histogram(gauss, kp);
  if (hist.empty()) return {};
  const double peak = *std::max_element(hist.begin(), hist.end());
  if (!(peak > 0.0)) return {};

  std::vector<Keypoint> out;
  for (int i = 0; i < kOrientationBins; ++i) {
    const double left = hist[(i + kOrientationBins - 1) % kOrientationBins];
    const double centre = hist[i];
    const double right = hist[(i + 1) % kOrientationBins];
    if (!(centre > left && centre >= right)) continue;
    if (centre < kOrientationPeakRatio * peak) continue;
    const double curvature = left - 2.0 * centre + right;
    const double offset = curvature != 0.0 ? 0.5 * (left - right) / curvature : 0.0;
    Keypoint oriented = kp;
    oriented.orientation = wrap_angle((i + offset) * kTwoPi / kOrientationBins);
    out.push_back(oriented);
  }
  return out;
}

bool normalize_descriptor(std::array<double, kDescriptorLength>& bins) {
  auto normalize = [&bins]() {
    double norm = 0.0;
    for (double b : bins) norm += b * b;
    norm = std::sqrt(norm);
    if (!(norm > 1e-12)) return false;
    for (double& b : bins) b /= norm;
    return true;
  };
  if (!normalize()) return false;
  for (double& b : bins) b = std::min(b, kDescriptorClamp);
  return normalize();
}

std::optional<KeypointDescriptor> compute_descriptor(const ScalePyramid& gauss,
                                                     const Keypoint& kp) {
  const Plane& img = level_for(gauss, kp);
  const double sigma = gauss.octave_sigma(kp.level);
  const double spacing = 3.0 * sigma / kDescriptorCells;
  const double half_extent = 0.5 * (kDescriptorSamples - 1) * spacing;
  const double reach = half_extent * std::numbers::sqrt2 + 1.0;
  const double kx = kp.octave_x();
  const double ky = kp.octave_y();
  if (kx - reach < 0.0 || ky - reach < 0.0 || kx + reach > img.width() - 1 ||
      ky + reach > img.height() - 1)
    return std::nullopt;

  const double cos_t = std::cos(kp.orientation);
  const double sin_t = std::sin(kp.orientation);
  const double centre = 0.5 * (kDescriptorSamples - 1);
  const double window_sigma = 0.5 * kDescriptorSamples;
  const double window_denom = 2.0 * window_sigma * window_sigma;

  std::array<double, kDescriptorLength> hist{};
  auto add = [&](int cy, int cx, int co, double value) {
    if (cx < 0 || cx >= kDescriptorCells || cy < 0 || cy >= kDescriptorCells) return;
    co %= kDescriptorOrientations;
    hist[(cy * kDescriptorCells + cx) * kDescriptorOrientations + co] += value;
  };

  for (int i = 0; i < kDescriptorSamples; ++i) {
    for (int j = 0; j < kDescriptorSamples; ++j) {
      const double u = (j - centre) * spacing;
      const double v = (i - centre) * spacing;
      const double px = kx + cos_t * u - sin_t * v;
      const double py = ky + sin_t * u + cos_t * v;
      const double gx = img.sample(px + 1.0, py) - img.sample(px - 1.0, py);
      const double gy = img.sample(px, py + 1.0) - img.sample(px, py - 1.0);
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      const double rel = wrap_angle(std::atan2(gy, gx) - kp.orientation);
      const double weight =
          std::exp(-((i - centre) * (i - centre) + (j - centre) * (j - centre)) / window_denom);
      const double value = weight * mag;

      const double cell_x = (j + 0.5) / kDescriptorCells - 0.5;
      const double cell_y = (i + 0.5) / kDescriptorCells - 0.5;
      const double cell_o = rel * kDescriptorOrientations / kTwoPi;
      const int x0 = static_cast<int>(std::floor(cell_x));
      const int y0 = static_cast<int>(std::floor(cell_y));
      const int o0 = static_cast<int>(std::floor(cell_o));
      const double fx = cell_x - x0;
      const double fy = cell_y - y0;
      const double fo = cell_o - o0;
      for (int a = 0; a < 2; ++a) {
        const double wy = a ? fy : 1.0 - fy;
        for (int b = 0; b < 2; ++b) {
          const double wx = b ? fx : 1.0 - fx;
          for (int c = 0; c < 2; ++c) {
            const double wo = c ? fo : 1.0 - fo;
            add(y0 + a, x0 + b, o0 + c, value * wy * wx * wo);
          }
        }
      }
    }
  }

  if (!normalize_descriptor(hist)) return std::nullopt;

  KeypointDescriptor desc;
  desc.keypoint = kp;
  for (int i = 0; i < kDescriptorLength; ++i) desc.bins[i] = static_cast<float>(hist[i]);
  return desc;
}

std::vector<KeypointDescriptor> extract_keypoints(const GrayImage& img,
                                                  const ScaleSpaceConfig& cfg) {
  const ScalePyramid gauss = build_gaussian_pyramid(img, cfg);
  const ScalePyramid dog = build_dog_pyramid(gauss);
  std::vector<KeypointDescriptor> out;
  for (const Keypoint& kp : detect_extrema(dog, cfg))
    for (const Keypoint& oriented : assign_orientation(gauss, kp))
      if (auto desc = compute_descriptor(gauss, oriented)) out.push_back(std::move(*desc));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return canonical_less(a.keypoint, b.keypoint);
  });
  return out;
}

}  // namespace siftwood::sift
