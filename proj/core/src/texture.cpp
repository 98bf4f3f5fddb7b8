#include "siftwood/texture.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "siftwood/errors.hpp"

namespace siftwood::texture {

int lbp_code(const GrayImage& img, int x, int y) {
  static constexpr int kDx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
  static constexpr int kDy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
  const float centre = img.at(x, y);
  int code = 0;
  for (int i = 0; i < 8; ++i) {
    code <<= 1;
    if (img.at(x + kDx[i], y + kDy[i]) >= centre) code |= 1;
  }
  return code;
}

FeatureVector lbp_histogram(const GrayImage& img) {
  if (img.width() < 3 || img.height() < 3)
    throw InvalidArgument("lbp_histogram: image must be at least 3x3");
  std::vector<std::size_t> counts(kLbpBins, 0);
  for (int y = 1; y + 1 < img.height(); ++y)
    for (int x = 1; x + 1 < img.width(); ++x) ++counts[lbp_code(img, x, y)];
  const double total = static_cast<double>(img.width() - 2) * (img.height() - 2);
  FeatureVector out;
  out.method = FeatureMethod::Lbp;
  out.values.resize(kLbpBins);
  for (int i = 0; i < kLbpBins; ++i) out.values[i] = static_cast<double>(counts[i]) / total;
  return out;
}

std::array<Offset, kGlcmDirections> glcm_offsets(int distance) {
  return {Offset{distance, 0}, Offset{distance, -distance}, Offset{0, -distance},
          Offset{-distance, -distance}};
}

void GlcmConfig::validate() const {
  if (gray_levels < 2) throw InvalidArgument("GLCM gray_levels must be >= 2");
  if (distance < 1) throw InvalidArgument("GLCM distance must be >= 1");
}

int quantize(float value, int levels) {
  const int q = static_cast<int>(std::floor(static_cast<double>(value) * levels));
  return std::clamp(q, 0, levels - 1);
}

GlcmMatrix glcm_matrix(const GrayImage& img, Offset offset, const GlcmConfig& cfg) {
  cfg.validate();
  const int w = img.width();
  const int h = img.height();
  const int x_begin = std::max(0, -offset.dx);
  const int x_end = std::min(w, w - offset.dx);
  const int y_begin = std::max(0, -offset.dy);
  const int y_end = std::min(h, h - offset.dy);
  if (x_begin >= x_end || y_begin >= y_end)
    throw InvalidArgument("glcm_matrix: image " + std::to_string(w) + "x" + std::to_string(h) +
                          " too small for the offset");

  const int levels = cfg.gray_levels;
  std::vector<double> counts(static_cast<std::size_t>(levels) * levels, 0.0);
  for (int y = y_begin; y < y_end; ++y) {
    for (int x = x_begin; x < x_end; ++x) {
      const int a = quantize(img.at(x, y), levels);
      const int b = quantize(img.at(x + offset.dx, y + offset.dy), levels);
      counts[static_cast<std::size_t>(a) * levels + b] += 1.0;
      counts[static_cast<std::size_t>(b) * levels + a] += 1.0;
    }
  }
  const double pairs = 2.0 * (x_end - x_begin) * static_cast<double>(y_end - y_begin);
  GlcmMatrix m;
  m.levels = levels;
  m.p.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) m.p[i] = counts[i] / pairs;
  return m;
}

GlcmFeatures glcm_features(const GlcmMatrix& m) {
  const int n = m.levels;
  if (n < 1 || m.p.size() != static_cast<std::size_t>(n) * n)
    throw InvalidArgument("glcm_features: matrix shape is inconsistent");
  double mass = 0.0;
  for (double v : m.p) {
    if (!(v >= 0.0)) throw InvalidArgument("glcm_features: negative probability");
    mass += v;
  }
  if (std::abs(mass - 1.0) > 1e-9)
    throw InvalidArgument("glcm_features: matrix is not normalized (mass " +
                          std::to_string(mass) + ")");

  GlcmFeatures f;
  double mean = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) mean += i * m.at(i, j);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double p = m.at(i, j);
      const double diff = i - j;
      f.energy += p * p;
      if (p > 0.0) f.entropy -= p * std::log(p);
      f.inverse_difference_moment += p / (1.0 + diff * diff);
      f.dissimilarity += p * std::abs(diff);
      f.contrast += p * diff * diff;
      f.variance += (i - mean) * (i - mean) * p;
    }
  }
  return f;
}

FeatureVector glcm_feature_vector(const GrayImage& img, const GlcmConfig& cfg) {
  FeatureVector out;
  out.method = FeatureMethod::Glcm;
  out.values.reserve(kGlcmDirections * kGlcmFeatureCount);
  for (const Offset& off : glcm_offsets(cfg.distance)) {
    const auto features = glcm_features(glcm_matrix(img, off, cfg)).as_array();
    out.values.insert(out.values.end(), features.begin(), features.end());
  }
  return out;
}

}  // namespace siftwood::texture
