#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "siftwood/errors.hpp"
#include "siftwood/texture.hpp"

using namespace siftwood;
using namespace siftwood::texture;

namespace {

// Noise on the 1/255 lattice, so remappings stay exact and distinct.
GrayImage lattice_noise(int w, int h, std::uint64_t seed) {
  const GrayImage n = fixtures::noise(w, h, seed);
  std::vector<float> v;
  for (float x : n.values()) v.push_back(std::round(x * 255.0f) / 255.0f);
  return GrayImage(w, h, std::move(v));
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_SUITE("texture") {

TEST_CASE("constant image puts all LBP mass on code 255") {
  const FeatureVector f = lbp_histogram(fixtures::constant(9, 7, 0.3f));
  CHECK(f.method == FeatureMethod::Lbp);
  REQUIRE(f.length() == 256);
  CHECK(f.values[255] == 1.0);
  CHECK(sum(f.values) == 1.0);
}

TEST_CASE("alternating neighbours give code 170") {
  const GrayImage img(3, 3, {1, 0, 1, 0, 0.5f, 0, 1, 0, 1});
  CHECK(lbp_code(img, 1, 1) == 170);
  CHECK(oracle::lbp_code(img, 1, 1) == 170);
  CHECK(lbp_histogram(img).values[170] == 1.0);
}

TEST_CASE("step edge histogram matches per-pixel oracle") {
  std::vector<float> v;
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 12; ++x) v.push_back(y < 5 ? 0.2f : 0.8f);
  const GrayImage img(12, 10, std::move(v));
  std::vector<double> expected(256, 0.0);
  for (int y = 1; y < 9; ++y)
    for (int x = 1; x < 11; ++x) expected[oracle::lbp_code(img, x, y)] += 1.0 / 80.0;
  const FeatureVector f = lbp_histogram(img);
  for (int i = 0; i < 256; ++i) CHECK(f.values[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("LBP codes match the oracle on noise") {
  const GrayImage img = fixtures::noise(20, 15, 3);
  for (int y = 1; y < 14; ++y)
    for (int x = 1; x < 19; ++x) CHECK(lbp_code(img, x, y) == oracle::lbp_code(img, x, y));
}

TEST_CASE("LBP histogram is invariant to strictly increasing remapping") {
  const GrayImage img = lattice_noise(32, 24, 5);
  std::vector<float> sq;
  for (float x : img.values()) sq.push_back(x * x);
  const GrayImage mapped(32, 24, std::move(sq));
  CHECK(lbp_histogram(img).values == lbp_histogram(mapped).values);
  CHECK(sum(lbp_histogram(img).values) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("LBP rejects images below 3x3") {
  CHECK_THROWS_AS(lbp_histogram(fixtures::constant(2, 5, 0.1f)), InvalidArgument);
  CHECK_THROWS_AS(lbp_histogram(fixtures::constant(5, 2, 0.1f)), InvalidArgument);
}

TEST_CASE("quantization covers [0, 1]") {
  CHECK(quantize(0.0f, 16) == 0);
  CHECK(quantize(0.5f, 16) == 8);
  CHECK(quantize(1.0f, 16) == 15);
  CHECK(quantize(0.49f, 2) == 0);
}

TEST_CASE("offsets follow 0, 45, 90, 135 degrees") {
  const auto o = glcm_offsets(2);
  CHECK((o[0].dx == 2 && o[0].dy == 0));
  CHECK((o[1].dx == 2 && o[1].dy == -2));
  CHECK((o[2].dx == 0 && o[2].dy == -2));
  CHECK((o[3].dx == -2 && o[3].dy == -2));
}

TEST_CASE("constant image co-occurrence is a single diagonal entry") {
  const GlcmMatrix m = glcm_matrix(fixtures::constant(6, 6, 0.5f), {1, 0});
  CHECK(m.levels == 16);
  CHECK(m.at(8, 8) == 1.0);
  const GlcmFeatures f = glcm_features(m);
  CHECK(f.energy == 1.0);
  CHECK(f.entropy == 0.0);
  CHECK(f.inverse_difference_moment == 1.0);
  CHECK(f.dissimilarity == 0.0);
  CHECK(f.contrast == 0.0);
}

TEST_CASE("2x2 example matrix and features") {
  const GrayImage img(2, 2, {0, 1, 0, 1});
  GlcmConfig cfg;
  cfg.gray_levels = 2;
  const GlcmMatrix m = glcm_matrix(img, {1, 0}, cfg);
  CHECK(m.at(0, 0) == 0.0);
  CHECK(m.at(0, 1) == 0.5);
  CHECK(m.at(1, 0) == 0.5);
  CHECK(m.at(1, 1) == 0.0);
  const GlcmFeatures f = glcm_features(m);
  CHECK(f.energy == doctest::Approx(0.5));
  CHECK(f.contrast == doctest::Approx(1.0));
  CHECK(f.dissimilarity == doctest::Approx(1.0));
  // Both off-diagonal cells contribute 0.5 / (1 + 1).
  CHECK(f.inverse_difference_moment == doctest::Approx(0.5));
  CHECK(f.entropy == doctest::Approx(std::log(2.0)));
  CHECK(f.variance == doctest::Approx(0.25));
}

TEST_CASE("uniform matrix entropy is 2 ln L") {
  for (int L : {2, 4, 16}) {
    GlcmMatrix m;
    m.levels = L;
    m.p.assign(static_cast<std::size_t>(L) * L, 1.0 / (L * L));
    CHECK(glcm_features(m).entropy == doctest::Approx(2.0 * std::log(L)).epsilon(1e-12));
  }
}

TEST_CASE("co-occurrence matrices match the pair-counting oracle") {
  const GrayImage img = fixtures::noise(13, 11, 8);
  GlcmConfig cfg;
  cfg.gray_levels = 8;
  for (int d : {1, 2, 3}) {
    cfg.distance = d;
    for (const Offset& o : glcm_offsets(d)) {
      const GlcmMatrix m = glcm_matrix(img, o, cfg);
      const std::vector<double> ref = oracle::glcm(img, o.dx, o.dy, 8);
      REQUIRE(m.p.size() == ref.size());
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(m.p[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("matrices are symmetric with unit mass") {
  const GrayImage img = fixtures::noise(16, 16, 2);
  for (const Offset& o : glcm_offsets(1)) {
    const GlcmMatrix m = glcm_matrix(img, o);
    CHECK(sum(m.p) == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < m.levels; ++i)
      for (int j = 0; j < m.levels; ++j) {
        CHECK(m.at(i, j) >= 0.0);
        CHECK(m.at(i, j) == m.at(j, i));
      }
  }
}

TEST_CASE("0 and 180 degree matrices coincide") {
  const GrayImage img = fixtures::noise(10, 9, 4);
  CHECK(glcm_matrix(img, {1, 0}).p == glcm_matrix(img, {-1, 0}).p);
  CHECK(glcm_matrix(img, {1, -1}).p == glcm_matrix(img, {-1, 1}).p);
}

TEST_CASE("contrast is zero exactly when mass is diagonal") {
  CHECK(glcm_features(glcm_matrix(fixtures::constant(5, 5, 0.9f), {1, 0})).contrast == 0.0);
  CHECK(glcm_features(glcm_matrix(fixtures::binary_columns(8, 8, 4, 0.1f, 0.9f), {0, -1})).contrast == 0.0);
  CHECK(glcm_features(glcm_matrix(fixtures::binary_columns(8, 8, 4, 0.1f, 0.9f), {1, 0})).contrast > 0.0);
}

TEST_CASE("feature vector has 24 entries, constant image repeats the trivial pattern") {
  const FeatureVector f = glcm_feature_vector(fixtures::constant(8, 8, 0.2f));
  CHECK(f.method == FeatureMethod::Glcm);
  REQUIRE(f.length() == 24);
  for (int d = 0; d < 4; ++d) {
    CHECK(f.values[d * 6 + 0] == 1.0);
    CHECK(f.values[d * 6 + 1] == 0.0);
    CHECK(f.values[d * 6 + 2] == 1.0);
    CHECK(f.values[d * 6 + 3] == 0.0);
    CHECK(f.values[d * 6 + 4] == 0.0);
  }
  CHECK(glcm_feature_vector(fixtures::noise(30, 20, 1)).length() == 24);
}

TEST_CASE("90 degree rotation permutes the direction blocks") {
  const GrayImage img = fixtures::noise(8, 8, 12);
  const FeatureVector a = glcm_feature_vector(img);
  const FeatureVector b = glcm_feature_vector(fixtures::rotate90(img));
  // 0 <-> 90 and 45 <-> 135.
  const int perm[4] = {2, 3, 0, 1};
  for (int d = 0; d < 4; ++d)
    for (int k = 0; k < 6; ++k)
      CHECK(b.values[d * 6 + k] == doctest::Approx(a.values[perm[d] * 6 + k]).epsilon(1e-12));
}

TEST_CASE("GLCM errors") {
  GlcmConfig cfg;
  cfg.gray_levels = 1;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.distance = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  CHECK_THROWS_AS(glcm_matrix(fixtures::constant(2, 2, 0.f), {2, 0}), InvalidArgument);
  GlcmMatrix bad;
  bad.levels = 2;
  bad.p = {0.5, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(glcm_features(bad), InvalidArgument);
  bad.p = {1.5, -0.5, 0.0, 0.0};
  CHECK_THROWS_AS(glcm_features(bad), InvalidArgument);
  bad.p = {1.0};
  CHECK_THROWS_AS(glcm_features(bad), InvalidArgument);
}

TEST_CASE("extractors are deterministic") {
  const GrayImage img = fixtures::scene(64, 48, 3);
  CHECK(lbp_histogram(img).values == lbp_histogram(img).values);
  CHECK(glcm_feature_vector(img).values == glcm_feature_vector(img).values);
}

}
