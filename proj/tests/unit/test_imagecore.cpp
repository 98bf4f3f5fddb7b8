#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "siftwood/errors.hpp"
#include "siftwood/image.hpp"

using namespace siftwood;

namespace {

RgbImage solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  std::vector<std::uint8_t> px;
  for (int i = 0; i < w * h; ++i) px.insert(px.end(), {r, g, b});
  return RgbImage(w, h, std::move(px));
}

double mean(std::span<const float> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TEST_SUITE("imagecore") {

TEST_CASE("grayscale of white and black") {
  const GrayImage white = to_grayscale(solid(4, 3, 255, 255, 255));
  for (float v : white.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-7));
  const GrayImage black = to_grayscale(solid(4, 3, 0, 0, 0));
  for (float v : black.values()) CHECK(v == 0.0f);
}

TEST_CASE("grayscale of a single pixel follows the luma weights") {
  const GrayImage g = to_grayscale(solid(1, 1, 10, 20, 30));
  const double expected = 0.299 * 10 / 255 + 0.587 * 20 / 255 + 0.114 * 30 / 255;
  CHECK(g.at(0, 0) == doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("grayscale stays in range for every channel combination") {
  std::vector<std::uint8_t> px;
  for (int r = 0; r < 256; r += 51)
    for (int g = 0; g < 256; g += 51)
      for (int b = 0; b < 256; b += 51) px.insert(px.end(), {std::uint8_t(r), std::uint8_t(g), std::uint8_t(b)});
  const GrayImage img = to_grayscale(RgbImage(216, 1, px));
  for (float v : img.values()) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
}

TEST_CASE("resize to the same size is the identity") {
  const GrayImage src = fixtures::noise(13, 7, 1);
  const GrayImage out = resize_bilinear(src, 13, 7);
  CHECK(std::equal(src.values().begin(), src.values().end(), out.values().begin()));
}

TEST_CASE("resize of a constant image stays constant") {
  const GrayImage out = resize_bilinear(fixtures::constant(9, 5, 0.5f), 23, 2);
  for (float v : out.values()) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("resize 2x1 to 4x1 with pixel-centre alignment") {
  const GrayImage src(2, 1, {0.0f, 1.0f});
  const GrayImage out = resize_bilinear(src, 4, 1);
  // Output centres map to source x = (i + 0.5) / 2 - 0.5: -0.25, 0.25, 0.75, 1.25.
  // Clamped to [0, 1] they interpolate to 0, 0.25, 0.75, 1.
  CHECK(out.at(0, 0) == doctest::Approx(0.0));
  CHECK(out.at(1, 0) == doctest::Approx(0.25));
  CHECK(out.at(2, 0) == doctest::Approx(0.75));
  CHECK(out.at(3, 0) == doctest::Approx(1.0));
}

TEST_CASE("resize output stays within the input range") {
  const GrayImage src = fixtures::noise(17, 11, 2);
  const auto [lo, hi] = std::minmax_element(src.values().begin(), src.values().end());
  for (auto [w, h] : {std::pair{40, 3}, {5, 30}, {8, 8}}) {
    const GrayImage out = resize_bilinear(src, w, h);
    for (float v : out.values()) {
      CHECK(v >= *lo - 1e-6f);
      CHECK(v <= *hi + 1e-6f);
    }
  }
}

TEST_CASE("resize rejects a zero target") {
  const GrayImage src = fixtures::constant(4, 4, 0.2f);
  CHECK_THROWS_AS(resize_bilinear(src, 0, 4), InvalidArgument);
  CHECK_THROWS_AS(resize_bilinear(src, 4, 0), InvalidArgument);
}

TEST_CASE("blur of a constant image is exact") {
  const GrayImage out = gaussian_blur(fixtures::constant(20, 12, 0.3f), 2.5);
  for (float v : out.values()) CHECK(v == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("blurred impulse centre equals the squared central kernel weight") {
  std::vector<float> v(21 * 21, 0.0f);
  v[10 * 21 + 10] = 1.0f;
  const GrayImage out = gaussian_blur(GrayImage(21, 21, v), 1.0);
  const auto k = oracle::gaussian_1d(1.0);
  const double centre = k[k.size() / 2];
  CHECK(out.at(10, 10) == doctest::Approx(centre * centre).epsilon(1e-6));
}

TEST_CASE("separable blur matches dense 2-D convolution") {
  const GrayImage img = fixtures::noise(16, 16, 3);
  for (double sigma : {0.7, 1.0, 1.6, 3.0}) {
    const GrayImage out = gaussian_blur(img, sigma);
    const auto ref = oracle::dense_blur(img.plane(), sigma);
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i)
      worst = std::max(worst, std::abs(out.values()[i] - ref[i]));
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("blur keeps the global mean up to border effects") {
  const GrayImage img = fixtures::noise(64, 48, 4);
  const GrayImage out = gaussian_blur(img, 2.0);
  CHECK(std::abs(mean(out.values()) - mean(img.values())) < 1e-3);
}

TEST_CASE("blur composes as a semigroup on interior pixels") {
  const GrayImage img = fixtures::noise(64, 64, 5);
  const double a = 1.2, b = 1.6;
  const GrayImage twice = gaussian_blur(gaussian_blur(img, a), b);
  const GrayImage once = gaussian_blur(img, std::hypot(a, b));
  double worst = 0.0;
  for (int y = 16; y < 48; ++y)
    for (int x = 16; x < 48; ++x) worst = std::max(worst, double(std::abs(twice.at(x, y) - once.at(x, y))));
  CHECK(worst < 1e-3);
}

TEST_CASE("blur rejects non-positive sigma") {
  const GrayImage img = fixtures::constant(8, 8, 0.5f);
  CHECK_THROWS_AS(gaussian_blur(img, 0.0), InvalidArgument);
  CHECK_THROWS_AS(gaussian_blur(img, -1.0), InvalidArgument);
}

TEST_CASE("gray image rejects out-of-range values") {
  CHECK_THROWS_AS(GrayImage(1, 1, {1.5f}), InvalidArgument);
  CHECK_THROWS_AS(GrayImage(1, 1, {-0.1f}), InvalidArgument);
  CHECK_THROWS_AS(GrayImage(2, 2, {0.0f}), InvalidArgument);
  CHECK_THROWS_AS(RgbImage(2, 1, {1, 2, 3}), InvalidArgument);
}

TEST_CASE("PNG round trip of a gray image") {
  const GrayImage img = fixtures::noise(19, 7, 6);
  const GrayImage back = to_grayscale(decode_image(encode_png_gray(img)));
  REQUIRE(back.width() == 19);
  REQUIRE(back.height() == 7);
  for (std::size_t i = 0; i < img.values().size(); ++i)
    CHECK(back.values()[i] == doctest::Approx(std::round(img.values()[i] * 255.0) / 255.0).epsilon(1e-6));
}

TEST_CASE("decodes PNG and JPEG files") {
  const std::filesystem::path data = SIFTWOOD_TEST_DATA;
  const RgbImage png = read_image(data / "rgb_3x2.png");
  CHECK(png.width() == 3);
  CHECK(png.height() == 2);
  CHECK(png.data()[0] == 255);
  CHECK(png.data()[9] == 10);

  const RgbImage jpg = read_image(data / "solid_16x8.jpg");
  CHECK(jpg.width() == 16);
  CHECK(jpg.height() == 8);
  const GrayImage g = to_grayscale(jpg);
  const double expected = (0.299 * 200 + 0.587 * 100 + 0.114 * 50) / 255;
  CHECK(std::abs(g.at(5, 5) - expected) < 3.0 / 255);
}

TEST_CASE("rejects unknown and truncated image data") {
  const std::filesystem::path data = SIFTWOOD_TEST_DATA;
  CHECK_THROWS_AS(read_image(data / "not_an_image.txt"), FormatError);
  CHECK_THROWS_AS(read_image(data / "missing.png"), IoError);
  auto bytes = encode_png_gray(fixtures::constant(8, 8, 0.5f));
  bytes.resize(bytes.size() / 2);
  CHECK_THROWS_AS(decode_image(bytes), FormatError);
  CHECK(sniff_format(bytes) == ImageFormat::Png);
}

TEST_CASE("load_gray resizes only when asked") {
  fixtures::TempDir dir("load-gray");
  write_png_gray(dir.path() / "a.png", fixtures::constant(30, 20, 0.25f));
  CHECK(load_gray(dir.path() / "a.png").width() == 30);
  const GrayImage r = load_gray(dir.path() / "a.png", 60, 40);
  CHECK(r.width() == 60);
  CHECK(r.height() == 40);
}

}
