// Copyright 2026 The TTKS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include "doctest.h"
#include "support/builders.hpp"
#include "ttks/image.hpp"
#include "ttks/ppm.hpp"

using namespace ttks;

namespace {

Image one_pixel_rgb(uint8_t r, uint8_t g, uint8_t b) {
  Image img = make_image(1, 1, ImageFormat::kRgb888);
  img.pixels = {r, g, b};
  return img;
}

}  // namespace

TEST_SUITE("image") {

TEST_CASE("BT.601 luma frozen values") {
  CHECK(rgb_to_gray(one_pixel_rgb(255, 0, 0)).pixels[0] == 76);
  CHECK(rgb_to_gray(one_pixel_rgb(0, 255, 0)).pixels[0] == 150);
  CHECK(rgb_to_gray(one_pixel_rgb(0, 0, 255)).pixels[0] == 29);
  CHECK(rgb_to_gray(one_pixel_rgb(255, 255, 255)).pixels[0] == 255);
  CHECK(rgb_to_gray(one_pixel_rgb(0, 0, 0)).pixels[0] == 0);
  // 114 * 250 = 28500: exactly 28.5, which must round away to 29.
  CHECK(rgb_to_gray(one_pixel_rgb(0, 0, 250)).pixels[0] == 29);
  // Grayscale input is already luma; the converter refuses rather than
  // silently reinterpreting the buffer.
  CHECK_THROWS_AS(rgb_to_gray(make_image(2, 2, ImageFormat::kGray8)),
                  DimensionError);
}

TEST_CASE("BT.601 luma equals the real-valued rounding everywhere") {
  std::mt19937 rng(211);
  for (int i = 0; i < 5000; ++i) {
    const uint8_t r = static_cast<uint8_t>(rng() % 256u);
    const uint8_t g = static_cast<uint8_t>(rng() % 256u);
    const uint8_t b = static_cast<uint8_t>(rng() % 256u);
    // Rational coefficients: the weighted sum is an exact integer over 1000,
    // so the correctly-rounded division agrees with the integer formula even
    // at exact .5 boundaries (0.299 the double does not).
    const double real = (299.0 * r + 587.0 * g + 114.0 * b) / 1000.0;
    REQUIRE(rgb_to_gray(one_pixel_rgb(r, g, b)).pixels[0] ==
            static_cast<uint8_t>(std::llround(real)));
  }
}

TEST_CASE("center_crop uses floor offsets") {
  // 320x240 -> 240: the crop starts at x = 40, y = 0.
  Image img = make_image(320, 240, ImageFormat::kGray8);
  img.pixels[static_cast<size_t>(0) * 320 + 40] = 201;      // top-left corner
  img.pixels[static_cast<size_t>(239) * 320 + 279] = 202;   // bottom-right
  const Image crop = center_crop(img, 240);
  CHECK(crop.width == 240);
  CHECK(crop.height == 240);
  CHECK(crop.pixels[0] == 201);
  CHECK(crop.pixels[static_cast<size_t>(239) * 240 + 239] == 202);

  // Odd remainders floor: 5x4 -> 2 starts at (1, 1).
  Image odd = make_image(5, 4, ImageFormat::kGray8);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 5; ++x) {
      odd.pixels[static_cast<size_t>(y) * 5 + x] =
          static_cast<uint8_t>(10 * y + x);
    }
  }
  const Image c2 = center_crop(odd, 2);
  CHECK(c2.pixels[0] == 11);
  CHECK(c2.pixels[1] == 12);
  CHECK(c2.pixels[2] == 21);
  CHECK(c2.pixels[3] == 22);

  CHECK_THROWS_AS(center_crop(odd, 5), DimensionError);  // exceeds height
  CHECK_THROWS_AS(center_crop(odd, 0), DimensionError);
  // RGB crops carry all three channels.
  Image rgb = make_image(4, 4, ImageFormat::kRgb888);
  rgb.pixels[(4 + 1) * 3 + 2] = 99;  // pixel (1,1), blue channel
  CHECK(center_crop(rgb, 2).pixels[2] == 99);
}

TEST_CASE("resize_bilinear identity is exact") {
  std::mt19937 rng(223);
  const Image img = fixtures::random_frame(rng, 17, 9, ImageFormat::kGray8);
  CHECK(resize_bilinear(img, 17, 9) == img);
  const Image rgb = fixtures::random_frame(rng, 7, 5, ImageFormat::kRgb888);
  CHECK(resize_bilinear(rgb, 7, 5) == rgb);
}

TEST_CASE("resize_bilinear half-pixel centers and rounding") {
  // 4 -> 2 along one axis: dst x samples src at 2x + 0.5, the exact midpoint
  // of neighbours 2x and 2x+1, so outputs are half-away-rounded means.
  Image img = make_image(4, 1, ImageFormat::kGray8);
  img.pixels = {10, 11, 40, 60};
  const Image half = resize_bilinear(img, 2, 1);
  CHECK(half.pixels[0] == 11);  // (10 + 11) / 2 = 10.5 -> 11
  CHECK(half.pixels[1] == 50);  // (40 + 60) / 2 = 50

  // Upscale 2 -> 4: ends clamp to the edge pixels, interior interpolates at
  // quarter offsets: src = (dst + 0.5) / 2 - 0.5 = {-0.25, 0.25, 0.75, 1.25}.
  Image two = make_image(2, 1, ImageFormat::kGray8);
  two.pixels = {0, 100};
  const Image four = resize_bilinear(two, 4, 1);
  CHECK(four.pixels[0] == 0);    // clamped left
  CHECK(four.pixels[1] == 25);
  CHECK(four.pixels[2] == 75);
  CHECK(four.pixels[3] == 100);  // clamped right

  CHECK_THROWS_AS(resize_bilinear(two, 0, 1), DimensionError);
}

TEST_CASE("resize_bilinear matches a direct real-valued evaluation") {
  std::mt19937 rng(227);
  for (int trial = 0; trial < 20; ++trial) {
    const int iw = std::uniform_int_distribution<int>(1, 24)(rng);
    const int ih = std::uniform_int_distribution<int>(1, 24)(rng);
    const int ow = std::uniform_int_distribution<int>(1, 24)(rng);
    const int oh = std::uniform_int_distribution<int>(1, 24)(rng);
    const Image img = fixtures::random_frame(rng, iw, ih, ImageFormat::kGray8);
    const Image out = resize_bilinear(img, ow, oh);
    auto at = [&](int x, int y) {
      x = std::clamp(x, 0, iw - 1);
      y = std::clamp(y, 0, ih - 1);
      return static_cast<double>(img.pixels[static_cast<size_t>(y) * iw + x]);
    };
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        // The in/out ratio is computed once and reused, which is part of
        // the pinned output contract (multiply-then-divide differs in the
        // last ulp and can flip a half-weight tap).
        const double rx = static_cast<double>(iw) / ow;
        const double ry = static_cast<double>(ih) / oh;
        const double sx = (x + 0.5) * rx - 0.5;
        const double sy = (y + 0.5) * ry - 0.5;
        const int x0 = static_cast<int>(std::floor(sx));
        const int y0 = static_cast<int>(std::floor(sy));
        const double fx = sx - x0, fy = sy - y0;
        // Lerp association a + (b - a) * t is part of the output contract
        // (the weighted-4-tap form differs in the last ulp at half weights).
        const double top = at(x0, y0) + (at(x0 + 1, y0) - at(x0, y0)) * fx;
        const double bot =
            at(x0, y0 + 1) + (at(x0 + 1, y0 + 1) - at(x0, y0 + 1)) * fx;
        const double v = top + (bot - top) * fy;
        REQUIRE(out.pixels[static_cast<size_t>(y) * ow + x] ==
                static_cast<uint8_t>(std::llround(v)));
      }
    }
  }
}

TEST_CASE("quantize_image on the canonical pixel mapping is p - 128") {
  std::mt19937 rng(229);
  const Image img = fixtures::random_frame(rng, 8, 6, ImageFormat::kGray8);
  const QuantParams qp{1.0f / 255.0f, -128};
  const Tensor t = quantize_image(img, qp);
  REQUIRE(t.kind == ElementKind::kInt8);
  REQUIRE(t.dims == std::vector<uint32_t>{1, 6, 8, 1});
  REQUIRE(t.qp == qp);
  for (size_t i = 0; i < img.pixels.size(); ++i) {
    REQUIRE(t.i8()[i] == static_cast<int8_t>(static_cast<int>(img.pixels[i]) -
                                             128));
  }
  // RGB frames must be converted to luma first.
  CHECK_THROWS_AS(quantize_image(make_image(2, 2, ImageFormat::kRgb888), qp),
                  DimensionError);
}

TEST_CASE("ppm round-trips both formats") {
  std::mt19937 rng(233);
  const Image gray = fixtures::random_frame(rng, 13, 7, ImageFormat::kGray8);
  CHECK(parse_ppm(render_ppm(gray)) == gray);
  const Image rgb = fixtures::random_frame(rng, 5, 9, ImageFormat::kRgb888);
  CHECK(parse_ppm(render_ppm(rgb)) == rgb);

  const std::vector<uint8_t> p6 = render_ppm(rgb);
  REQUIRE(p6.size() >= 2);
  CHECK(p6[0] == 'P');
  CHECK(p6[1] == '6');
}

namespace {
Image parse_ppm_text(const std::string& text) {
  return parse_ppm(reinterpret_cast<const uint8_t*>(text.data()), text.size());
}
}  // namespace

TEST_CASE("ppm parser handles comments and rejects junk") {
  const Image img = parse_ppm_text(std::string("P5 #c\n2 2\n255\n") +
                                   std::string("\x01\x02\x03\x04", 4));
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.pixels == std::vector<uint8_t>{1, 2, 3, 4});

  CHECK_THROWS_AS(parse_ppm_text("P7 2 2 255 junk"), Error);
  CHECK_THROWS_AS(parse_ppm_text(std::string("P5 2 2 254 ") +
                                 std::string(4, '\0')),
                  Error);  // only maxval 255 is supported
  CHECK_THROWS_AS(parse_ppm_text("P5 2 2 255 ab"), Error);  // short samples
  CHECK_THROWS_AS(parse_ppm_text(""), Error);
  CHECK_THROWS_AS(read_ppm("/nonexistent/frame.ppm"), IoError);
}

}  // TEST_SUITE
