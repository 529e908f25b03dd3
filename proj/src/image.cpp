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

#include "ttks/image.hpp"

#include <algorithm>
#include <cmath>

namespace ttks {
namespace {

void check_image(const Image& img, const char* op) {
  if (img.width <= 0 || img.height <= 0) {
    throw DimensionError(std::string(op) + ": empty image");
  }
  if (img.pixels.size() != img.expected_bytes()) {
    throw DimensionError(std::string(op) + ": pixel buffer size mismatch");
  }
}

}  // namespace

Image make_image(int width, int height, ImageFormat format) {
  if (width <= 0 || height <= 0) throw DimensionError("make_image: empty image");
  Image img;
  img.width = width;
  img.height = height;
  img.format = format;
  img.pixels.assign(static_cast<size_t>(width) * height *
                        (format == ImageFormat::kRgb888 ? 3 : 1),
                    0);
  return img;
}

Image rgb_to_gray(const Image& img) {
  check_image(img, "rgb_to_gray");
  if (img.format != ImageFormat::kRgb888) {
    throw DimensionError("rgb_to_gray: input must be RGB888");
  }
  Image out = make_image(img.width, img.height, ImageFormat::kGray8);
  const size_t n = static_cast<size_t>(img.width) * img.height;
  for (size_t i = 0; i < n; ++i) {
    const uint32_t r = img.pixels[3 * i];
    const uint32_t g = img.pixels[3 * i + 1];
    const uint32_t b = img.pixels[3 * i + 2];
    // (299 R + 587 G + 114 B + 500) / 1000 == round-half-away of the BT.601
    // weighted sum, computed exactly.
    out.pixels[i] = static_cast<uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
  }
  return out;
}

Image center_crop(const Image& img, int side) {
  check_image(img, "center_crop");
  if (side <= 0 || side > img.width || side > img.height) {
    throw DimensionError("center_crop: side must be in [1, min(width, height)]");
  }
  const int x0 = (img.width - side) / 2;
  const int y0 = (img.height - side) / 2;
  const size_t ch = img.channels();
  Image out = make_image(side, side, img.format);
  for (int y = 0; y < side; ++y) {
    const uint8_t* src =
        img.pixels.data() + ((static_cast<size_t>(y0 + y) * img.width) + x0) * ch;
    std::copy_n(src, static_cast<size_t>(side) * ch,
                out.pixels.data() + static_cast<size_t>(y) * side * ch);
  }
  return out;
}

Image resize_bilinear(const Image& img, int out_width, int out_height) {
  check_image(img, "resize_bilinear");
  if (out_width <= 0 || out_height <= 0) {
    throw DimensionError("resize_bilinear: empty output");
  }
  const size_t ch = img.channels();
  Image out = make_image(out_width, out_height, img.format);
  const double sx = static_cast<double>(img.width) / out_width;
  const double sy = static_cast<double>(img.height) / out_height;
  const auto clampi = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };
  for (int oy = 0; oy < out_height; ++oy) {
    const double fy = (oy + 0.5) * sy - 0.5;
    const int y0f = static_cast<int>(std::floor(fy));
    const double ty = fy - y0f;
    const int y0 = clampi(y0f, img.height - 1);
    const int y1 = clampi(y0f + 1, img.height - 1);
    for (int ox = 0; ox < out_width; ++ox) {
      const double fx = (ox + 0.5) * sx - 0.5;
      const int x0f = static_cast<int>(std::floor(fx));
      const double tx = fx - x0f;
      const int x0 = clampi(x0f, img.width - 1);
      const int x1 = clampi(x0f + 1, img.width - 1);
      for (size_t c = 0; c < ch; ++c) {
        const auto at = [&](int y, int x) {
          return static_cast<double>(
              img.pixels[(static_cast<size_t>(y) * img.width + x) * ch + c]);
        };
        const double top = at(y0, x0) + (at(y0, x1) - at(y0, x0)) * tx;
        const double bot = at(y1, x0) + (at(y1, x1) - at(y1, x0)) * tx;
        const double v = top + (bot - top) * ty;
        long r = std::lround(v);  // half away from zero; v >= 0 here
        if (r < 0) r = 0;
        if (r > 255) r = 255;
        out.pixels[(static_cast<size_t>(oy) * out_width + ox) * ch + c] =
            static_cast<uint8_t>(r);
      }
    }
  }
  return out;
}

Tensor quantize_image(const Image& img, const QuantParams& qp) {
  check_image(img, "quantize_image");
  if (img.format != ImageFormat::kGray8) {
    throw DimensionError("quantize_image: input must be grayscale");
  }
  if (!is_valid(qp)) throw DimensionError("quantize_image: invalid qp");
  Tensor t = make_tensor(
      ElementKind::kInt8,
      {1, static_cast<uint32_t>(img.height), static_cast<uint32_t>(img.width), 1},
      qp);
  auto dst = t.i8();
  const size_t n = static_cast<size_t>(img.width) * img.height;
  for (size_t i = 0; i < n; ++i) {
    dst[i] = quantize(img.pixels[i] / 255.0, qp);
  }
  return t;
}

}  // namespace ttks
