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

#pragma once

#include <cstdint>
#include <vector>

#include "ttks/tensor.hpp"

namespace ttks {

enum class ImageFormat : uint8_t {
  kGray8 = 0,
  kRgb888 = 1,
};

// Row-major 8-bit image, interleaved channels for RGB.
struct Image {
  int width = 0;
  int height = 0;
  ImageFormat format = ImageFormat::kGray8;
  std::vector<uint8_t> pixels;

  size_t channels() const { return format == ImageFormat::kRgb888 ? 3 : 1; }
  size_t expected_bytes() const {
    return static_cast<size_t>(width) * height * channels();
  }

  bool operator==(const Image&) const = default;
};

Image make_image(int width, int height, ImageFormat format);

// BT.601 full-range luma: gray = round(0.299 R + 0.587 G + 0.114 B),
// rounding half away from zero, evaluated in integer arithmetic.
Image rgb_to_gray(const Image& img);

// Extracts the centered side x side square; offsets are
// floor((dim - side) / 2). Throws DimensionError when side is not positive
// or exceeds either image dimension.
Image center_crop(const Image& img, int side);

// Bilinear resize with half-pixel-center sampling:
// src = (dst + 0.5) * in/out - 0.5, edges clamped, result rounded half away
// from zero.
Image resize_bilinear(const Image& img, int out_width, int out_height);

// Quantizes a grayscale image (pixel p has real value p/255) into a
// 1 x H x W x 1 int8 tensor carrying `qp`.
Tensor quantize_image(const Image& img, const QuantParams& qp);

}  // namespace ttks
