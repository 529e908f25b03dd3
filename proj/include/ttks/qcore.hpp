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

#include "ttks/errors.hpp"

namespace ttks {

// Affine int8 quantization parameters: real = scale * (q - zero_point).
struct QuantParams {
  float scale = 1.0f;
  int32_t zero_point = 0;

  bool operator==(const QuantParams&) const = default;
};

// scale must be positive and finite, zero_point within int8 range.
bool is_valid(const QuantParams& qp);

// Fixed-point encoding of a requantization ratio M in (0, 1]:
//
//   M ~= multiplier / 2^31 / 2^right_shift
//
// with multiplier normalized into [2^30, 2^31) and right_shift >= 0. The
// normalized form keeps one integer multiply plus one rounding shift on the
// hot path and represents any M in (0, 1] with relative error <= 2^-24.
struct FixedMul {
  int32_t multiplier = 1 << 30;
  int32_t right_shift = 1;

  bool operator==(const FixedMul&) const = default;
};

bool is_valid(const FixedMul& fm);

// The real ratio a FixedMul encodes.
double fixed_mul_value(const FixedMul& fm);

// Quantizes a real value: clamp(round(x / scale) + zero_point, -128, 127).
// Rounding is half away from zero. Saturates instead of failing; NaN maps to
// the zero point.
int8_t quantize(double x, const QuantParams& qp);

// Exact inverse map of the quantized grid point: scale * (q - zero_point).
double dequantize(int8_t q, const QuantParams& qp);

// Derives the fixed-point form of M = in_scale * w_scale / out_scale.
// Throws UnsupportedRatioError when a scale is not positive/finite or when
// M falls outside (0, 1].
FixedMul derive_requant(double in_scale, double w_scale, double out_scale);

// Scales an int32 accumulator back to int8:
//
//   clamp(round_half_away_from_zero(acc * M) + out_zero_point, -128, 127)
//
// computed entirely in integer arithmetic (64-bit intermediate product).
int8_t requantize(int32_t acc, const FixedMul& fm, int32_t out_zero_point);

}  // namespace ttks
