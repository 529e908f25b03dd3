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
#include <utility>

#include "ttks/tensor.hpp"

namespace ttks {

// Convolution geometry plus the per-layer activation clamp. The clamp is the
// layer's activation function, applied after requantization; (-128, 127)
// means identity.
struct ConvSpec {
  int kernel_h = 1;
  int kernel_w = 1;
  int stride_h = 1;
  int stride_w = 1;
  int pad_top = 0;
  int pad_bottom = 0;
  int pad_left = 0;
  int pad_right = 0;
  int32_t clamp_min = -128;
  int32_t clamp_max = 127;

  bool operator==(const ConvSpec&) const = default;
};

// floor((in + pad_total - kernel) / stride) + 1 per axis. Throws
// DimensionError when a dimension comes out non-positive.
std::pair<int, int> conv_output_hw(int in_h, int in_w, const ConvSpec& spec);

// Standard int8 convolution, NHWC, per-tensor quantization:
//
//   acc  = sum((x_q - x_zp) * w_q) + bias
//   out  = clamp(requantize(acc, derive_requant(sx, sw, so), out_zp))
//
// weights are (out_ch, kh, kw, in_ch) with zero_point 0; bias is int32 with
// zero_point 0 and scale sx * sw, added directly to the accumulator.
// Out-of-bounds taps contribute nothing (implicit zero-point padding).
Tensor conv2d_s8(const Tensor& input, const Tensor& weights, const Tensor& bias,
                 const ConvSpec& spec, const QuantParams& out_qp);

// Depthwise variant with channel multiplier 1; weights are (1, kh, kw, ch).
Tensor depthwise_conv2d_s8(const Tensor& input, const Tensor& weights,
                           const Tensor& bias, const ConvSpec& spec,
                           const QuantParams& out_qp);

// Int8 affine layer: input (batch, in), weights (out, in), bias int32 (out).
Tensor fully_connected_s8(const Tensor& input, const Tensor& weights,
                          const Tensor& bias, const QuantParams& out_qp,
                          int32_t clamp_min = -128, int32_t clamp_max = 127);

// Full-precision affine layer for the regression head: real32 in and out,
// no clamp. Accumulates in double so the result is within float rounding of
// the exact sum.
Tensor fully_connected_real(const Tensor& input, const Tensor& weights,
                            const Tensor& bias);

// Naive reference convolution: direct nested loops, one tap at a time. Same
// contract as conv2d_s8, kept deliberately independent of it so the two can
// be checked against each other bit for bit.
Tensor conv2d_ref_int(const Tensor& input, const Tensor& weights,
                      const Tensor& bias, const ConvSpec& spec,
                      const QuantParams& out_qp);

namespace detail {

// Arena-friendly entry points working on raw activation storage. Shapes are
// (n, h, w, c); weights/bias tensors carry their own metadata.
void conv2d_s8_raw(const int8_t* in, int n, int ih, int iw, int ic,
                   const QuantParams& in_qp, const Tensor& weights,
                   const Tensor& bias, const ConvSpec& spec,
                   const QuantParams& out_qp, int8_t* out, int oh, int ow);

void depthwise_conv2d_s8_raw(const int8_t* in, int n, int ih, int iw, int c,
                             const QuantParams& in_qp, const Tensor& weights,
                             const Tensor& bias, const ConvSpec& spec,
                             const QuantParams& out_qp, int8_t* out, int oh,
                             int ow);

void fully_connected_s8_raw(const int8_t* in, int batch, int nin,
                            const QuantParams& in_qp, const Tensor& weights,
                            const Tensor& bias, const QuantParams& out_qp,
                            int32_t clamp_min, int32_t clamp_max, int8_t* out);

void fully_connected_real_raw(const float* in, int batch, int nin,
                              const Tensor& weights, const Tensor& bias,
                              float* out);

}  // namespace detail

}  // namespace ttks
