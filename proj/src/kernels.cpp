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

#include "ttks/kernels.hpp"

#include <algorithm>
#include <vector>

namespace ttks {
namespace {

inline int8_t clamp_i8(int32_t v, int32_t lo, int32_t hi) {
  if (v < lo) v = lo;
  if (v > hi) v = hi;
  return static_cast<int8_t>(v);
}

void check_quantized(const Tensor& t, const char* what) {
  if (t.kind != ElementKind::kInt8 || !t.qp || !is_valid(*t.qp)) {
    throw DimensionError(std::string(what) + ": expected int8 tensor with qp");
  }
}

void check_bias(const Tensor& bias, uint32_t channels) {
  if (bias.kind != ElementKind::kInt32 || bias.rank() != 1 ||
      bias.dims[0] != channels) {
    throw DimensionError("bias: expected rank-1 int32 tensor matching out channels");
  }
  if (!bias.qp || bias.qp->zero_point != 0) {
    throw DimensionError("bias: zero_point must be 0");
  }
}

struct ClampRange {
  int32_t lo;
  int32_t hi;
};

ClampRange effective_clamp(int32_t cmin, int32_t cmax) {
  if (cmin > cmax) throw DimensionError("activation clamp: min > max");
  return {std::max<int32_t>(cmin, -128), std::min<int32_t>(cmax, 127)};
}

}  // namespace

std::pair<int, int> conv_output_hw(int in_h, int in_w, const ConvSpec& spec) {
  if (spec.kernel_h < 1 || spec.kernel_w < 1 || spec.stride_h < 1 ||
      spec.stride_w < 1 || spec.pad_top < 0 || spec.pad_bottom < 0 ||
      spec.pad_left < 0 || spec.pad_right < 0) {
    throw DimensionError("conv spec: kernel/stride must be >= 1, pads >= 0");
  }
  const int eh = in_h + spec.pad_top + spec.pad_bottom - spec.kernel_h;
  const int ew = in_w + spec.pad_left + spec.pad_right - spec.kernel_w;
  if (eh < 0 || ew < 0) {
    throw DimensionError("conv spec: kernel exceeds padded input");
  }
  return {eh / spec.stride_h + 1, ew / spec.stride_w + 1};
}

namespace detail {

void conv2d_s8_raw(const int8_t* in, int n, int ih, int iw, int ic,
                   const QuantParams& in_qp, const Tensor& weights,
                   const Tensor& bias, const ConvSpec& spec,
                   const QuantParams& out_qp, int8_t* out, int oh, int ow) {
  const int kh = spec.kernel_h, kw = spec.kernel_w;
  const int oc_count = static_cast<int>(weights.dims[0]);
  const FixedMul fm =
      derive_requant(in_qp.scale, weights.qp->scale, out_qp.scale);
  const ClampRange clamp = effective_clamp(spec.clamp_min, spec.clamp_max);
  const int32_t in_zp = in_qp.zero_point;
  const int32_t out_zp = out_qp.zero_point;
  const int8_t* wgt = weights.i8().data();
  const int32_t* bs = bias.i32().data();
  const int taps = kh * kw * ic;

  // Sum of every weight per output channel; on interior positions the
  // zero-point correction collapses to -in_zp * wsum.
  std::vector<int32_t> wsum(static_cast<size_t>(oc_count), 0);
  for (int oc = 0; oc < oc_count; ++oc) {
    int32_t s = 0;
    const int8_t* w = wgt + static_cast<size_t>(oc) * taps;
    for (int t = 0; t < taps; ++t) s += w[t];
    wsum[oc] = s;
  }

  for (int b = 0; b < n; ++b) {
    for (int oy = 0; oy < oh; ++oy) {
      const int iy0 = oy * spec.stride_h - spec.pad_top;
      for (int ox = 0; ox < ow; ++ox) {
        const int ix0 = ox * spec.stride_w - spec.pad_left;
        const bool interior =
            iy0 >= 0 && ix0 >= 0 && iy0 + kh <= ih && ix0 + kw <= iw;
        int8_t* dst = out + ((static_cast<size_t>(b) * oh + oy) * ow + ox) *
                                oc_count;
        for (int oc = 0; oc < oc_count; ++oc) {
          const int8_t* w = wgt + static_cast<size_t>(oc) * taps;
          int32_t acc = bs[oc];
          if (interior) {
            int32_t dot = 0;
            for (int ky = 0; ky < kh; ++ky) {
              const int8_t* row =
                  in + ((static_cast<size_t>(b) * ih + (iy0 + ky)) * iw + ix0) *
                           ic;
              const int8_t* wrow = w + static_cast<size_t>(ky) * kw * ic;
              for (int t = 0; t < kw * ic; ++t) {
                dot += static_cast<int32_t>(row[t]) * wrow[t];
              }
            }
            acc += dot - in_zp * wsum[oc];
          } else {
            for (int ky = 0; ky < kh; ++ky) {
              const int y = iy0 + ky;
              if (y < 0 || y >= ih) continue;
              for (int kx = 0; kx < kw; ++kx) {
                const int x = ix0 + kx;
                if (x < 0 || x >= iw) continue;
                const int8_t* px =
                    in + ((static_cast<size_t>(b) * ih + y) * iw + x) * ic;
                const int8_t* wpx = w + (static_cast<size_t>(ky) * kw + kx) * ic;
                for (int c = 0; c < ic; ++c) {
                  acc += (static_cast<int32_t>(px[c]) - in_zp) * wpx[c];
                }
              }
            }
          }
          dst[oc] = clamp_i8(requantize(acc, fm, out_zp), clamp.lo, clamp.hi);
        }
      }
    }
  }
}

void depthwise_conv2d_s8_raw(const int8_t* in, int n, int ih, int iw, int c,
                             const QuantParams& in_qp, const Tensor& weights,
                             const Tensor& bias, const ConvSpec& spec,
                             const QuantParams& out_qp, int8_t* out, int oh,
                             int ow) {
  const int kh = spec.kernel_h, kw = spec.kernel_w;
  const FixedMul fm =
      derive_requant(in_qp.scale, weights.qp->scale, out_qp.scale);
  const ClampRange clamp = effective_clamp(spec.clamp_min, spec.clamp_max);
  const int32_t in_zp = in_qp.zero_point;
  const int32_t out_zp = out_qp.zero_point;
  const int8_t* wgt = weights.i8().data();  // (1, kh, kw, c)
  const int32_t* bs = bias.i32().data();

  std::vector<int32_t> wsum(static_cast<size_t>(c), 0);
  for (int ky = 0; ky < kh; ++ky) {
    for (int kx = 0; kx < kw; ++kx) {
      const int8_t* wpx = wgt + (static_cast<size_t>(ky) * kw + kx) * c;
      for (int ch = 0; ch < c; ++ch) wsum[ch] += wpx[ch];
    }
  }

  for (int b = 0; b < n; ++b) {
    for (int oy = 0; oy < oh; ++oy) {
      const int iy0 = oy * spec.stride_h - spec.pad_top;
      for (int ox = 0; ox < ow; ++ox) {
        const int ix0 = ox * spec.stride_w - spec.pad_left;
        const bool interior =
            iy0 >= 0 && ix0 >= 0 && iy0 + kh <= ih && ix0 + kw <= iw;
        int8_t* dst =
            out + ((static_cast<size_t>(b) * oh + oy) * ow + ox) * c;
        if (interior) {
          for (int ch = 0; ch < c; ++ch) {
            int32_t dot = 0;
            for (int ky = 0; ky < kh; ++ky) {
              const int8_t* row =
                  in + ((static_cast<size_t>(b) * ih + (iy0 + ky)) * iw + ix0) *
                           c +
                  ch;
              const int8_t* wrow = wgt + static_cast<size_t>(ky) * kw * c + ch;
              for (int kx = 0; kx < kw; ++kx) {
                dot += static_cast<int32_t>(row[static_cast<size_t>(kx) * c]) *
                       wrow[static_cast<size_t>(kx) * c];
              }
            }
            const int32_t acc = bs[ch] + dot - in_zp * wsum[ch];
            dst[ch] = clamp_i8(requantize(acc, fm, out_zp), clamp.lo, clamp.hi);
          }
        } else {
          for (int ch = 0; ch < c; ++ch) {
            int32_t acc = bs[ch];
            for (int ky = 0; ky < kh; ++ky) {
              const int y = iy0 + ky;
              if (y < 0 || y >= ih) continue;
              for (int kx = 0; kx < kw; ++kx) {
                const int x = ix0 + kx;
                if (x < 0 || x >= iw) continue;
                const int32_t xv =
                    in[((static_cast<size_t>(b) * ih + y) * iw + x) * c + ch];
                const int32_t wv =
                    wgt[(static_cast<size_t>(ky) * kw + kx) * c + ch];
                acc += (xv - in_zp) * wv;
              }
            }
            dst[ch] = clamp_i8(requantize(acc, fm, out_zp), clamp.lo, clamp.hi);
          }
        }
      }
    }
  }
}

void fully_connected_s8_raw(const int8_t* in, int batch, int nin,
                            const QuantParams& in_qp, const Tensor& weights,
                            const Tensor& bias, const QuantParams& out_qp,
                            int32_t clamp_min, int32_t clamp_max, int8_t* out) {
  const int nout = static_cast<int>(weights.dims[0]);
  const FixedMul fm =
      derive_requant(in_qp.scale, weights.qp->scale, out_qp.scale);
  const ClampRange clamp = effective_clamp(clamp_min, clamp_max);
  const int32_t in_zp = in_qp.zero_point;
  const int8_t* wgt = weights.i8().data();
  const int32_t* bs = bias.i32().data();
  for (int b = 0; b < batch; ++b) {
    const int8_t* x = in + static_cast<size_t>(b) * nin;
    for (int j = 0; j < nout; ++j) {
      const int8_t* w = wgt + static_cast<size_t>(j) * nin;
      int32_t dot = 0;
      int32_t wsum = 0;
      for (int i = 0; i < nin; ++i) {
        dot += static_cast<int32_t>(x[i]) * w[i];
        wsum += w[i];
      }
      const int32_t acc = bs[j] + dot - in_zp * wsum;
      out[static_cast<size_t>(b) * nout + j] =
          clamp_i8(requantize(acc, fm, out_qp.zero_point), clamp.lo, clamp.hi);
    }
  }
}

void fully_connected_real_raw(const float* in, int batch, int nin,
                              const Tensor& weights, const Tensor& bias,
                              float* out) {
  const int nout = static_cast<int>(weights.dims[0]);
  const float* wgt = weights.f32().data();
  const float* bs = bias.f32().data();
  for (int b = 0; b < batch; ++b) {
    const float* x = in + static_cast<size_t>(b) * nin;
    for (int j = 0; j < nout; ++j) {
      const float* w = wgt + static_cast<size_t>(j) * nin;
      double acc = bs[j];
      for (int i = 0; i < nin; ++i) {
        acc += static_cast<double>(w[i]) * static_cast<double>(x[i]);
      }
      out[static_cast<size_t>(b) * nout + j] = static_cast<float>(acc);
    }
  }
}

}  // namespace detail

namespace {

// Shared head-end validation for the conv-style kernels.
void check_conv_args(const Tensor& input, const Tensor& weights,
                     const Tensor& bias, const ConvSpec& spec,
                     const QuantParams& out_qp, bool depthwise,
                     const char* op) {
  check_quantized(input, op);
  check_quantized(weights, op);
  if (!is_valid(out_qp)) throw DimensionError(std::string(op) + ": invalid out qp");
  if (input.rank() != 4 || weights.rank() != 4) {
    throw DimensionError(std::string(op) + ": input and weights must be rank 4");
  }
  if (weights.qp->zero_point != 0) {
    throw DimensionError(std::string(op) + ": weight zero_point must be 0");
  }
  if (static_cast<int>(weights.dims[1]) != spec.kernel_h ||
      static_cast<int>(weights.dims[2]) != spec.kernel_w) {
    throw DimensionError(std::string(op) + ": weight dims disagree with spec kernel");
  }
  if (depthwise) {
    if (weights.dims[0] != 1 || weights.dims[3] != input.dims[3]) {
      throw DimensionError(std::string(op) +
                           ": depthwise weights must be (1, kh, kw, channels)");
    }
    check_bias(bias, input.dims[3]);
  } else {
    if (weights.dims[3] != input.dims[3]) {
      throw DimensionError(std::string(op) + ": channel mismatch");
    }
    check_bias(bias, weights.dims[0]);
  }
}

}  // namespace

Tensor conv2d_s8(const Tensor& input, const Tensor& weights, const Tensor& bias,
                 const ConvSpec& spec, const QuantParams& out_qp) {
  check_conv_args(input, weights, bias, spec, out_qp, false, "conv2d_s8");
  const auto [oh, ow] =
      conv_output_hw(static_cast<int>(input.dims[1]),
                     static_cast<int>(input.dims[2]), spec);
  Tensor out = make_tensor(ElementKind::kInt8,
                           {input.dims[0], static_cast<uint32_t>(oh),
                            static_cast<uint32_t>(ow), weights.dims[0]},
                           out_qp);
  detail::conv2d_s8_raw(input.i8().data(), static_cast<int>(input.dims[0]),
                        static_cast<int>(input.dims[1]),
                        static_cast<int>(input.dims[2]),
                        static_cast<int>(input.dims[3]), *input.qp, weights,
                        bias, spec, out_qp, out.i8().data(), oh, ow);
  return out;
}

Tensor depthwise_conv2d_s8(const Tensor& input, const Tensor& weights,
                           const Tensor& bias, const ConvSpec& spec,
                           const QuantParams& out_qp) {
  check_conv_args(input, weights, bias, spec, out_qp, true,
                  "depthwise_conv2d_s8");
  const auto [oh, ow] =
      conv_output_hw(static_cast<int>(input.dims[1]),
                     static_cast<int>(input.dims[2]), spec);
  Tensor out = make_tensor(ElementKind::kInt8,
                           {input.dims[0], static_cast<uint32_t>(oh),
                            static_cast<uint32_t>(ow), input.dims[3]},
                           out_qp);
  detail::depthwise_conv2d_s8_raw(
      input.i8().data(), static_cast<int>(input.dims[0]),
      static_cast<int>(input.dims[1]), static_cast<int>(input.dims[2]),
      static_cast<int>(input.dims[3]), *input.qp, weights, bias, spec, out_qp,
      out.i8().data(), oh, ow);
  return out;
}

Tensor fully_connected_s8(const Tensor& input, const Tensor& weights,
                          const Tensor& bias, const QuantParams& out_qp,
                          int32_t clamp_min, int32_t clamp_max) {
  check_quantized(input, "fully_connected_s8");
  check_quantized(weights, "fully_connected_s8");
  if (!is_valid(out_qp)) throw DimensionError("fully_connected_s8: invalid out qp");
  if (input.rank() != 2 || weights.rank() != 2 ||
      weights.dims[1] != input.dims[1]) {
    throw DimensionError(
        "fully_connected_s8: expected input (batch, in), weights (out, in)");
  }
  if (weights.qp->zero_point != 0) {
    throw DimensionError("fully_connected_s8: weight zero_point must be 0");
  }
  check_bias(bias, weights.dims[0]);
  Tensor out = make_tensor(ElementKind::kInt8, {input.dims[0], weights.dims[0]},
                           out_qp);
  detail::fully_connected_s8_raw(
      input.i8().data(), static_cast<int>(input.dims[0]),
      static_cast<int>(input.dims[1]), *input.qp, weights, bias, out_qp,
      clamp_min, clamp_max, out.i8().data());
  return out;
}

Tensor fully_connected_real(const Tensor& input, const Tensor& weights,
                            const Tensor& bias) {
  if (input.kind != ElementKind::kReal32 ||
      weights.kind != ElementKind::kReal32 ||
      bias.kind != ElementKind::kReal32) {
    throw DimensionError("fully_connected_real: expected real32 tensors");
  }
  if (input.rank() != 2 || weights.rank() != 2 ||
      weights.dims[1] != input.dims[1] || bias.rank() != 1 ||
      bias.dims[0] != weights.dims[0]) {
    throw DimensionError(
        "fully_connected_real: expected input (batch, in), weights (out, in), "
        "bias (out)");
  }
  Tensor out =
      make_tensor(ElementKind::kReal32, {input.dims[0], weights.dims[0]});
  detail::fully_connected_real_raw(
      input.f32().data(), static_cast<int>(input.dims[0]),
      static_cast<int>(input.dims[1]), weights, bias, out.f32().data());
  return out;
}

Tensor conv2d_ref_int(const Tensor& input, const Tensor& weights,
                      const Tensor& bias, const ConvSpec& spec,
                      const QuantParams& out_qp) {
  check_conv_args(input, weights, bias, spec, out_qp, false, "conv2d_ref_int");
  const int ih = static_cast<int>(input.dims[1]);
  const int iw = static_cast<int>(input.dims[2]);
  const int ic = static_cast<int>(input.dims[3]);
  const auto [oh, ow] = conv_output_hw(ih, iw, spec);
  const int oc_count = static_cast<int>(weights.dims[0]);
  Tensor out = make_tensor(ElementKind::kInt8,
                           {input.dims[0], static_cast<uint32_t>(oh),
                            static_cast<uint32_t>(ow), weights.dims[0]},
                           out_qp);
  const FixedMul fm =
      derive_requant(input.qp->scale, weights.qp->scale, out_qp.scale);
  const int32_t lo = std::max<int32_t>(spec.clamp_min, -128);
  const int32_t hi = std::min<int32_t>(spec.clamp_max, 127);
  if (spec.clamp_min > spec.clamp_max) {
    throw DimensionError("conv2d_ref_int: activation clamp: min > max");
  }
  auto x = input.i8();
  auto w = weights.i8();
  auto bvec = bias.i32();
  auto o = out.i8();
  for (uint32_t b = 0; b < input.dims[0]; ++b) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        for (int oc = 0; oc < oc_count; ++oc) {
          int32_t acc = bvec[oc];
          for (int ky = 0; ky < spec.kernel_h; ++ky) {
            for (int kx = 0; kx < spec.kernel_w; ++kx) {
              const int y = oy * spec.stride_h - spec.pad_top + ky;
              const int xx = ox * spec.stride_w - spec.pad_left + kx;
              if (y < 0 || y >= ih || xx < 0 || xx >= iw) continue;
              for (int c = 0; c < ic; ++c) {
                const int32_t xv =
                    x[((static_cast<size_t>(b) * ih + y) * iw + xx) * ic + c];
                const int32_t wv =
                    w[((static_cast<size_t>(oc) * spec.kernel_h + ky) *
                           spec.kernel_w +
                       kx) *
                          ic +
                      c];
                acc += (xv - input.qp->zero_point) * wv;
              }
            }
          }
          int32_t v = requantize(acc, fm, out_qp.zero_point);
          if (v < lo) v = lo;
          if (v > hi) v = hi;
          o[((static_cast<size_t>(b) * oh + oy) * ow + ox) * oc_count + oc] =
              static_cast<int8_t>(v);
        }
      }
    }
  }
  return out;
}

}  // namespace ttks
