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

#include "ttks/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <random>

#include "ttks/errors.hpp"
#include "ttks/execute.hpp"
#include "ttks/kernels.hpp"
#include "ttks/qcore.hpp"

namespace ttks {
namespace {

// All randomness in the builder flows through this so that a seed fully pins
// the model down, independent of the standard library's distributions.
struct Rng {
  std::mt19937 gen;

  explicit Rng(uint32_t seed) : gen(seed) {}

  int8_t i8() { return static_cast<int8_t>(static_cast<int>(gen() % 255u) - 127); }

  int32_t ranged(int64_t bound) {  // uniform over [-bound, bound]
    const uint64_t span = 2 * static_cast<uint64_t>(bound) + 1;
    return static_cast<int32_t>(static_cast<int64_t>(gen() % span) - bound);
  }

  double unit() { return (gen() >> 8) * (1.0 / 16777216.0); }  // [0, 1)

  double symmetric(double a) { return (unit() * 2.0 - 1.0) * a; }
};

constexpr float kWeightScale = 0.0078125f;  // 2^-7, shared by every layer

// Taps feeding one output value; sizes the bias draw and the headroom check.
int64_t layer_taps(const detail::ArchLayer& a, int in_c) {
  switch (a.kind) {
    case LayerKind::kConv2d:
      return static_cast<int64_t>(a.kernel) * a.kernel * in_c;
    case LayerKind::kDwConv2d:
      return static_cast<int64_t>(a.kernel) * a.kernel;
    case LayerKind::kFcS8:
      return in_c;
    default:
      return 0;
  }
}

// Raw int32 accumulators of a conv / depthwise layer over one activation,
// bias included, padding contributing nothing. Mirrors the kernel arithmetic
// exactly (integer math has a single possible answer).
std::vector<int32_t> conv_accs(const std::vector<int8_t>& in, int ih, int iw,
                               int ic, int in_zp, const Tensor& w,
                               const Tensor& b, const ConvSpec& spec, int oh,
                               int ow, bool depthwise) {
  const int oc = depthwise ? ic : static_cast<int>(w.dims[0]);
  std::vector<int32_t> accs(static_cast<size_t>(oh) * ow * oc);
  const auto wq = w.i8();
  const auto bq = b.i32();
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      for (int co = 0; co < oc; ++co) {
        int32_t acc = bq[co];
        for (int ky = 0; ky < spec.kernel_h; ++ky) {
          const int y = oy * spec.stride_h - spec.pad_top + ky;
          if (y < 0 || y >= ih) continue;
          for (int kx = 0; kx < spec.kernel_w; ++kx) {
            const int x = ox * spec.stride_w - spec.pad_left + kx;
            if (x < 0 || x >= iw) continue;
            if (depthwise) {
              const int8_t xv = in[(static_cast<size_t>(y) * iw + x) * ic + co];
              const int8_t wv = wq[(static_cast<size_t>(ky) * spec.kernel_w + kx) * ic + co];
              acc += (static_cast<int32_t>(xv) - in_zp) * wv;
            } else {
              for (int ci = 0; ci < ic; ++ci) {
                const int8_t xv = in[(static_cast<size_t>(y) * iw + x) * ic + ci];
                const int8_t wv = wq[((static_cast<size_t>(co) * spec.kernel_h + ky) * spec.kernel_w + kx) * ic + ci];
                acc += (static_cast<int32_t>(xv) - in_zp) * wv;
              }
            }
          }
        }
        accs[(static_cast<size_t>(oy) * ow + ox) * oc + co] = acc;
      }
    }
  }
  return accs;
}

std::vector<int32_t> fc_accs(const std::vector<int8_t>& in, int nin, int in_zp,
                             const Tensor& w, const Tensor& b) {
  const int nout = static_cast<int>(w.dims[0]);
  std::vector<int32_t> accs(nout);
  const auto wq = w.i8();
  const auto bq = b.i32();
  for (int j = 0; j < nout; ++j) {
    int32_t acc = bq[j];
    for (int i = 0; i < nin; ++i) {
      acc += (static_cast<int32_t>(in[i]) - in_zp) * wq[static_cast<size_t>(j) * nin + i];
    }
    accs[j] = acc;
  }
  return accs;
}

// Shape/quant-only tensor (no payload).
Tensor spec_tensor(ElementKind kind, std::vector<uint32_t> dims,
                   std::optional<QuantParams> qp) {
  Tensor t;
  t.kind = kind;
  t.dims = std::move(dims);
  t.qp = std::move(qp);
  return t;
}

ConvSpec same_pad_spec(const detail::ArchLayer& a, int ih, int iw) {
  ConvSpec spec;
  spec.kernel_h = spec.kernel_w = a.kernel;
  spec.stride_h = spec.stride_w = a.stride;
  const auto total = [&](int in) {
    const int out = (in + a.stride - 1) / a.stride;
    return std::max(0, (out - 1) * a.stride + a.kernel - in);
  };
  const int th = total(ih);
  const int tw = total(iw);
  spec.pad_top = th / 2;
  spec.pad_bottom = th - th / 2;
  spec.pad_left = tw / 2;
  spec.pad_right = tw - tw / 2;
  return spec;
}

// Affine range covering [lo, hi] (forced to include zero) with 256 steps and
// a floor on the span so requantization ratios never exceed one.
QuantParams range_to_qp(double lo, double hi, double min_range) {
  lo = std::min(lo, 0.0);
  hi = std::max(hi, 0.0);
  if (hi - lo < min_range) hi = lo + min_range;
  const double scale = (hi - lo) / 255.0;
  const long zp = std::lround(-128.0 - lo / scale);
  return QuantParams{static_cast<float>(scale),
                     static_cast<int32_t>(std::clamp(zp, -128l, 127l))};
}

}  // namespace

PipelineConfig make_pipeline_config(const Model& m, int capture_width,
                                    int capture_height, int crop_side) {
  if (capture_width < 1 || capture_height < 1) {
    throw DimensionError("capture dimensions must be positive");
  }
  const Tensor& in_spec = m.tensors.at(m.input_spec);
  if (in_spec.rank() != 4 || in_spec.dims[1] != in_spec.dims[2]) {
    throw DimensionError("model input must be a square rank-4 tensor");
  }
  PipelineConfig cfg;
  cfg.capture_width = capture_width;
  cfg.capture_height = capture_height;
  cfg.crop_side =
      crop_side > 0 ? crop_side : std::min(capture_width, capture_height);
  if (cfg.crop_side > capture_width || cfg.crop_side > capture_height) {
    throw DimensionError("crop side exceeds the capture frame");
  }
  cfg.input_side = static_cast<int>(in_spec.dims[1]);
  if (in_spec.qp) cfg.input_qp = *in_spec.qp;
  cfg.grid_rect = Rect{(capture_width - cfg.crop_side) / 2,
                       (capture_height - cfg.crop_side) / 2, cfg.crop_side,
                       cfg.crop_side};
  return cfg;
}

Tensor make_grid_embedding(const PipelineConfig& cfg) {
  const int side = cfg.input_side;
  Tensor t = make_tensor(ElementKind::kInt8,
                         {1, static_cast<uint32_t>(side),
                          static_cast<uint32_t>(side), 1},
                         cfg.input_qp);
  const int8_t on = quantize(1.0, cfg.input_qp);
  const int8_t off = quantize(0.0, cfg.input_qp);
  auto out = t.i8();
  const Rect& r = cfg.grid_rect;
  for (int gy = 0; gy < side; ++gy) {
    const double cy = (gy + 0.5) * cfg.capture_height / side;
    const bool row_in = cy >= r.y && cy < r.y + r.h;
    for (int gx = 0; gx < side; ++gx) {
      const double cx = (gx + 0.5) * cfg.capture_width / side;
      const bool in = row_in && cx >= r.x && cx < r.x + r.w;
      out[static_cast<size_t>(gy) * side + gx] = in ? on : off;
    }
  }
  return t;
}

Tensor preprocess(const Image& frame, const PipelineConfig& cfg,
                  const Tensor* grid_plane) {
  if (frame.width != cfg.capture_width || frame.height != cfg.capture_height) {
    throw DimensionError("frame does not match the configured capture size");
  }
  const Image gray =
      frame.format == ImageFormat::kRgb888 ? rgb_to_gray(frame) : frame;
  const Image crop = center_crop(gray, cfg.crop_side);
  const Image small = resize_bilinear(crop, cfg.input_side, cfg.input_side);
  Tensor luma = quantize_image(small, cfg.input_qp);
  if (!grid_plane) return luma;

  if (grid_plane->dims != luma.dims || grid_plane->kind != ElementKind::kInt8) {
    throw DimensionError("grid plane does not match the network input");
  }
  Tensor fused = make_tensor(ElementKind::kInt8,
                             {1, luma.dims[1], luma.dims[2], 2}, cfg.input_qp);
  const auto l = luma.i8();
  const auto g = grid_plane->i8();
  auto o = fused.i8();
  for (size_t p = 0; p < l.size(); ++p) {
    o[2 * p] = l[p];
    o[2 * p + 1] = g[p];
  }
  return fused;
}

GazeEstimate postprocess(const Tensor& raw) {
  if (raw.kind != ElementKind::kReal32 || raw.numel() < 2) {
    throw InvalidOutputError("network output must hold two real values");
  }
  const auto v = raw.f32();
  if (!std::isfinite(v[0]) || !std::isfinite(v[1])) {
    throw InvalidOutputError("network produced a non-finite estimate");
  }
  GazeEstimate est;
  est.raw_x = v[0];
  est.raw_y = v[1];
  est.x_cm = std::clamp(v[0], -1.0f, 1.0f) * 10.0f;
  est.y_cm = std::clamp(v[1], -1.0f, 1.0f) * 10.0f;
  return est;
}

namespace detail {

Model build_chain_model(const std::vector<ArchLayer>& arch, uint32_t seed,
                        int capture_width, int capture_height, int crop_side) {
  if (arch.empty() || arch.back().kind != LayerKind::kFcReal) {
    throw Error("model recipe must end with the full-precision layer");
  }
  const bool in_graph_grid = arch.front().kind == LayerKind::kConcatGrid;
  const int in_c = in_graph_grid ? 1 : 2;

  PipelineConfig cfg;
  cfg.capture_width = capture_width;
  cfg.capture_height = capture_height;
  cfg.crop_side =
      crop_side > 0 ? crop_side : std::min(capture_width, capture_height);
  cfg.input_side = kInputSide;
  cfg.grid_rect = Rect{(capture_width - cfg.crop_side) / 2,
                       (capture_height - cfg.crop_side) / 2, cfg.crop_side,
                       cfg.crop_side};

  Rng rng(seed);
  const QuantParams wqp{kWeightScale, 0};

  Model m;
  m.version = kModelFormatVersion;
  m.tensors.push_back(spec_tensor(
      ElementKind::kInt8,
      {1, static_cast<uint32_t>(kInputSide), static_cast<uint32_t>(kInputSide),
       static_cast<uint32_t>(in_c)},
      cfg.input_qp));
  m.input_spec = 0;
  m.tensors.push_back(make_grid_embedding(cfg));
  m.grid_plane = 1;

  // Pass 1: walk the shapes, draw every quantized weight, then every bias, so
  // the stream of draws only depends on the recipe.
  struct Staged {
    ConvSpec spec;
    std::vector<uint32_t> out_dims;
    Tensor weights;  // quantized kinds only
    Tensor bias;
    int64_t taps = 0;
  };
  std::vector<Staged> staged(arch.size());
  {
    int h = kInputSide, w = kInputSide, c = in_c;
    uint32_t flat = 0;
    for (size_t i = 0; i < arch.size(); ++i) {
      const ArchLayer& a = arch[i];
      Staged& s = staged[i];
      s.taps = layer_taps(a, c);
      switch (a.kind) {
        case LayerKind::kConcatGrid: {
          if (i != 0) throw Error("grid concat must be the first layer");
          c += 1;
          s.out_dims = {1, static_cast<uint32_t>(h), static_cast<uint32_t>(w),
                        static_cast<uint32_t>(c)};
          break;
        }
        case LayerKind::kConv2d:
        case LayerKind::kDwConv2d: {
          const bool dw = a.kind == LayerKind::kDwConv2d;
          s.spec = same_pad_spec(a, h, w);
          const auto [oh, ow] = conv_output_hw(h, w, s.spec);
          const int oc = dw ? c : a.out_channels;
          s.weights = make_tensor(
              ElementKind::kInt8,
              {static_cast<uint32_t>(dw ? 1 : oc),
               static_cast<uint32_t>(a.kernel), static_cast<uint32_t>(a.kernel),
               static_cast<uint32_t>(c)},
              wqp);
          for (int8_t& v : s.weights.i8()) v = rng.i8();
          h = oh;
          w = ow;
          c = oc;
          s.out_dims = {1, static_cast<uint32_t>(h), static_cast<uint32_t>(w),
                        static_cast<uint32_t>(c)};
          break;
        }
        case LayerKind::kFlatten: {
          flat = static_cast<uint32_t>(h) * w * c;
          s.out_dims = {1, flat};
          break;
        }
        case LayerKind::kFcS8: {
          if (flat == 0) throw Error("dense layer needs a flattened input");
          s.taps = flat;
          s.weights = make_tensor(ElementKind::kInt8,
                                  {static_cast<uint32_t>(a.out_channels), flat},
                                  wqp);
          for (int8_t& v : s.weights.i8()) v = rng.i8();
          flat = static_cast<uint32_t>(a.out_channels);
          s.out_dims = {1, flat};
          break;
        }
        case LayerKind::kFcReal: {
          if (flat == 0) throw Error("dense layer needs a flattened input");
          s.taps = flat;
          s.out_dims = {1, static_cast<uint32_t>(a.out_channels)};
          break;
        }
      }
    }
    // Bias draws, scaled with the tap count so they sit near a quarter of the
    // accumulator's typical magnitude.
    for (size_t i = 0; i < arch.size(); ++i) {
      const ArchLayer& a = arch[i];
      if (a.kind != LayerKind::kConv2d && a.kind != LayerKind::kDwConv2d &&
          a.kind != LayerKind::kFcS8) {
        continue;
      }
      const int nout = static_cast<int>(staged[i].out_dims.back());
      const int64_t bound = std::llround(
          0.25 * std::sqrt(static_cast<double>(staged[i].taps)) * 5417.0);
      Tensor bias = make_tensor(ElementKind::kInt32,
                                {static_cast<uint32_t>(nout)},
                                QuantParams{1.0f, 0});
      for (int32_t& v : bias.i32()) v = rng.ranged(bound);
      staged[i].bias = std::move(bias);
    }
  }

  // Two synthetic capture frames push data through the pipeline so every
  // activation range is observed rather than guessed.
  std::vector<std::vector<int8_t>> acts(2);
  {
    const Tensor& plane = m.tensors[1];
    for (int f = 0; f < 2; ++f) {
      Image frame = make_image(capture_width, capture_height, ImageFormat::kGray8);
      for (uint8_t& p : frame.pixels) p = static_cast<uint8_t>(rng.gen() % 256u);
      Tensor x = preprocess(frame, cfg, in_graph_grid ? nullptr : &plane);
      acts[f].assign(x.i8().begin(), x.i8().end());
    }
  }

  // Pass 2: calibrate layer by layer, emitting tensors and layer records.
  std::vector<uint32_t> cur_dims = m.tensors[0].dims;
  QuantParams cur_qp = cfg.input_qp;
  for (size_t i = 0; i < arch.size(); ++i) {
    const ArchLayer& a = arch[i];
    Staged& s = staged[i];
    LayerDef layer;
    layer.kind = a.kind;
    layer.spec = s.spec;

    switch (a.kind) {
      case LayerKind::kConcatGrid: {
        const auto plane = m.tensors[1].i8();
        for (auto& act : acts) {
          std::vector<int8_t> next(act.size() * 2);
          for (size_t p = 0; p < act.size(); ++p) {
            next[2 * p] = act[p];
            next[2 * p + 1] = plane[p];
          }
          act = std::move(next);
        }
        layer.weight = 1;
        m.tensors.push_back(
            spec_tensor(ElementKind::kInt8, s.out_dims, cur_qp));
        layer.out_spec = static_cast<uint32_t>(m.tensors.size() - 1);
        break;
      }
      case LayerKind::kFlatten: {
        m.tensors.push_back(
            spec_tensor(ElementKind::kInt8, s.out_dims, cur_qp));
        layer.out_spec = static_cast<uint32_t>(m.tensors.size() - 1);
        break;
      }
      case LayerKind::kConv2d:
      case LayerKind::kDwConv2d:
      case LayerKind::kFcS8: {
        const bool fc = a.kind == LayerKind::kFcS8;
        const bool dw = a.kind == LayerKind::kDwConv2d;
        const double in_scale = static_cast<double>(cur_qp.scale);
        const double acc_scale = in_scale * kWeightScale;
        s.bias.qp = QuantParams{static_cast<float>(acc_scale), 0};

        std::vector<std::vector<int32_t>> frame_accs(2);
        double lo = 0.0, hi = 0.0;
        for (int f = 0; f < 2; ++f) {
          frame_accs[f] =
              fc ? fc_accs(acts[f], static_cast<int>(cur_dims[1]),
                           cur_qp.zero_point, s.weights, s.bias)
                 : conv_accs(acts[f], static_cast<int>(cur_dims[1]),
                             static_cast<int>(cur_dims[2]),
                             static_cast<int>(cur_dims[3]), cur_qp.zero_point,
                             s.weights, s.bias, s.spec,
                             static_cast<int>(s.out_dims[1]),
                             fc ? 1 : static_cast<int>(s.out_dims[2]), dw);
          for (int32_t acc : frame_accs[f]) {
            const double v = acc * acc_scale;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
        }
        const QuantParams out_qp = range_to_qp(lo, hi, 255.0 * acc_scale);
        const FixedMul fm = derive_requant(in_scale, kWeightScale,
                                           static_cast<double>(out_qp.scale));
        for (int f = 0; f < 2; ++f) {
          std::vector<int8_t> next(frame_accs[f].size());
          for (size_t k = 0; k < next.size(); ++k) {
            const int8_t q = requantize(frame_accs[f][k], fm, out_qp.zero_point);
            next[k] = static_cast<int8_t>(std::clamp<int32_t>(
                q, layer.spec.clamp_min, layer.spec.clamp_max));
          }
          acts[f] = std::move(next);
        }

        m.tensors.push_back(std::move(s.weights));
        layer.weight = static_cast<uint32_t>(m.tensors.size() - 1);
        m.tensors.push_back(std::move(s.bias));
        layer.bias = static_cast<uint32_t>(m.tensors.size() - 1);
        m.tensors.push_back(spec_tensor(ElementKind::kInt8, s.out_dims, out_qp));
        layer.out_spec = static_cast<uint32_t>(m.tensors.size() - 1);
        break;
      }
      case LayerKind::kFcReal: {
        const int nin = static_cast<int>(cur_dims[1]);
        const int nout = a.out_channels;
        // Scale the uniform draw so the dot product lands near unit variance
        // against the observed input RMS.
        double sq = 0.0;
        for (const auto& act : acts) {
          for (int8_t q : act) {
            const double x = dequantize(q, cur_qp);
            sq += x * x;
          }
        }
        double x_rms = std::sqrt(sq / (2.0 * nin));
        if (!(x_rms > 0.0)) x_rms = 1.0;
        const double amp = 1.0 / (x_rms * std::sqrt(nin / 3.0));

        Tensor w = make_tensor(ElementKind::kReal32,
                               {static_cast<uint32_t>(nout),
                                static_cast<uint32_t>(nin)},
                               std::nullopt);
        for (float& v : w.f32()) v = static_cast<float>(rng.symmetric(amp));
        Tensor b = make_tensor(ElementKind::kReal32,
                               {static_cast<uint32_t>(nout)}, std::nullopt);
        for (float& v : b.f32()) v = static_cast<float>(rng.symmetric(0.25));

        m.tensors.push_back(std::move(w));
        layer.weight = static_cast<uint32_t>(m.tensors.size() - 1);
        m.tensors.push_back(std::move(b));
        layer.bias = static_cast<uint32_t>(m.tensors.size() - 1);
        m.tensors.push_back(
            spec_tensor(ElementKind::kReal32, s.out_dims, std::nullopt));
        layer.out_spec = static_cast<uint32_t>(m.tensors.size() - 1);
        break;
      }
    }

    cur_dims = s.out_dims;
    const auto& out_qp = m.tensors[layer.out_spec].qp;
    if (out_qp) cur_qp = *out_qp;
    m.layers.push_back(layer);
  }

  const ValidationReport report = validate(m);
  if (!report.ok()) {
    throw Error("builder produced an invalid model:\n" + report.to_string());
  }
  return m;
}

}  // namespace detail

Model build_reference_model(uint32_t seed, int capture_width,
                            int capture_height, int crop_side) {
  using detail::ArchLayer;
  const std::vector<ArchLayer> arch = {
      {LayerKind::kConv2d, 16, 3, 2},   {LayerKind::kDwConv2d, 0, 3, 1},
      {LayerKind::kConv2d, 32, 1, 1},   {LayerKind::kDwConv2d, 0, 3, 2},
      {LayerKind::kConv2d, 64, 1, 1},   {LayerKind::kDwConv2d, 0, 3, 2},
      {LayerKind::kConv2d, 128, 1, 1},  {LayerKind::kDwConv2d, 0, 3, 2},
      {LayerKind::kConv2d, 128, 1, 1},  {LayerKind::kDwConv2d, 0, 3, 2},
      {LayerKind::kConv2d, 128, 1, 1},  {LayerKind::kFlatten},
      {LayerKind::kFcS8, 32},           {LayerKind::kFcReal, 2},
  };
  return detail::build_chain_model(arch, seed, capture_width, capture_height,
                                   crop_side);
}

GazeEstimate predict(Engine& eng, const Image& frame,
                     const PipelineConfig& cfg) {
  const Tensor* grid = nullptr;
  if (eng.model.grid_plane != kNoTensor &&
      eng.model.tensors.at(eng.model.input_spec).dims[3] == 2) {
    grid = &eng.model.tensors[eng.model.grid_plane];
  }
  const Tensor input = preprocess(frame, cfg, grid);
  const auto t0 = std::chrono::steady_clock::now();
  const Tensor out = execute(eng.model, eng.plan, input);
  const auto t1 = std::chrono::steady_clock::now();
  eng.last_inference_micros = static_cast<uint64_t>(
      std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count());
  GazeEstimate est = postprocess(out);
  est.inference_micros = static_cast<uint32_t>(eng.last_inference_micros);
  return est;
}

GazeEstimate Engine::predict(const Image& frame) {
  return ttks::predict(*this, frame, config);
}

Engine make_engine(Model model, int capture_width, int capture_height,
                   int crop_side, std::string name) {
  const ValidationReport report = validate(model);
  if (!report.ok()) {
    throw Error("model failed validation:\n" + report.to_string());
  }
  Engine eng;
  eng.plan = plan_arena(model);
  eng.config =
      make_pipeline_config(model, capture_width, capture_height, crop_side);
  eng.model = std::move(model);
  eng.name = std::move(name);
  return eng;
}

}  // namespace ttks
