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

#include "ttks/model.hpp"

#include <cmath>
#include <sstream>

namespace ttks {
namespace {

std::string dims_str(const std::vector<uint32_t>& dims) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) os << ", ";
    os << dims[i];
  }
  os << ")";
  return os.str();
}

std::string layer_label(const Model& m, size_t i) {
  std::ostringstream os;
  os << "layer " << i << " (" << layer_kind_name(m.layers[i].kind) << ")";
  return os.str();
}

std::string producer_label(const Model& m, size_t i) {
  if (i == 0) return "network input";
  std::ostringstream os;
  os << "layer " << (i - 1) << " (" << layer_kind_name(m.layers[i - 1].kind)
     << ") output";
  return os.str();
}

uint64_t tensor_numel(const Model& m, uint32_t idx) {
  return m.tensors[idx].numel();
}

bool index_ok(const Model& m, uint32_t idx) {
  return idx != kNoTensor && idx < m.tensors.size();
}

// Collects validation state while walking the chain.
struct Checker {
  const Model& m;
  std::vector<std::string>& out;

  void add(const std::string& msg) { out.push_back(msg); }

  bool check_constant(uint32_t idx, ElementKind kind, size_t rank,
                      const std::string& what) {
    if (!index_ok(m, idx)) {
      add(what + ": missing tensor");
      return false;
    }
    const Tensor& t = m.tensors[idx];
    if (t.kind != kind) {
      add(what + ": expected " + element_kind_name(kind) + " tensor, got " +
          element_kind_name(t.kind));
      return false;
    }
    if (t.rank() != rank) {
      add(what + ": expected rank " + std::to_string(rank) + ", got " +
          std::to_string(t.rank()));
      return false;
    }
    if (t.data.size() != t.numel() * element_size(t.kind)) {
      add(what + ": constant payload size mismatch");
      return false;
    }
    if (kind != ElementKind::kReal32 && (!t.qp || !is_valid(*t.qp))) {
      add(what + ": missing valid quantization parameters");
      return false;
    }
    return true;
  }
};

// 255 * 127 is the largest |(x - zp) * w| a tap can contribute.
constexpr int64_t kMaxTapMagnitude = 255 * 127;
constexpr int64_t kAccLimit = int64_t{1} << 31;

}  // namespace

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv2d:
      return "CONV2D";
    case LayerKind::kDwConv2d:
      return "DWCONV2D";
    case LayerKind::kFcS8:
      return "FC_S8";
    case LayerKind::kFcReal:
      return "FC_REAL";
    case LayerKind::kFlatten:
      return "FLATTEN";
    case LayerKind::kConcatGrid:
      return "CONCAT_GRID";
  }
  return "?";
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) os << v << "\n";
  return os.str();
}

ValidationReport validate(const Model& m) {
  ValidationReport report;
  Checker ck{m, report.violations};

  if (m.layers.empty()) {
    ck.add("model has no layers");
    return report;
  }
  if (m.version != kModelFormatVersion) {
    ck.add("unsupported model version " + std::to_string(m.version));
  }
  if (!index_ok(m, m.input_spec)) {
    ck.add("input spec index out of range");
    return report;
  }

  const Tensor& in_spec = m.tensors[m.input_spec];
  if (in_spec.kind != ElementKind::kInt8 || in_spec.rank() != 4) {
    ck.add("network input must be a rank-4 int8 tensor");
    return report;
  }
  if (!in_spec.qp || !is_valid(*in_spec.qp)) {
    ck.add("network input is missing valid quantization parameters");
    return report;
  }

  // FC_REAL placement: exactly one, and nothing may follow it.
  size_t fc_real_count = 0;
  for (size_t i = 0; i < m.layers.size(); ++i) {
    if (m.layers[i].kind == LayerKind::kFcReal) {
      ++fc_real_count;
      if (i + 1 != m.layers.size()) {
        ck.add(layer_label(m, i) + ": full-precision layer must be terminal");
      }
    }
  }
  if (fc_real_count == 0) {
    ck.add("model must end with a full-precision output layer");
  } else if (fc_real_count > 1) {
    ck.add("model has more than one full-precision layer");
  }

  if (m.grid_plane != kNoTensor) {
    if (ck.check_constant(m.grid_plane, ElementKind::kInt8, 4, "grid plane")) {
      const Tensor& plane = m.tensors[m.grid_plane];
      if (plane.dims[0] != 1 || plane.dims[3] != 1) {
        ck.add("grid plane must be (1, h, w, 1)");
      } else if (plane.dims[1] != in_spec.dims[1] ||
                 plane.dims[2] != in_spec.dims[2]) {
        ck.add("grid plane dims do not match the network input");
      }
      if (!plane.qp || !(*plane.qp == *in_spec.qp)) {
        ck.add("grid plane must share the network input quantization");
      }
    }
  } else if (in_spec.dims[3] == 2) {
    ck.add("two-channel input requires a stored grid plane");
  }

  // Walk the chain. `cur` holds the dims/qp feeding the next layer; when a
  // layer is too broken to propagate we fall back to its declared output so
  // downstream layers still get checked.
  std::vector<uint32_t> cur_dims = in_spec.dims;
  QuantParams cur_qp = *in_spec.qp;
  bool cur_int8 = true;

  for (size_t i = 0; i < m.layers.size(); ++i) {
    const LayerDef& layer = m.layers[i];
    const std::string label = layer_label(m, i);

    if (!index_ok(m, layer.out_spec)) {
      ck.add(label + ": output spec index out of range");
      return report;
    }
    const Tensor& out_spec = m.tensors[layer.out_spec];
    if (!out_spec.data.empty()) {
      ck.add(label + ": output spec must be payload-free");
    }
    const bool wants_real_out = layer.kind == LayerKind::kFcReal;
    if (wants_real_out) {
      if (out_spec.kind != ElementKind::kReal32) {
        ck.add(label + ": output must be real32");
      }
    } else {
      if (out_spec.kind != ElementKind::kInt8) {
        ck.add(label + ": output must be int8");
      } else if (!out_spec.qp || !is_valid(*out_spec.qp)) {
        ck.add(label + ": output is missing valid quantization parameters");
      }
    }
    if (layer.spec.clamp_min > layer.spec.clamp_max) {
      ck.add(label + ": activation clamp min exceeds max");
    }

    std::vector<uint32_t> expect;
    switch (layer.kind) {
      case LayerKind::kConv2d:
      case LayerKind::kDwConv2d: {
        const bool dw = layer.kind == LayerKind::kDwConv2d;
        if (cur_dims.size() != 4) {
          ck.add(label + ": needs a rank-4 input but " + producer_label(m, i) +
                 " is " + dims_str(cur_dims));
          break;
        }
        if (!ck.check_constant(layer.weight, ElementKind::kInt8, 4,
                               label + " weights") ||
            !ck.check_constant(layer.bias, ElementKind::kInt32, 1,
                               label + " bias")) {
          break;
        }
        const Tensor& w = m.tensors[layer.weight];
        const Tensor& b = m.tensors[layer.bias];
        if (!w.qp || w.qp->zero_point != 0) {
          ck.add(label + ": weight zero_point must be 0");
          break;
        }
        if (static_cast<int>(w.dims[1]) != layer.spec.kernel_h ||
            static_cast<int>(w.dims[2]) != layer.spec.kernel_w) {
          ck.add(label + ": weight kernel dims disagree with the layer spec");
          break;
        }
        const uint32_t out_c = dw ? cur_dims[3] : w.dims[0];
        if (dw && (w.dims[0] != 1 || w.dims[3] != cur_dims[3])) {
          ck.add(label + ": depthwise weights " + dims_str(w.dims) +
                 " do not match " + producer_label(m, i) + " channels " +
                 dims_str(cur_dims));
          break;
        }
        if (!dw && w.dims[3] != cur_dims[3]) {
          ck.add(label + ": weight input channels " + dims_str(w.dims) +
                 " do not match " + producer_label(m, i) + " " +
                 dims_str(cur_dims));
          break;
        }
        if (b.dims[0] != out_c) {
          ck.add(label + ": bias length does not match output channels");
          break;
        }
        if (b.qp->zero_point != 0) {
          ck.add(label + ": bias zero_point must be 0");
        }
        const double want_scale =
            static_cast<double>(cur_qp.scale) * static_cast<double>(w.qp->scale);
        if (std::abs(static_cast<double>(b.qp->scale) - want_scale) >
            1e-6 * want_scale) {
          ck.add(label + ": bias scale must equal in_scale * weight_scale");
        }
        if (out_spec.qp) {
          const double ratio =
              want_scale / static_cast<double>(out_spec.qp->scale);
          if (!(ratio > 0.0) || ratio > 1.0) {
            ck.add(label + ": requantization ratio outside (0, 1]");
          }
        }
        // Accumulator headroom: every tap bounded by 255 * 127.
        const int64_t taps = static_cast<int64_t>(layer.spec.kernel_h) *
                             layer.spec.kernel_w * (dw ? 1 : cur_dims[3]);
        int64_t max_bias = 0;
        for (int32_t v : b.i32()) {
          max_bias = std::max<int64_t>(max_bias, std::abs(static_cast<int64_t>(v)));
        }
        if (taps * kMaxTapMagnitude + max_bias >= kAccLimit) {
          ck.add(label + ": int32 accumulator can overflow");
        }
        try {
          const auto [oh, ow] =
              conv_output_hw(static_cast<int>(cur_dims[1]),
                             static_cast<int>(cur_dims[2]), layer.spec);
          expect = {cur_dims[0], static_cast<uint32_t>(oh),
                    static_cast<uint32_t>(ow), out_c};
        } catch (const Error& e) {
          ck.add(label + ": " + e.what());
        }
        break;
      }
      case LayerKind::kFcS8:
      case LayerKind::kFcReal: {
        const bool real = layer.kind == LayerKind::kFcReal;
        if (cur_dims.size() != 2) {
          ck.add(label + ": needs a rank-2 input but " + producer_label(m, i) +
                 " is " + dims_str(cur_dims));
          break;
        }
        const ElementKind wk = real ? ElementKind::kReal32 : ElementKind::kInt8;
        const ElementKind bk = real ? ElementKind::kReal32 : ElementKind::kInt32;
        if (!ck.check_constant(layer.weight, wk, 2, label + " weights") ||
            !ck.check_constant(layer.bias, bk, 1, label + " bias")) {
          break;
        }
        const Tensor& w = m.tensors[layer.weight];
        const Tensor& b = m.tensors[layer.bias];
        if (w.dims[1] != cur_dims[1]) {
          ck.add(label + ": weight in_features " + dims_str(w.dims) +
                 " do not match " + producer_label(m, i) + " " +
                 dims_str(cur_dims));
          break;
        }
        if (b.dims[0] != w.dims[0]) {
          ck.add(label + ": bias length does not match out_features");
          break;
        }
        if (!real) {
          if (!w.qp || w.qp->zero_point != 0) {
            ck.add(label + ": weight zero_point must be 0");
            break;
          }
          if (b.qp->zero_point != 0) {
            ck.add(label + ": bias zero_point must be 0");
          }
          const double want_scale = static_cast<double>(cur_qp.scale) *
                                    static_cast<double>(w.qp->scale);
          if (std::abs(static_cast<double>(b.qp->scale) - want_scale) >
              1e-6 * want_scale) {
            ck.add(label + ": bias scale must equal in_scale * weight_scale");
          }
          if (out_spec.qp) {
            const double ratio =
                want_scale / static_cast<double>(out_spec.qp->scale);
            if (!(ratio > 0.0) || ratio > 1.0) {
              ck.add(label + ": requantization ratio outside (0, 1]");
            }
          }
          int64_t max_bias = 0;
          for (int32_t v : b.i32()) {
            max_bias =
                std::max<int64_t>(max_bias, std::abs(static_cast<int64_t>(v)));
          }
          if (static_cast<int64_t>(cur_dims[1]) * kMaxTapMagnitude + max_bias >=
              kAccLimit) {
            ck.add(label + ": int32 accumulator can overflow");
          }
        } else if (!cur_int8) {
          ck.add(label + ": full-precision layer must consume an int8 tensor");
        }
        expect = {cur_dims[0], w.dims[0]};
        break;
      }
      case LayerKind::kFlatten: {
        if (layer.weight != kNoTensor || layer.bias != kNoTensor) {
          ck.add(label + ": flatten takes no constants");
        }
        uint64_t n = 1;
        for (size_t d = 1; d < cur_dims.size(); ++d) n *= cur_dims[d];
        expect = {cur_dims.empty() ? 1 : cur_dims[0], static_cast<uint32_t>(n)};
        if (out_spec.qp && !(*out_spec.qp == cur_qp)) {
          ck.add(label + ": flatten must preserve quantization");
        }
        break;
      }
      case LayerKind::kConcatGrid: {
        if (i != 0) {
          ck.add(label + ": grid concat must be the first layer");
        }
        if (cur_dims.size() != 4) {
          ck.add(label + ": needs a rank-4 input");
          break;
        }
        if (!ck.check_constant(layer.weight, ElementKind::kInt8, 4,
                               label + " plane")) {
          break;
        }
        const Tensor& plane = m.tensors[layer.weight];
        if (plane.dims[0] != 1 || plane.dims[1] != cur_dims[1] ||
            plane.dims[2] != cur_dims[2] || plane.dims[3] != 1) {
          ck.add(label + ": plane dims " + dims_str(plane.dims) +
                 " do not match " + producer_label(m, i) + " " +
                 dims_str(cur_dims));
          break;
        }
        if (!plane.qp || !(*plane.qp == cur_qp)) {
          ck.add(label + ": plane must share the input quantization");
        }
        if (out_spec.qp && !(*out_spec.qp == cur_qp)) {
          ck.add(label + ": grid concat must preserve quantization");
        }
        expect = {cur_dims[0], cur_dims[1], cur_dims[2], cur_dims[3] + 1};
        break;
      }
    }

    if (!expect.empty() && out_spec.dims != expect) {
      ck.add(label + ": declared output " + dims_str(out_spec.dims) +
             " does not match computed " + dims_str(expect) + " fed by " +
             producer_label(m, i));
    }

    cur_dims = out_spec.dims;
    cur_int8 = out_spec.kind == ElementKind::kInt8;
    if (out_spec.qp) cur_qp = *out_spec.qp;
  }

  return report;
}

uint64_t layer_params(const Model& m, size_t layer_index) {
  const LayerDef& layer = m.layers.at(layer_index);
  switch (layer.kind) {
    case LayerKind::kConv2d:
    case LayerKind::kDwConv2d:
    case LayerKind::kFcS8:
    case LayerKind::kFcReal: {
      uint64_t n = 0;
      if (index_ok(m, layer.weight)) n += tensor_numel(m, layer.weight);
      if (index_ok(m, layer.bias)) n += tensor_numel(m, layer.bias);
      return n;
    }
    case LayerKind::kFlatten:
    case LayerKind::kConcatGrid:
      return 0;
  }
  return 0;
}

uint64_t count_params(const Model& m) {
  uint64_t total = 0;
  for (size_t i = 0; i < m.layers.size(); ++i) total += layer_params(m, i);
  return total;
}

uint64_t layer_macs(const Model& m, size_t layer_index) {
  const LayerDef& layer = m.layers.at(layer_index);
  if (!index_ok(m, layer.out_spec)) return 0;
  const auto& out = m.tensors[layer.out_spec].dims;
  switch (layer.kind) {
    case LayerKind::kConv2d: {
      if (!index_ok(m, layer.weight) || out.size() != 4) return 0;
      const auto& w = m.tensors[layer.weight].dims;  // (oc, kh, kw, ic)
      return static_cast<uint64_t>(w[0]) * w[1] * w[2] * w[3] * out[0] * out[1] *
             out[2];
    }
    case LayerKind::kDwConv2d: {
      if (!index_ok(m, layer.weight) || out.size() != 4) return 0;
      const auto& w = m.tensors[layer.weight].dims;  // (1, kh, kw, c)
      return static_cast<uint64_t>(w[1]) * w[2] * w[3] * out[0] * out[1] * out[2];
    }
    case LayerKind::kFcS8:
    case LayerKind::kFcReal: {
      if (!index_ok(m, layer.weight)) return 0;
      const auto& w = m.tensors[layer.weight].dims;  // (out, in)
      return static_cast<uint64_t>(w[0]) * w[1] *
             (out.empty() ? 1 : out[0]);
    }
    case LayerKind::kFlatten:
    case LayerKind::kConcatGrid:
      return 0;
  }
  return 0;
}

uint64_t count_macs(const Model& m) {
  uint64_t total = 0;
  for (size_t i = 0; i < m.layers.size(); ++i) total += layer_macs(m, i);
  return total;
}

std::vector<std::vector<uint32_t>> activation_dims(const Model& m) {
  if (!index_ok(m, m.input_spec)) throw Error("model input spec out of range");
  std::vector<std::vector<uint32_t>> dims;
  dims.reserve(m.layers.size() + 1);
  dims.push_back(m.tensors[m.input_spec].dims);
  for (const LayerDef& layer : m.layers) {
    if (!index_ok(m, layer.out_spec)) throw Error("layer output spec out of range");
    dims.push_back(m.tensors[layer.out_spec].dims);
  }
  return dims;
}

}  // namespace ttks
