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

#include "ttks/execute.hpp"

#include <cstring>
#include <string>
#include <vector>

#include "ttks/errors.hpp"
#include "ttks/kernels.hpp"
#include "ttks/qcore.hpp"

namespace ttks {

Tensor execute(const Model& m, const ArenaPlan& plan, const Tensor& input) {
  const Tensor& in_spec = m.tensors.at(m.input_spec);
  if (input.dims != in_spec.dims) {
    throw DimensionError("input dims do not match the model input spec");
  }
  if (input.kind != in_spec.kind) {
    throw Error("input element kind does not match the model input spec");
  }
  if (!input.qp || !in_spec.qp || !(*input.qp == *in_spec.qp)) {
    throw Error("input quantization does not match the model input spec");
  }
  if (plan.offsets.size() != m.layers.size() + 1 ||
      plan.sizes.size() != plan.offsets.size()) {
    throw Error("arena plan does not match the model");
  }
  if (plan.sizes[0] != input.data.size()) {
    throw Error("arena plan input size does not match the input tensor");
  }

  std::vector<uint8_t> arena(plan.peak_bytes);
  std::memcpy(arena.data() + plan.offsets[0], input.data.data(),
              input.data.size());

  std::vector<uint32_t> cur_dims = in_spec.dims;
  QuantParams cur_qp = *in_spec.qp;

  for (size_t i = 0; i < m.layers.size(); ++i) {
    const LayerDef& layer = m.layers[i];
    const Tensor& out_spec = m.tensors.at(layer.out_spec);
    uint8_t* const in_ptr = arena.data() + plan.offsets[i];
    uint8_t* const out_ptr = arena.data() + plan.offsets[i + 1];

    switch (layer.kind) {
      case LayerKind::kConv2d: {
        detail::conv2d_s8_raw(reinterpret_cast<const int8_t*>(in_ptr),
                              static_cast<int>(cur_dims[0]),
                              static_cast<int>(cur_dims[1]),
                              static_cast<int>(cur_dims[2]),
                              static_cast<int>(cur_dims[3]), cur_qp,
                              m.tensors.at(layer.weight),
                              m.tensors.at(layer.bias), layer.spec,
                              *out_spec.qp, reinterpret_cast<int8_t*>(out_ptr),
                              static_cast<int>(out_spec.dims[1]),
                              static_cast<int>(out_spec.dims[2]));
        break;
      }
      case LayerKind::kDwConv2d: {
        detail::depthwise_conv2d_s8_raw(
            reinterpret_cast<const int8_t*>(in_ptr),
            static_cast<int>(cur_dims[0]), static_cast<int>(cur_dims[1]),
            static_cast<int>(cur_dims[2]), static_cast<int>(cur_dims[3]),
            cur_qp, m.tensors.at(layer.weight), m.tensors.at(layer.bias),
            layer.spec, *out_spec.qp, reinterpret_cast<int8_t*>(out_ptr),
            static_cast<int>(out_spec.dims[1]),
            static_cast<int>(out_spec.dims[2]));
        break;
      }
      case LayerKind::kFcS8: {
        detail::fully_connected_s8_raw(
            reinterpret_cast<const int8_t*>(in_ptr),
            static_cast<int>(cur_dims[0]), static_cast<int>(cur_dims[1]),
            cur_qp, m.tensors.at(layer.weight), m.tensors.at(layer.bias),
            *out_spec.qp, layer.spec.clamp_min, layer.spec.clamp_max,
            reinterpret_cast<int8_t*>(out_ptr));
        break;
      }
      case LayerKind::kFcReal: {
        const int batch = static_cast<int>(cur_dims[0]);
        const int nin = static_cast<int>(cur_dims[1]);
        std::vector<float> scratch(static_cast<size_t>(batch) * nin);
        const int8_t* q = reinterpret_cast<const int8_t*>(in_ptr);
        for (size_t k = 0; k < scratch.size(); ++k) {
          scratch[k] = static_cast<float>(dequantize(q[k], cur_qp));
        }
        detail::fully_connected_real_raw(scratch.data(), batch, nin,
                                         m.tensors.at(layer.weight),
                                         m.tensors.at(layer.bias),
                                         reinterpret_cast<float*>(out_ptr));
        break;
      }
      case LayerKind::kFlatten: {
        std::memcpy(out_ptr, in_ptr, plan.sizes[i + 1]);
        break;
      }
      case LayerKind::kConcatGrid: {
        const Tensor& plane = m.tensors.at(layer.weight);
        const int8_t* src = reinterpret_cast<const int8_t*>(in_ptr);
        const int8_t* grid = plane.i8().data();
        int8_t* dst = reinterpret_cast<int8_t*>(out_ptr);
        const size_t pixels =
            static_cast<size_t>(cur_dims[0]) * cur_dims[1] * cur_dims[2];
        const size_t c = cur_dims[3];
        for (size_t p = 0; p < pixels; ++p) {
          std::memcpy(dst + p * (c + 1), src + p * c, c);
          dst[p * (c + 1) + c] = grid[p];
        }
        break;
      }
    }

    cur_dims = out_spec.dims;
    if (out_spec.qp) cur_qp = *out_spec.qp;
  }

  const Tensor& final_spec = m.tensors.at(m.layers.back().out_spec);
  Tensor out = make_tensor(final_spec.kind, final_spec.dims, final_spec.qp);
  std::memcpy(out.data.data(), arena.data() + plan.offsets.back(),
              out.data.size());
  return out;
}

}  // namespace ttks
