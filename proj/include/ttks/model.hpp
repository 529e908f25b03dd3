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
#include <string>
#include <vector>

#include "ttks/kernels.hpp"
#include "ttks/tensor.hpp"

namespace ttks {

enum class LayerKind : uint8_t {
  kConv2d = 1,
  kDwConv2d = 2,
  kFcS8 = 3,
  kFcReal = 4,
  kFlatten = 5,
  kConcatGrid = 6,
};

const char* layer_kind_name(LayerKind kind);

inline constexpr uint32_t kNoTensor = 0xFFFFFFFFu;
inline constexpr uint16_t kModelFormatVersion = 1;

// One link of the layer chain. `weight`/`bias` index constant tensors in the
// model's tensor table (kNoTensor when absent; kConcatGrid stores its plane
// in `weight`). `out_spec` indexes a payload-free tensor describing the
// layer's output shape and quantization.
struct LayerDef {
  LayerKind kind = LayerKind::kConv2d;
  ConvSpec spec;
  uint32_t weight = kNoTensor;
  uint32_t bias = kNoTensor;
  uint32_t out_spec = kNoTensor;
};

// A strictly sequential int8 graph. The tensor table holds the constants
// (weights, biases, the grid-embedding plane) plus payload-free "spec"
// entries describing the network input and each layer output.
struct Model {
  uint16_t version = kModelFormatVersion;
  std::vector<Tensor> tensors;
  std::vector<LayerDef> layers;
  uint32_t input_spec = 0;
  uint32_t grid_plane = kNoTensor;  // kNoTensor when the model has no plane

  const Tensor& input() const { return tensors.at(input_spec); }
  const Tensor& output() const { return tensors.at(layers.back().out_spec); }
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Structural and numeric checks over a decoded or hand-built model:
// chain shape compatibility, quantization completeness, the terminal
// full-precision-layer rule, and the int32 accumulator headroom bound.
// Reports every violation found rather than stopping at the first.
ValidationReport validate(const Model& m);

// Trainable element counts (weights + biases). The grid-embedding plane is
// pipeline metadata, not a parameter.
uint64_t count_params(const Model& m);
uint64_t layer_params(const Model& m, size_t layer_index);

// Multiply-accumulate counts per forward pass.
uint64_t count_macs(const Model& m);
uint64_t layer_macs(const Model& m, size_t layer_index);

// Dims of every activation on the chain: index 0 is the network input,
// index i+1 is layer i's output.
std::vector<std::vector<uint32_t>> activation_dims(const Model& m);

}  // namespace ttks
