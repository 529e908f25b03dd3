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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ttks/errors.hpp"
#include "ttks/qcore.hpp"

namespace ttks {

enum class ElementKind : uint8_t {
  kInt8 = 1,
  kInt32 = 2,
  kReal32 = 3,
};

size_t element_size(ElementKind kind);
const char* element_kind_name(ElementKind kind);

// Dense row-major tensor. Rank-4 shapes are (batch, height, width, channels)
// with channels innermost. Quantization parameters are present iff the
// element kind is int8 or int32.
struct Tensor {
  std::vector<uint32_t> dims;
  ElementKind kind = ElementKind::kInt8;
  std::optional<QuantParams> qp;
  std::vector<uint8_t> data;

  size_t rank() const { return dims.size(); }
  uint64_t numel() const;
  size_t byte_size() const { return data.size(); }

  std::span<const int8_t> i8() const;
  std::span<int8_t> i8();
  std::span<const int32_t> i32() const;
  std::span<int32_t> i32();
  std::span<const float> f32() const;
  std::span<float> f32();
};

// Allocates a zero-filled tensor. Throws DimensionError on empty dims, a zero
// dim, or a missing/extra qp for the element kind.
Tensor make_tensor(ElementKind kind, std::vector<uint32_t> dims,
                   std::optional<QuantParams> qp = std::nullopt);

bool same_dims(const Tensor& a, const Tensor& b);

// Flat index into a rank-4 tensor.
inline size_t nhwc_index(const Tensor& t, size_t n, size_t y, size_t x,
                         size_t c) {
  return ((n * t.dims[1] + y) * t.dims[2] + x) * t.dims[3] + c;
}

}  // namespace ttks
