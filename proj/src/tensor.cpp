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

#include "ttks/tensor.hpp"

namespace ttks {

size_t element_size(ElementKind kind) {
  switch (kind) {
    case ElementKind::kInt8:
      return 1;
    case ElementKind::kInt32:
    case ElementKind::kReal32:
      return 4;
  }
  throw Error("unknown element kind");
}

const char* element_kind_name(ElementKind kind) {
  switch (kind) {
    case ElementKind::kInt8:
      return "int8";
    case ElementKind::kInt32:
      return "int32";
    case ElementKind::kReal32:
      return "real32";
  }
  return "?";
}

uint64_t Tensor::numel() const {
  uint64_t n = 1;
  for (uint32_t d : dims) n *= d;
  return n;
}

std::span<const int8_t> Tensor::i8() const {
  return {reinterpret_cast<const int8_t*>(data.data()), data.size()};
}
std::span<int8_t> Tensor::i8() {
  return {reinterpret_cast<int8_t*>(data.data()), data.size()};
}
std::span<const int32_t> Tensor::i32() const {
  return {reinterpret_cast<const int32_t*>(data.data()), data.size() / 4};
}
std::span<int32_t> Tensor::i32() {
  return {reinterpret_cast<int32_t*>(data.data()), data.size() / 4};
}
std::span<const float> Tensor::f32() const {
  return {reinterpret_cast<const float*>(data.data()), data.size() / 4};
}
std::span<float> Tensor::f32() {
  return {reinterpret_cast<float*>(data.data()), data.size() / 4};
}

Tensor make_tensor(ElementKind kind, std::vector<uint32_t> dims,
                   std::optional<QuantParams> qp) {
  if (dims.empty() || dims.size() > 4) {
    throw DimensionError("tensor rank must be 1..4");
  }
  uint64_t n = 1;
  for (uint32_t d : dims) {
    if (d == 0) throw DimensionError("tensor dims must be >= 1");
    n *= d;
  }
  const bool wants_qp = kind != ElementKind::kReal32;
  if (wants_qp != qp.has_value()) {
    throw DimensionError(wants_qp ? "integer tensor requires qp"
                                  : "real tensor must not carry qp");
  }
  if (qp && !is_valid(*qp)) throw DimensionError("invalid quant params");
  Tensor t;
  t.dims = std::move(dims);
  t.kind = kind;
  t.qp = qp;
  t.data.assign(static_cast<size_t>(n) * element_size(kind), 0);
  return t;
}

bool same_dims(const Tensor& a, const Tensor& b) { return a.dims == b.dims; }

}  // namespace ttks
