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
//
// Binary model container. All multi-byte fields are little-endian:
//
//   magic "TTKS"
//   u16 version (currently 1)
//   u16 layer_count
//   u32 tensor_count
//   u32 input_spec index
//   u32 grid_plane index (0xFFFFFFFF = none)
//   tensor entries:
//     u8 element kind, u8 rank, u32 dims[rank],
//     f32 scale (written as 0 for real32 and ignored on read), i32 zero_point,
//     u32 byte_len, byte_len payload bytes (0 = shape/quant spec only)
//   layer records:
//     u8 layer kind,
//     u16 kernel_h, kernel_w, stride_h, stride_w,
//     u16 pad_top, pad_bottom, pad_left, pad_right,
//     u16 clamp_min, clamp_max (two's-complement int16),
//     u32 weight, u32 bias, u32 out_spec (0xFFFFFFFF = none)
//   u32 CRC-32 of every preceding byte
//
// CRC-32 is the usual reflected polynomial 0xEDB88320 with initial value and
// final xor 0xFFFFFFFF ("123456789" -> 0xCBF43926).

#ifndef TTKS_SERIALIZE_HPP_
#define TTKS_SERIALIZE_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ttks/model.hpp"

namespace ttks {

inline constexpr char kModelMagic[4] = {'T', 'T', 'K', 'S'};

// Decoder hard limits. Anything beyond these is rejected as malformed before
// any allocation is attempted.
inline constexpr uint32_t kMaxTensors = 1u << 20;
inline constexpr uint32_t kMaxLayers = 1u << 16;
inline constexpr uint64_t kMaxElements = 1ull << 28;

uint32_t crc32(const uint8_t* data, size_t size);
uint32_t crc32(const std::vector<uint8_t>& bytes);

std::vector<uint8_t> encode_model(const Model& m);

// Throws DecodeError; the kind() distinguishes bad magic, checksum mismatch,
// truncation, unknown kind bytes, version mismatch and structural problems.
Model decode_model(const uint8_t* data, size_t size);
Model decode_model(const std::vector<uint8_t>& bytes);

// File helpers; throw IoError on filesystem failure.
void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

}  // namespace ttks

#endif  // TTKS_SERIALIZE_HPP_
