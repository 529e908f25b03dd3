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

#include "ttks/serialize.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "ttks/errors.hpp"

namespace ttks {
namespace {

constexpr std::array<uint32_t, 256> make_crc32_table() {
  std::array<uint32_t, 256> table{};
  for (uint32_t i = 0; i < 256; ++i) {
    uint32_t c = i;
    for (int k = 0; k < 8; ++k) {
      c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    }
    table[i] = c;
  }
  return table;
}

constexpr auto kCrc32Table = make_crc32_table();

class Writer {
 public:
  void u8(uint8_t v) { bytes_.push_back(v); }
  void u16(uint16_t v) {
    u8(static_cast<uint8_t>(v & 0xFF));
    u8(static_cast<uint8_t>(v >> 8));
  }
  void u32(uint32_t v) {
    u16(static_cast<uint16_t>(v & 0xFFFF));
    u16(static_cast<uint16_t>(v >> 16));
  }
  void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
  void f32(float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    u32(bits);
  }
  void raw(const uint8_t* data, size_t n) {
    bytes_.insert(bytes_.end(), data, data + n);
  }

  std::vector<uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<uint8_t> bytes_;
};

class Reader {
 public:
  Reader(const uint8_t* data, size_t size) : data_(data), size_(size) {}

  uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  uint16_t u16() {
    need(2);
    uint16_t v = static_cast<uint16_t>(data_[pos_] |
                                       (static_cast<uint16_t>(data_[pos_ + 1]) << 8));
    pos_ += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = static_cast<uint32_t>(data_[pos_]) |
                 (static_cast<uint32_t>(data_[pos_ + 1]) << 8) |
                 (static_cast<uint32_t>(data_[pos_ + 2]) << 16) |
                 (static_cast<uint32_t>(data_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }
  int32_t i32() { return static_cast<int32_t>(u32()); }
  float f32() {
    uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
  void raw(uint8_t* out, size_t n) {
    need(n);
    std::memcpy(out, data_ + pos_, n);
    pos_ += n;
  }

  size_t remaining() const { return size_ - pos_; }

 private:
  void need(size_t n) const {
    if (size_ - pos_ < n) {
      throw DecodeError(DecodeErrorKind::kTruncated, "model data ends early");
    }
  }

  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
};

void encode_tensor(Writer& w, const Tensor& t) {
  if (t.rank() < 1 || t.rank() > 4) throw Error("tensor rank must be 1..4");
  w.u8(static_cast<uint8_t>(t.kind));
  w.u8(static_cast<uint8_t>(t.rank()));
  for (uint32_t d : t.dims) w.u32(d);
  if (t.kind == ElementKind::kReal32) {
    w.f32(0.0f);
    w.i32(0);
  } else {
    if (!t.qp) throw Error("quantized tensor is missing quantization params");
    w.f32(t.qp->scale);
    w.i32(t.qp->zero_point);
  }
  if (t.data.size() > 0xFFFFFFFFull) throw Error("tensor payload too large");
  w.u32(static_cast<uint32_t>(t.data.size()));
  if (!t.data.empty()) w.raw(t.data.data(), t.data.size());
}

Tensor decode_tensor(Reader& r) {
  const uint8_t kind_byte = r.u8();
  if (kind_byte < 1 || kind_byte > 3) {
    throw DecodeError(DecodeErrorKind::kUnknownElementKind,
                      "unknown element kind " + std::to_string(kind_byte));
  }
  const auto kind = static_cast<ElementKind>(kind_byte);
  const uint8_t rank = r.u8();
  if (rank < 1 || rank > 4) {
    throw DecodeError(DecodeErrorKind::kMalformed,
                      "tensor rank " + std::to_string(rank) + " out of range");
  }

  Tensor t;
  t.kind = kind;
  t.dims.resize(rank);
  uint64_t numel = 1;
  for (uint8_t i = 0; i < rank; ++i) {
    t.dims[i] = r.u32();
    if (t.dims[i] == 0) {
      throw DecodeError(DecodeErrorKind::kMalformed, "zero tensor dimension");
    }
    numel *= t.dims[i];
    if (numel > kMaxElements) {
      throw DecodeError(DecodeErrorKind::kMalformed, "tensor too large");
    }
  }

  const float scale = r.f32();
  const int32_t zero_point = r.i32();
  if (kind != ElementKind::kReal32) {
    if (!std::isfinite(scale) || scale <= 0.0f) {
      throw DecodeError(DecodeErrorKind::kMalformed,
                        "quantized tensor needs a positive finite scale");
    }
    t.qp = QuantParams{scale, zero_point};
  }

  const uint32_t byte_len = r.u32();
  if (byte_len != 0) {
    if (byte_len != numel * element_size(kind)) {
      throw DecodeError(DecodeErrorKind::kMalformed,
                        "tensor payload length disagrees with its dims");
    }
    t.data.resize(byte_len);
    r.raw(t.data.data(), byte_len);
  }
  return t;
}

void check_tensor_index(uint32_t idx, uint32_t count, bool allow_none,
                        const char* what) {
  if (idx == kNoTensor) {
    if (allow_none) return;
    throw DecodeError(DecodeErrorKind::kMalformed,
                      std::string(what) + " index missing");
  }
  if (idx >= count) {
    throw DecodeError(DecodeErrorKind::kMalformed,
                      std::string(what) + " index out of range");
  }
}

}  // namespace

uint32_t crc32(const uint8_t* data, size_t size) {
  uint32_t crc = 0xFFFFFFFFu;
  for (size_t i = 0; i < size; ++i) {
    crc = kCrc32Table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
  }
  return crc ^ 0xFFFFFFFFu;
}

uint32_t crc32(const std::vector<uint8_t>& bytes) {
  return crc32(bytes.data(), bytes.size());
}

std::vector<uint8_t> encode_model(const Model& m) {
  if (m.layers.empty() || m.layers.size() > kMaxLayers ||
      m.layers.size() > 0xFFFF) {
    throw Error("layer count out of range");
  }
  if (m.tensors.empty() || m.tensors.size() > kMaxTensors) {
    throw Error("tensor count out of range");
  }

  Writer w;
  w.raw(reinterpret_cast<const uint8_t*>(kModelMagic), sizeof(kModelMagic));
  w.u16(m.version);
  w.u16(static_cast<uint16_t>(m.layers.size()));
  w.u32(static_cast<uint32_t>(m.tensors.size()));
  w.u32(m.input_spec);
  w.u32(m.grid_plane);
  for (const Tensor& t : m.tensors) encode_tensor(w, t);
  for (const LayerDef& layer : m.layers) {
    w.u8(static_cast<uint8_t>(layer.kind));
    w.u16(static_cast<uint16_t>(layer.spec.kernel_h));
    w.u16(static_cast<uint16_t>(layer.spec.kernel_w));
    w.u16(static_cast<uint16_t>(layer.spec.stride_h));
    w.u16(static_cast<uint16_t>(layer.spec.stride_w));
    w.u16(static_cast<uint16_t>(layer.spec.pad_top));
    w.u16(static_cast<uint16_t>(layer.spec.pad_bottom));
    w.u16(static_cast<uint16_t>(layer.spec.pad_left));
    w.u16(static_cast<uint16_t>(layer.spec.pad_right));
    w.u16(static_cast<uint16_t>(static_cast<int16_t>(layer.spec.clamp_min)));
    w.u16(static_cast<uint16_t>(static_cast<int16_t>(layer.spec.clamp_max)));
    w.u32(layer.weight);
    w.u32(layer.bias);
    w.u32(layer.out_spec);
  }
  w.u32(crc32(w.bytes()));
  return std::move(w.bytes());
}

Model decode_model(const uint8_t* data, size_t size) {
  if (size < sizeof(kModelMagic)) {
    throw DecodeError(DecodeErrorKind::kTruncated, "model data ends early");
  }
  if (std::memcmp(data, kModelMagic, sizeof(kModelMagic)) != 0) {
    throw DecodeError(DecodeErrorKind::kBadMagic, "bad model magic");
  }
  if (size < sizeof(kModelMagic) + sizeof(uint32_t)) {
    throw DecodeError(DecodeErrorKind::kTruncated, "model data ends early");
  }
  const size_t body = size - sizeof(uint32_t);
  const uint32_t stored = static_cast<uint32_t>(data[body]) |
                          (static_cast<uint32_t>(data[body + 1]) << 8) |
                          (static_cast<uint32_t>(data[body + 2]) << 16) |
                          (static_cast<uint32_t>(data[body + 3]) << 24);
  if (crc32(data, body) != stored) {
    throw DecodeError(DecodeErrorKind::kChecksumMismatch,
                      "model checksum mismatch");
  }

  Reader r(data + sizeof(kModelMagic), body - sizeof(kModelMagic));
  Model m;
  m.version = r.u16();
  if (m.version != kModelFormatVersion) {
    throw DecodeError(DecodeErrorKind::kBadVersion,
                      "unsupported model version " + std::to_string(m.version));
  }
  const uint16_t layer_count = r.u16();
  if (layer_count == 0) {
    throw DecodeError(DecodeErrorKind::kMalformed, "model has no layers");
  }
  const uint32_t tensor_count = r.u32();
  if (tensor_count == 0 || tensor_count > kMaxTensors) {
    throw DecodeError(DecodeErrorKind::kMalformed, "tensor count out of range");
  }
  m.input_spec = r.u32();
  m.grid_plane = r.u32();
  check_tensor_index(m.input_spec, tensor_count, false, "input spec");
  check_tensor_index(m.grid_plane, tensor_count, true, "grid plane");

  m.tensors.reserve(tensor_count);
  for (uint32_t i = 0; i < tensor_count; ++i) {
    m.tensors.push_back(decode_tensor(r));
  }

  m.layers.reserve(layer_count);
  for (uint16_t i = 0; i < layer_count; ++i) {
    const uint8_t kind_byte = r.u8();
    if (kind_byte < 1 || kind_byte > 6) {
      throw DecodeError(DecodeErrorKind::kUnknownLayerKind,
                        "unknown layer kind " + std::to_string(kind_byte));
    }
    LayerDef layer;
    layer.kind = static_cast<LayerKind>(kind_byte);
    layer.spec.kernel_h = r.u16();
    layer.spec.kernel_w = r.u16();
    layer.spec.stride_h = r.u16();
    layer.spec.stride_w = r.u16();
    layer.spec.pad_top = r.u16();
    layer.spec.pad_bottom = r.u16();
    layer.spec.pad_left = r.u16();
    layer.spec.pad_right = r.u16();
    layer.spec.clamp_min = static_cast<int16_t>(r.u16());
    layer.spec.clamp_max = static_cast<int16_t>(r.u16());
    layer.weight = r.u32();
    layer.bias = r.u32();
    layer.out_spec = r.u32();
    check_tensor_index(layer.weight, tensor_count, true, "layer weight");
    check_tensor_index(layer.bias, tensor_count, true, "layer bias");
    check_tensor_index(layer.out_spec, tensor_count, false, "layer output spec");
    m.layers.push_back(layer);
  }

  if (r.remaining() != 0) {
    throw DecodeError(DecodeErrorKind::kMalformed,
                      "trailing bytes after the layer records");
  }
  return m;
}

Model decode_model(const std::vector<uint8_t>& bytes) {
  return decode_model(bytes.data(), bytes.size());
}

void save_model(const Model& m, const std::string& path) {
  const std::vector<uint8_t> bytes = encode_model(m);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open " + path + " for writing");
  const size_t written = std::fwrite(bytes.data(), 1, bytes.size(), f);
  const bool ok = written == bytes.size() && std::fclose(f) == 0;
  if (!ok) throw IoError("short write to " + path);
}

Model load_model(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open " + path);
  std::vector<uint8_t> bytes;
  uint8_t buf[65536];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) {
    bytes.insert(bytes.end(), buf, buf + n);
  }
  const bool short_read = std::ferror(f) != 0;
  std::fclose(f);
  if (short_read) throw IoError("error reading " + path);
  return decode_model(bytes);
}

}  // namespace ttks
