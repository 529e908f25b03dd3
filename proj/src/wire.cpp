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

#include "ttks/wire.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "ttks/errors.hpp"
#include "ttks/ppm.hpp"

namespace ttks {
namespace {

constexpr std::array<uint16_t, 256> make_crc16_table() {
  std::array<uint16_t, 256> table{};
  for (uint32_t i = 0; i < 256; ++i) {
    uint16_t c = static_cast<uint16_t>(i << 8);
    for (int k = 0; k < 8; ++k) {
      c = (c & 0x8000u) ? static_cast<uint16_t>((c << 1) ^ 0x1021u)
                        : static_cast<uint16_t>(c << 1);
    }
    table[i] = c;
  }
  return table;
}

constexpr auto kCrc16Table = make_crc16_table();

constexpr size_t kHeaderSize = 6;   // sync + kind + u32 length
constexpr size_t kTrailerSize = 2;  // CRC-16

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xFF));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  put_u16(out, static_cast<uint16_t>(v & 0xFFFF));
  put_u16(out, static_cast<uint16_t>(v >> 16));
}

void put_f32(std::vector<uint8_t>& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u32(out, bits);
}

uint16_t get_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (static_cast<uint16_t>(p[1]) << 8));
}

uint32_t get_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

float get_f32(const uint8_t* p) {
  const uint32_t bits = get_u32(p);
  float v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

DecodeEvent message_event(WireMessage msg) {
  DecodeEvent e;
  e.message = std::move(msg);
  return e;
}

DecodeEvent diagnostic_event(DecodeDiagnostic d) {
  DecodeEvent e;
  e.diagnostic = d;
  return e;
}

}  // namespace

bool is_known_kind(uint8_t kind) {
  switch (static_cast<MessageKind>(kind)) {
    case MessageKind::kFrame:
    case MessageKind::kGaze:
    case MessageKind::kStats:
    case MessageKind::kError:
      return true;
  }
  return false;
}

const char* diagnostic_name(DecodeDiagnostic d) {
  switch (d) {
    case DecodeDiagnostic::kGarbage:
      return "garbage";
    case DecodeDiagnostic::kCrcMismatch:
      return "crc-mismatch";
    case DecodeDiagnostic::kOversizeLength:
      return "oversize-length";
    case DecodeDiagnostic::kUnknownKind:
      return "unknown-kind";
  }
  return "?";
}

uint16_t crc16_ccitt_false(const uint8_t* data, size_t size) {
  uint16_t crc = 0xFFFF;
  for (size_t i = 0; i < size; ++i) {
    crc = static_cast<uint16_t>((crc << 8) ^
                                kCrc16Table[((crc >> 8) ^ data[i]) & 0xFF]);
  }
  return crc;
}

std::vector<uint8_t> encode_message(uint8_t kind,
                                    const std::vector<uint8_t>& payload) {
  if (payload.size() > kMaxWirePayload) {
    throw Error("wire payload too large");
  }
  std::vector<uint8_t> out;
  out.reserve(kHeaderSize + payload.size() + kTrailerSize);
  out.push_back(kSyncByte);
  out.push_back(kind);
  put_u32(out, static_cast<uint32_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  const uint16_t crc = crc16_ccitt_false(out.data() + 1, out.size() - 1);
  put_u16(out, crc);
  return out;
}

void StreamDecoder::push(const uint8_t* data, size_t size) {
  buf_.insert(buf_.end(), data, data + size);
}

void StreamDecoder::push(const std::vector<uint8_t>& bytes) {
  push(bytes.data(), bytes.size());
}

void StreamDecoder::drop(size_t n) {
  head_ += n;
  // Compact occasionally so long sessions do not grow without bound.
  if (head_ > 65536 && head_ * 2 > buf_.size()) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<ptrdiff_t>(head_));
    head_ = 0;
  }
}

std::optional<DecodeEvent> StreamDecoder::next() {
  // Hunt for the sync byte; report a skipped run once, as one event.
  size_t avail = buf_.size() - head_;
  size_t skip = 0;
  while (skip < avail && buf_[head_ + skip] != kSyncByte) ++skip;
  if (skip > 0) {
    drop(skip);
    return diagnostic_event(DecodeDiagnostic::kGarbage);
  }
  avail = buf_.size() - head_;
  if (avail < kHeaderSize) return std::nullopt;

  const uint8_t* p = buf_.data() + head_;
  const uint8_t kind = p[1];
  const uint32_t len = get_u32(p + 2);
  if (len > kMaxWirePayload) {
    drop(1);
    return diagnostic_event(DecodeDiagnostic::kOversizeLength);
  }
  const size_t total = kHeaderSize + len + kTrailerSize;
  if (avail < total) return std::nullopt;

  const uint16_t want = get_u16(p + kHeaderSize + len);
  const uint16_t got = crc16_ccitt_false(p + 1, kHeaderSize - 1 + len);
  if (want != got) {
    // Only the sync byte is consumed: if this "frame" was actually noise that
    // swallowed a real sync, rescanning finds the real frame.
    drop(1);
    return diagnostic_event(DecodeDiagnostic::kCrcMismatch);
  }
  if (!is_known_kind(kind)) {
    drop(total);
    return diagnostic_event(DecodeDiagnostic::kUnknownKind);
  }

  WireMessage msg;
  msg.kind = kind;
  msg.payload.assign(p + kHeaderSize, p + kHeaderSize + len);
  drop(total);
  return message_event(std::move(msg));
}

std::vector<uint8_t> encode_gaze_payload(const GazeReply& reply) {
  std::vector<uint8_t> out;
  out.reserve(12);
  put_f32(out, reply.x_cm);
  put_f32(out, reply.y_cm);
  put_u32(out, reply.inference_micros);
  return out;
}

GazeReply parse_gaze_payload(const std::vector<uint8_t>& payload) {
  if (payload.size() != 12) throw Error("gaze payload must be 12 bytes");
  GazeReply r;
  r.x_cm = get_f32(payload.data());
  r.y_cm = get_f32(payload.data() + 4);
  r.inference_micros = get_u32(payload.data() + 8);
  return r;
}

std::vector<uint8_t> encode_frame_payload(const Image& img) {
  if (img.width < 1 || img.height < 1 || img.width > 0xFFFF ||
      img.height > 0xFFFF) {
    throw Error("frame dimensions do not fit the wire format");
  }
  std::vector<uint8_t> out;
  out.reserve(5 + img.pixels.size());
  put_u16(out, static_cast<uint16_t>(img.width));
  put_u16(out, static_cast<uint16_t>(img.height));
  out.push_back(static_cast<uint8_t>(img.format));
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

FrameParseResult parse_frame_message(const std::vector<uint8_t>& payload) {
  FrameParseResult res;
  if (payload.size() < 5) {
    res.error = WireErrorCode::kBadFormat;
    return res;
  }
  const uint16_t w = get_u16(payload.data());
  const uint16_t h = get_u16(payload.data() + 2);
  const uint8_t format = payload[4];
  if (format > 1) {
    res.error = WireErrorCode::kBadFormat;
    return res;
  }
  if (w == 0 || h == 0) {
    res.error = WireErrorCode::kBadDimensions;
    return res;
  }
  const ImageFormat fmt = static_cast<ImageFormat>(format);
  const size_t want =
      static_cast<size_t>(w) * h * (fmt == ImageFormat::kRgb888 ? 3 : 1);
  if (payload.size() - 5 != want) {
    res.error = WireErrorCode::kBadDimensions;
    return res;
  }
  Image img = make_image(w, h, fmt);
  std::copy(payload.begin() + 5, payload.end(), img.pixels.begin());
  res.image = std::move(img);
  return res;
}

std::vector<uint8_t> encode_stats_payload(const StatsReply& reply) {
  std::vector<uint8_t> out;
  out.reserve(12);
  put_u32(out, reply.frames_ok);
  put_u32(out, reply.frames_rejected);
  put_u32(out, reply.last_inference_micros);
  return out;
}

StatsReply parse_stats_payload(const std::vector<uint8_t>& payload) {
  if (payload.size() != 12) throw Error("stats payload must be 12 bytes");
  StatsReply r;
  r.frames_ok = get_u32(payload.data());
  r.frames_rejected = get_u32(payload.data() + 4);
  r.last_inference_micros = get_u32(payload.data() + 8);
  return r;
}

std::vector<uint8_t> encode_error_payload(WireErrorCode code) {
  return {static_cast<uint8_t>(code)};
}

ServeReport device_serve(ByteStream& stream, Engine& eng) {
  ServeReport report;
  StreamDecoder decoder;
  uint8_t chunk[4096];

  const auto send = [&](MessageKind kind, const std::vector<uint8_t>& payload) {
    const std::vector<uint8_t> bytes =
        encode_message(static_cast<uint8_t>(kind), payload);
    stream.write(bytes.data(), bytes.size());
  };
  const auto reject = [&](WireErrorCode code) {
    ++report.frames_rejected;
    send(MessageKind::kError, encode_error_payload(code));
  };

  bool eof = false;
  while (!eof) {
    const size_t n = stream.read(chunk, sizeof(chunk));
    if (n == 0) {
      eof = true;
    } else {
      decoder.push(chunk, n);
    }

    while (auto event = decoder.next()) {
      if (event->diagnostic) {
        switch (*event->diagnostic) {
          case DecodeDiagnostic::kGarbage:
            ++report.garbage_runs;
            break;
          case DecodeDiagnostic::kCrcMismatch:
            ++report.crc_errors;
            break;
          case DecodeDiagnostic::kOversizeLength:
            ++report.oversize_lengths;
            break;
          case DecodeDiagnostic::kUnknownKind:
            ++report.unknown_kinds;
            send(MessageKind::kError,
                 encode_error_payload(WireErrorCode::kUnknownKind));
            break;
        }
        if (wire_log_enabled()) {
          wire_log(std::string("link: ") + diagnostic_name(*event->diagnostic));
        }
        continue;
      }

      const WireMessage& msg = *event->message;
      switch (static_cast<MessageKind>(msg.kind)) {
        case MessageKind::kFrame: {
          FrameParseResult parsed = parse_frame_message(msg.payload);
          if (!parsed.image) {
            reject(parsed.error);
            break;
          }
          const Image& frame = *parsed.image;
          PipelineConfig cfg = eng.config;
          cfg.capture_width = frame.width;
          cfg.capture_height = frame.height;
          cfg.crop_side =
              std::min({cfg.crop_side, frame.width, frame.height});
          try {
            const GazeEstimate est = predict(eng, frame, cfg);
            ++report.frames_ok;
            report.last_inference_micros =
                static_cast<uint32_t>(eng.last_inference_micros);
            GazeReply reply{est.x_cm, est.y_cm, report.last_inference_micros};
            send(MessageKind::kGaze, encode_gaze_payload(reply));
          } catch (const Error& e) {
            if (wire_log_enabled()) {
              wire_log(std::string("pipeline rejected a frame: ") + e.what());
            }
            reject(WireErrorCode::kPipeline);
          }
          break;
        }
        case MessageKind::kStats: {
          ++report.stats_requests;
          StatsReply reply;
          reply.frames_ok = static_cast<uint32_t>(report.frames_ok);
          reply.frames_rejected = static_cast<uint32_t>(report.frames_rejected);
          reply.last_inference_micros = report.last_inference_micros;
          send(MessageKind::kStats, encode_stats_payload(reply));
          break;
        }
        case MessageKind::kGaze:
        case MessageKind::kError: {
          // Known kinds that are not requests; tell the peer we had no use
          // for them.
          ++report.unknown_kinds;
          send(MessageKind::kError,
               encode_error_payload(WireErrorCode::kUnknownKind));
          break;
        }
      }
    }
  }
  return report;
}

Image render_overlay(const Image& frame, const GazeEstimate& est,
                     const OverlayGeometry& geom) {
  if (geom.screen_width_cm <= 0.0 || geom.screen_height_cm <= 0.0) {
    throw DimensionError("overlay screen dimensions must be positive");
  }
  const int width = frame.width;
  const int height = frame.height;

  Image img = make_image(width, height, ImageFormat::kRgb888);
  if (frame.format == ImageFormat::kRgb888) {
    img.pixels = frame.pixels;
  } else {
    for (size_t p = 0; p < frame.pixels.size(); ++p) {
      img.pixels[3 * p] = img.pixels[3 * p + 1] = img.pixels[3 * p + 2] =
          frame.pixels[p];
    }
  }

  const double fx = (est.x_cm - geom.origin_x_cm) / geom.screen_width_cm;
  const double fy = (est.y_cm - geom.origin_y_cm) / geom.screen_height_cm;
  const long cx = std::clamp<long>(std::lround(fx * width), 0, width - 1);
  const long cy = std::clamp<long>(std::lround(fy * height), 0, height - 1);
  const long r = std::max(3l, std::lround(0.02 * width));

  for (long y = std::max(0l, cy - r); y <= std::min<long>(height - 1, cy + r);
       ++y) {
    for (long x = std::max(0l, cx - r); x <= std::min<long>(width - 1, cx + r);
         ++x) {
      const long dx = x - cx;
      const long dy = y - cy;
      if (dx * dx + dy * dy <= r * r) {
        uint8_t* px =
            img.pixels.data() + (static_cast<size_t>(y) * width + x) * 3;
        px[0] = 0;
        px[1] = 0;
        px[2] = 255;
      }
    }
  }
  return img;
}

void host_overlay(const Image& frame, const GazeEstimate& est,
                  const OverlayGeometry& geom, const std::string& out_path) {
  write_ppm(render_overlay(frame, est, geom), out_path);
}

bool wire_log_enabled() {
  const char* v = std::getenv("GAZE_LOG");
  return v != nullptr && v[0] != '\0' && !(v[0] == '0' && v[1] == '\0');
}

void wire_log(const std::string& line) {
  std::fprintf(stderr, "[gaze] %s\n", line.c_str());
}

}  // namespace ttks
