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
// Host <-> device link. Every message is framed as
//
//   u8 sync (0xA5) | u8 kind | u32 payload length (LE, < 2^24) |
//   payload | u16 CRC (LE)
//
// where the CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection,
// "123456789" -> 0x29B1) covers kind, length and payload. The decoder is
// byte-stream oriented: it tolerates garbage between frames, resynchronizes
// after a corrupted frame by rescanning from the byte after the sync, and
// reports what it skipped.

#ifndef TTKS_WIRE_HPP_
#define TTKS_WIRE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ttks/image.hpp"
#include "ttks/pipeline.hpp"

namespace ttks {

inline constexpr uint8_t kSyncByte = 0xA5;
inline constexpr uint32_t kMaxWirePayload = (1u << 24) - 1;

enum class MessageKind : uint8_t {
  kFrame = 0x01,  // host -> device: camera frame
  kGaze = 0x02,   // device -> host: estimate reply
  kStats = 0x03,  // host -> device: empty request; device -> host: counters
  kError = 0x7F,  // device -> host: rejection code
};

bool is_known_kind(uint8_t kind);

struct WireMessage {
  uint8_t kind = 0;
  std::vector<uint8_t> payload;
};

uint16_t crc16_ccitt_false(const uint8_t* data, size_t size);

// Frames a payload; throws Error when the payload exceeds kMaxWirePayload.
std::vector<uint8_t> encode_message(uint8_t kind,
                                    const std::vector<uint8_t>& payload);

enum class DecodeDiagnostic : uint8_t {
  kGarbage,         // bytes skipped hunting for a sync byte
  kCrcMismatch,     // framed bytes failed the checksum
  kOversizeLength,  // declared payload length above the cap
  kUnknownKind,     // well-framed message with an unassigned kind byte
};

const char* diagnostic_name(DecodeDiagnostic d);

// Exactly one of `message` / `diagnostic` is set.
struct DecodeEvent {
  std::optional<WireMessage> message;
  std::optional<DecodeDiagnostic> diagnostic;
};

// Incremental frame scanner. Push arbitrary byte chunks, then drain next()
// until it returns nullopt (meaning: more bytes needed). A corrupted frame
// consumes only its sync byte, so a genuine frame overlapping the corrupt
// span is still found.
class StreamDecoder {
 public:
  void push(const uint8_t* data, size_t size);
  void push(const std::vector<uint8_t>& bytes);
  std::optional<DecodeEvent> next();

  // Bytes currently buffered (mostly for tests).
  size_t pending() const { return buf_.size() - head_; }

 private:
  void drop(size_t n);

  std::vector<uint8_t> buf_;
  size_t head_ = 0;
};

// --- payload codecs ---------------------------------------------------------

struct GazeReply {
  float x_cm = 0.0f;
  float y_cm = 0.0f;
  uint32_t inference_micros = 0;
};

std::vector<uint8_t> encode_gaze_payload(const GazeReply& reply);
GazeReply parse_gaze_payload(const std::vector<uint8_t>& payload);

// Frame payload: u16 width, u16 height, u8 format (0 = gray, 1 = RGB888),
// then width * height * channels pixel bytes.
std::vector<uint8_t> encode_frame_payload(const Image& img);

enum class WireErrorCode : uint8_t {
  kBadDimensions = 1,
  kBadFormat = 2,
  kPipeline = 3,
  kUnknownKind = 4,
};

struct FrameParseResult {
  std::optional<Image> image;
  WireErrorCode error = WireErrorCode::kBadFormat;  // valid when !image
};

FrameParseResult parse_frame_message(const std::vector<uint8_t>& payload);

struct StatsReply {
  uint32_t frames_ok = 0;
  uint32_t frames_rejected = 0;
  uint32_t last_inference_micros = 0;
};

std::vector<uint8_t> encode_stats_payload(const StatsReply& reply);
StatsReply parse_stats_payload(const std::vector<uint8_t>& payload);

std::vector<uint8_t> encode_error_payload(WireErrorCode code);

// --- device loop -------------------------------------------------------------

// Blocking byte transport; read() returns 0 at end of stream.
class ByteStream {
 public:
  virtual ~ByteStream() = default;
  virtual size_t read(uint8_t* out, size_t max) = 0;
  virtual void write(const uint8_t* data, size_t size) = 0;
};

struct ServeReport {
  uint64_t frames_ok = 0;
  uint64_t frames_rejected = 0;
  uint64_t stats_requests = 0;
  uint64_t unknown_kinds = 0;
  uint64_t crc_errors = 0;
  uint64_t garbage_runs = 0;
  uint64_t oversize_lengths = 0;
  uint32_t last_inference_micros = 0;
};

// Runs the device side until the stream ends: FRAME -> GAZE (or ERROR),
// STATS -> counters. Frames whose dimensions differ from the engine's
// configuration are served with a per-frame configuration (capture = frame
// size, crop = min(configured crop, frame dims)).
ServeReport device_serve(ByteStream& stream, Engine& eng);

// --- host-side overlay --------------------------------------------------------

// Places the camera-relative estimate on a screen of the given physical size.
// origin_*_cm is the screen's top-left corner in the estimate's coordinate
// system (camera at the screen's top edge midpoint by default).
struct OverlayGeometry {
  double screen_width_cm = 31.0;
  double screen_height_cm = 17.4;
  double origin_x_cm = -15.5;
  double origin_y_cm = 0.0;
};

// Copy of `frame` (promoted to RGB) with a filled blue disc of radius
// max(3, round(0.02 * width)) at the estimate's screen position, clamped onto
// the canvas. Pixels outside the disc are untouched.
Image render_overlay(const Image& frame, const GazeEstimate& est,
                     const OverlayGeometry& geom = {});

// render_overlay + binary PPM (P6) write.
void host_overlay(const Image& frame, const GazeEstimate& est,
                  const OverlayGeometry& geom, const std::string& out_path);

// Diagnostics logging, enabled by a non-empty GAZE_LOG environment variable
// (value "0" disables). Writes one line to stderr.
bool wire_log_enabled();
void wire_log(const std::string& line);

}  // namespace ttks

#endif  // TTKS_WIRE_HPP_
