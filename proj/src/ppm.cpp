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

#include "ttks/ppm.hpp"

#include <cstdio>
#include <cstring>

#include "ttks/errors.hpp"

namespace ttks {
namespace {

struct Cursor {
  const uint8_t* data;
  size_t size;
  size_t pos = 0;

  bool eof() const { return pos >= size; }
  uint8_t peek() const { return data[pos]; }

  // Skips whitespace and '#' comments (which run to end of line).
  void skip_space() {
    while (!eof()) {
      const uint8_t c = peek();
      if (c == '#') {
        while (!eof() && peek() != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos;
      } else {
        break;
      }
    }
  }

  int number() {
    skip_space();
    if (eof() || peek() < '0' || peek() > '9') {
      throw Error("ppm: expected a number in the header");
    }
    long v = 0;
    while (!eof() && peek() >= '0' && peek() <= '9') {
      v = v * 10 + (peek() - '0');
      if (v > 1000000) throw Error("ppm: header number out of range");
      ++pos;
    }
    return static_cast<int>(v);
  }
};

}  // namespace

std::vector<uint8_t> render_ppm(const Image& img) {
  if (img.width < 1 || img.height < 1 ||
      img.pixels.size() != img.expected_bytes()) {
    throw DimensionError("ppm: malformed image");
  }
  char header[64];
  const int n = std::snprintf(header, sizeof(header), "%s\n%d %d\n255\n",
                              img.format == ImageFormat::kRgb888 ? "P6" : "P5",
                              img.width, img.height);
  std::vector<uint8_t> out(header, header + n);
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

Image parse_ppm(const uint8_t* data, size_t size) {
  if (size < 2 || data[0] != 'P' || (data[1] != '5' && data[1] != '6')) {
    throw Error("ppm: not a binary P5/P6 file");
  }
  const ImageFormat format =
      data[1] == '6' ? ImageFormat::kRgb888 : ImageFormat::kGray8;
  Cursor cur{data, size, 2};
  const int width = cur.number();
  const int height = cur.number();
  const int maxval = cur.number();
  if (width < 1 || height < 1) throw Error("ppm: bad dimensions");
  if (maxval != 255) throw Error("ppm: only 8-bit samples are supported");
  if (cur.eof()) throw Error("ppm: truncated header");
  ++cur.pos;  // exactly one whitespace byte separates header and samples

  Image img = make_image(width, height, format);
  if (size - cur.pos < img.pixels.size()) throw Error("ppm: truncated pixels");
  std::memcpy(img.pixels.data(), data + cur.pos, img.pixels.size());
  return img;
}

Image parse_ppm(const std::vector<uint8_t>& bytes) {
  return parse_ppm(bytes.data(), bytes.size());
}

void write_ppm(const Image& img, const std::string& path) {
  const std::vector<uint8_t> bytes = render_ppm(img);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open " + path + " for writing");
  const size_t written = std::fwrite(bytes.data(), 1, bytes.size(), f);
  const bool ok = written == bytes.size() && std::fclose(f) == 0;
  if (!ok) throw IoError("short write to " + path);
}

Image read_ppm(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open " + path);
  std::vector<uint8_t> bytes;
  uint8_t buf[65536];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) {
    bytes.insert(bytes.end(), buf, buf + n);
  }
  const bool bad = std::ferror(f) != 0;
  std::fclose(f);
  if (bad) throw IoError("error reading " + path);
  return parse_ppm(bytes);
}

}  // namespace ttks
