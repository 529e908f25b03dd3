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

#include "ttks/config.hpp"

#include <charconv>
#include <cstdio>
#include <vector>

#include "ttks/errors.hpp"

namespace ttks {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

int parse_positive(std::string_view value, int line_no, const char* key) {
  int v = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || v < 1) {
    throw ConfigError("line " + std::to_string(line_no) + ": " + key +
                      " needs a positive integer, got '" + std::string(value) +
                      "'");
  }
  return v;
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  RunConfig cfg;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const size_t nl = text.find('\n');
    std::string_view line =
        nl == std::string_view::npos ? text : text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{}
                                        : text.substr(nl + 1);

    const size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }

    if (key == "capture_width") {
      cfg.capture_width = parse_positive(value, line_no, "capture_width");
    } else if (key == "capture_height") {
      cfg.capture_height = parse_positive(value, line_no, "capture_height");
    } else if (key == "crop_side") {
      cfg.crop_side = parse_positive(value, line_no, "crop_side");
    } else if (key == "model_path") {
      cfg.model_path = std::string(value);
    } else {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": unknown key '" + std::string(key) + "'");
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open " + path);
  std::string text;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) text.append(buf, n);
  const bool bad = std::ferror(f) != 0;
  std::fclose(f);
  if (bad) throw IoError("error reading " + path);
  return parse_run_config(text);
}

}  // namespace ttks
