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

#ifndef TTKS_PPM_HPP_
#define TTKS_PPM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ttks/image.hpp"

namespace ttks {

// Binary netpbm: P5 for grayscale, P6 for RGB, 8-bit samples only.
std::vector<uint8_t> render_ppm(const Image& img);
Image parse_ppm(const uint8_t* data, size_t size);  // throws Error
Image parse_ppm(const std::vector<uint8_t>& bytes);

void write_ppm(const Image& img, const std::string& path);  // throws IoError
Image read_ppm(const std::string& path);

}  // namespace ttks

#endif  // TTKS_PPM_HPP_
