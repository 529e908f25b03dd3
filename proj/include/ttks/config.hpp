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

#ifndef TTKS_CONFIG_HPP_
#define TTKS_CONFIG_HPP_

#include <string>
#include <string_view>

namespace ttks {

struct RunConfig {
  int capture_width = 320;
  int capture_height = 240;
  int crop_side = 0;  // 0 selects the largest centered square
  std::string model_path;
};

// `key = value` lines; '#' starts a comment; blank lines are fine. Unknown
// keys and unparsable values raise ConfigError.
RunConfig parse_run_config(std::string_view text);

RunConfig load_run_config(const std::string& path);

}  // namespace ttks

#endif  // TTKS_CONFIG_HPP_
