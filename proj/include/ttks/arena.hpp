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
// Static activation memory planning. The runtime never allocates per layer:
// every activation gets a fixed offset into one arena, computed ahead of time
// from the layer chain's lifetimes.

#ifndef TTKS_ARENA_HPP_
#define TTKS_ARENA_HPP_

#include <cstdint>
#include <vector>

#include "ttks/model.hpp"

namespace ttks {

// Hard cap on the activation arena, matching the memory envelope of the
// microcontroller targets this runtime is sized for.
inline constexpr uint32_t kArenaBudgetBytes = 131072;

struct ArenaPlan {
  // Byte offset of each activation: index 0 is the network input, index i+1
  // the output of layer i. Offsets are 4-byte aligned.
  std::vector<uint32_t> offsets;
  // Byte size of each activation, same indexing as `offsets`.
  std::vector<uint32_t> sizes;
  uint32_t peak_bytes = 0;
};

// Byte size of every activation along the chain (input first).
std::vector<uint32_t> activation_sizes(const Model& m);

// Places a linear chain of activations where layer i reads activation i and
// writes activation i+1, so only neighbouring activations are ever live at
// once. Uses first-fit decreasing (ties broken by activation index) with
// 4-byte aligned offsets. Throws BudgetError when the resulting peak exceeds
// `budget`; the error carries the peak and the step with the largest live set.
ArenaPlan plan_arena_chain(const std::vector<uint32_t>& sizes, uint32_t budget);

// Plans `m`'s activations against kArenaBudgetBytes.
ArenaPlan plan_arena(const Model& m);

}  // namespace ttks

#endif  // TTKS_ARENA_HPP_
