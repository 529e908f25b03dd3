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

#include "ttks/arena.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "ttks/errors.hpp"

namespace ttks {
namespace {

constexpr uint32_t kAlign = 4;

uint32_t align_up(uint32_t v) { return (v + (kAlign - 1)) & ~(kAlign - 1); }

struct Block {
  uint32_t offset;
  uint32_t size;
  int lo;  // first step this activation is live
  int hi;  // last step this activation is live
};

}  // namespace

std::vector<uint32_t> activation_sizes(const Model& m) {
  const auto dims = activation_dims(m);
  std::vector<uint32_t> sizes;
  sizes.reserve(dims.size());
  for (size_t i = 0; i < dims.size(); ++i) {
    uint64_t numel = 1;
    for (uint32_t d : dims[i]) numel *= d;
    const ElementKind kind = i == 0 ? m.tensors[m.input_spec].kind
                                    : m.tensors[m.layers[i - 1].out_spec].kind;
    const uint64_t bytes = numel * element_size(kind);
    if (bytes > 0xFFFFFFFFull) throw Error("activation too large");
    sizes.push_back(static_cast<uint32_t>(bytes));
  }
  return sizes;
}

ArenaPlan plan_arena_chain(const std::vector<uint32_t>& sizes, uint32_t budget) {
  if (sizes.size() < 2) throw Error("arena chain needs at least two activations");
  const int n = static_cast<int>(sizes.size());
  const int last_step = n - 2;  // steps 0 .. n-2, one per layer

  std::vector<Block> blocks(sizes.size());
  for (int j = 0; j < n; ++j) {
    blocks[j].size = sizes[j];
    blocks[j].lo = std::max(0, j - 1);
    blocks[j].hi = std::min(j, last_step);
  }

  std::vector<int> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
    return a < b;
  });

  ArenaPlan plan;
  plan.offsets.assign(sizes.size(), 0);
  plan.sizes = sizes;

  std::vector<int> placed;
  for (int j : order) {
    // Blocks whose lifetime intersects ours, in address order.
    std::vector<int> conflicts;
    for (int k : placed) {
      if (blocks[j].lo <= blocks[k].hi && blocks[k].lo <= blocks[j].hi) {
        conflicts.push_back(k);
      }
    }
    std::sort(conflicts.begin(), conflicts.end(), [&](int a, int b) {
      return blocks[a].offset < blocks[b].offset;
    });

    uint32_t candidate = 0;
    for (int k : conflicts) {
      if (candidate + blocks[j].size <= blocks[k].offset) break;
      candidate = std::max(candidate, align_up(blocks[k].offset + blocks[k].size));
    }
    blocks[j].offset = candidate;
    plan.offsets[j] = candidate;
    plan.peak_bytes = std::max(plan.peak_bytes, candidate + blocks[j].size);
    placed.push_back(j);
  }

  if (plan.peak_bytes > budget) {
    // Report the step whose live set is largest; that is where the chain is
    // irreducibly too big, independent of placement.
    uint64_t worst_sum = 0;
    int worst_step = 0;
    for (int s = 0; s <= last_step; ++s) {
      uint64_t sum = 0;
      for (int j = 0; j < n; ++j) {
        if (blocks[j].lo <= s && s <= blocks[j].hi) sum += sizes[j];
      }
      if (sum > worst_sum) {
        worst_sum = sum;
        worst_step = s;
      }
    }
    throw BudgetError(plan.peak_bytes, static_cast<size_t>(worst_step),
                      "arena peak " + std::to_string(plan.peak_bytes) +
                          " bytes exceeds the " + std::to_string(budget) +
                          "-byte budget (largest live set at step " +
                          std::to_string(worst_step) + ")");
  }
  return plan;
}

ArenaPlan plan_arena(const Model& m) {
  const auto sizes = activation_sizes(m);
  try {
    return plan_arena_chain(sizes, kArenaBudgetBytes);
  } catch (const BudgetError& e) {
    const size_t i = e.layer_index();
    const char* name =
        i < m.layers.size() ? layer_kind_name(m.layers[i].kind) : "?";
    throw BudgetError(e.peak_bytes(), i,
                      "arena peak " + std::to_string(e.peak_bytes()) +
                          " bytes exceeds the " +
                          std::to_string(kArenaBudgetBytes) +
                          "-byte budget; largest live set while running layer " +
                          std::to_string(i) + " (" + name + ")");
  }
}

}  // namespace ttks
