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

#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "support/builders.hpp"
#include "support/oracles.hpp"
#include "ttks/arena.hpp"
#include "ttks/pipeline.hpp"

using namespace ttks;

namespace {

// Brute-force overlap check: activation i is live for steps
// [max(0, i-1), min(i, n-2)]; two blocks whose lifetimes intersect must not
// share a byte.
void check_no_live_overlap(const ArenaPlan& plan) {
  const size_t n = plan.sizes.size();
  for (size_t i = 0; i < n; ++i) {
    const int lo_i = static_cast<int>(i) - 1 < 0 ? 0 : static_cast<int>(i) - 1;
    const int hi_i = std::min<int>(static_cast<int>(i), static_cast<int>(n) - 2);
    for (size_t j = i + 1; j < n; ++j) {
      const int lo_j = static_cast<int>(j) - 1;
      const int hi_j = std::min<int>(static_cast<int>(j), static_cast<int>(n) - 2);
      const bool live_together = lo_j <= hi_i && lo_i <= hi_j;
      if (!live_together) continue;
      const uint64_t a0 = plan.offsets[i], a1 = a0 + plan.sizes[i];
      const uint64_t b0 = plan.offsets[j], b1 = b0 + plan.sizes[j];
      REQUIRE((a1 <= b0 || b1 <= a0));
    }
  }
}

void check_plan_shape(const ArenaPlan& plan,
                      const std::vector<uint32_t>& sizes) {
  REQUIRE(plan.sizes == sizes);
  REQUIRE(plan.offsets.size() == sizes.size());
  uint64_t peak = 0;
  for (size_t i = 0; i < sizes.size(); ++i) {
    CHECK(plan.offsets[i] % 4 == 0);
    peak = std::max<uint64_t>(peak, plan.offsets[i] + sizes[i]);
  }
  CHECK(plan.peak_bytes == peak);
}

}  // namespace

TEST_SUITE("arena") {

TEST_CASE("reference model peak is 110592 and exactly the lifetime bound") {
  const Model m = build_reference_model(1);
  const std::vector<uint32_t> sizes = activation_sizes(m);
  // Input 96x96x2 plus one activation per layer, real32 head at the end.
  REQUIRE(sizes.size() == 15);
  CHECK(sizes[0] == 96 * 96 * 2);
  CHECK(sizes[1] == 48 * 48 * 16);
  CHECK(sizes[3] == 48 * 48 * 32);
  CHECK(sizes.back() == 2 * sizeof(float));

  const ArenaPlan plan = plan_arena(m);
  check_plan_shape(plan, sizes);
  check_no_live_overlap(plan);
  CHECK(plan.peak_bytes == 110592);
  CHECK(plan.peak_bytes == oracle::arena_lower_bound(sizes));
  CHECK(plan.peak_bytes <= kArenaBudgetBytes);
  // The widest moment: the 16-channel stage feeding the 32-channel stage.
  CHECK(oracle::arena_lower_bound(sizes) ==
        uint64_t{48 * 48 * 16} + uint64_t{48 * 48 * 32});
}

TEST_CASE("an over-budget chain reports peak and the widest step") {
  // The reference chain with the first pointwise stage widened from 32 to
  // 128 channels: 48*48*(32 + 128) bytes live at once, far over budget.
  const std::vector<uint32_t> sizes = {
      96 * 96 * 2, 48 * 48 * 16, 48 * 48 * 16, 48 * 48 * 32, 48 * 48 * 128};
  try {
    plan_arena_chain(sizes, kArenaBudgetBytes);
    FAIL("expected BudgetError");
  } catch (const BudgetError& e) {
    CHECK(e.peak_bytes() == 48 * 48 * 32 + 48 * 48 * 128);
    CHECK(e.peak_bytes() == 368640);
    CHECK(e.layer_index() == 3);  // the step where both wide stages are live
  }
}

TEST_CASE("mini model plans under budget") {
  const Model m = fixtures::mini_model(2);
  const ArenaPlan plan = plan_arena(m);
  check_plan_shape(plan, activation_sizes(m));
  check_no_live_overlap(plan);
  CHECK(plan.peak_bytes >= oracle::arena_lower_bound(activation_sizes(m)));
  CHECK(plan.peak_bytes <= kArenaBudgetBytes);
}

TEST_CASE("random chains: aligned, overlap-free, peak >= lifetime bound") {
  std::mt19937 rng(401);
  for (int t = 0; t < 2000; ++t) {
    const int n = 2 + static_cast<int>(rng() % 12);
    std::vector<uint32_t> sizes(n);
    for (auto& s : sizes) s = 1 + rng() % 5000;
    const uint64_t lb = oracle::arena_lower_bound(sizes);
    const ArenaPlan plan = plan_arena_chain(sizes, 1u << 30);
    check_plan_shape(plan, sizes);
    check_no_live_overlap(plan);
    CHECK(plan.peak_bytes >= lb);
    // Upper bound: never worse than giving every activation its own
    // aligned slot (reuse can only shrink the footprint).
    uint64_t total = 0;
    for (const uint32_t s : sizes) total += (s + 3u) & ~3u;
    CHECK(plan.peak_bytes <= total);
  }
}

TEST_CASE("planning is deterministic") {
  std::mt19937 rng(409);
  std::vector<uint32_t> sizes(9);
  for (auto& s : sizes) s = 1 + rng() % 100000;
  const ArenaPlan a = plan_arena_chain(sizes, 1u << 30);
  const ArenaPlan b = plan_arena_chain(sizes, 1u << 30);
  CHECK(a.offsets == b.offsets);
  CHECK(a.peak_bytes == b.peak_bytes);
}

TEST_CASE("shortest legal chain packs both blocks") {
  // Input and output are simultaneously live, so the plan stacks them with
  // 4-byte alignment between the blocks.
  const ArenaPlan plan = plan_arena_chain({123, 45}, 1024);
  check_no_live_overlap(plan);
  CHECK(plan.peak_bytes == 169);  // align_up(123, 4) + 45
  CHECK_THROWS_AS(plan_arena_chain({123}, 1024), Error);
  CHECK_THROWS_AS(plan_arena_chain({}, 1024), Error);
}

}  // TEST_SUITE
