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

#ifndef TTKS_BENCH_HPP_
#define TTKS_BENCH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ttks/image.hpp"
#include "ttks/pipeline.hpp"

namespace ttks {

// Time source used by the harness. Injectable so reports can be reproduced
// bit-for-bit in tests.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual uint64_t now_micros() = 0;
};

class SteadyClock : public Clock {
 public:
  uint64_t now_micros() override;
};

// Advances by a fixed step on every reading; makes every measured duration
// equal to `step_micros`.
class FixedStepClock : public Clock {
 public:
  explicit FixedStepClock(uint64_t step_micros, uint64_t start_micros = 0)
      : now_(start_micros), step_(step_micros) {}
  uint64_t now_micros() override {
    const uint64_t v = now_;
    now_ += step_;
    return v;
  }

 private:
  uint64_t now_;
  uint64_t step_;
};

struct LatencyStats {
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
};

// Nearest-rank percentiles (index ceil(q * n) - 1 on the sorted samples).
LatencyStats summarize_micros(std::vector<uint64_t> samples);

struct BenchReport {
  std::string model_name;
  int iterations = 0;
  int warmup = 0;
  uint64_t params = 0;
  uint64_t total_macs = 0;
  uint32_t arena_peak_bytes = 0;
  LatencyStats end_to_end;  // preprocess + execute + postprocess
  LatencyStats inference;   // execute only
  double fps = 0.0;
  double mac_per_second = 0.0;
  // Both stay 0 when no target clock rate was supplied; they then render as
  // "-" in the table and are omitted from the JSON document.
  double clock_hz = 0.0;
  double mac_per_cycle = 0.0;
};

// Cycles through `frames`, discarding `warmup` runs and then timing
// `iterations` runs, reading `clock` at each stage boundary. `clock_hz`
// (optional, pass 0 to skip) is the processor frequency MAC/cycle is derived
// against.
BenchReport run_bench(Engine& eng, const std::vector<Image>& frames,
                      int iterations, int warmup, Clock& clock,
                      double clock_hz = 0.0);

// Fixed-layout text table ("End-to-End Evaluation" / "Inference Evaluation").
std::string render_report_table(const BenchReport& report);

// Single-line JSON document.
std::string render_report_json(const BenchReport& report);

// Inverse of render_report_json; throws Error on documents it did not write.
BenchReport parse_report_json(const std::string& text);

// Keeps a computed value alive so the optimizer cannot drop a benchmark body.
template <typename T>
inline void do_not_optimize(const T& value) {
#if defined(__GNUC__) || defined(__clang__)
  asm volatile("" : : "g"(&value) : "memory");
#else
  volatile const T* sink = &value;
  (void)sink;
#endif
}

}  // namespace ttks

#endif  // TTKS_BENCH_HPP_
