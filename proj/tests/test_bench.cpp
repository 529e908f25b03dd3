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

#include "doctest.h"
#include "support/builders.hpp"
#include "ttks/bench.hpp"

using namespace ttks;

TEST_SUITE("bench") {

TEST_CASE("summarize_micros uses nearest-rank percentiles") {
  std::vector<uint64_t> ten;
  for (uint64_t i = 1; i <= 10; ++i) ten.push_back(i * 1000);
  std::shuffle(ten.begin(), ten.end(), std::mt19937(701));
  const LatencyStats s = summarize_micros(ten);
  CHECK(s.mean_ms == doctest::Approx(5.5));
  CHECK(s.p50_ms == doctest::Approx(5.0));   // ceil(0.5 * 10) = rank 5
  CHECK(s.p95_ms == doctest::Approx(10.0));  // ceil(0.95 * 10) = rank 10

  const LatencyStats one = summarize_micros({7000});
  CHECK(one.mean_ms == doctest::Approx(7.0));
  CHECK(one.p50_ms == doctest::Approx(7.0));
  CHECK(one.p95_ms == doctest::Approx(7.0));

  // 20 samples: p95 is rank ceil(19) = 19, the second largest.
  std::vector<uint64_t> twenty;
  for (uint64_t i = 1; i <= 20; ++i) twenty.push_back(i * 100);
  const LatencyStats t = summarize_micros(twenty);
  CHECK(t.p95_ms == doctest::Approx(1.9));
}

TEST_CASE("injected clock produces exact latencies") {
  std::mt19937 rng(703);
  Engine eng = make_engine(fixtures::mini_model(1), 128, 96, 0, "mini");
  const std::vector<Image> frames = {
      fixtures::random_frame(rng, 128, 96, ImageFormat::kGray8)};

  // Four reads per iteration, 1000 us apart: end-to-end spans three steps,
  // inference exactly one.
  FixedStepClock clock(1000);
  const BenchReport r = run_bench(eng, frames, 5, 2, clock);
  CHECK(r.iterations == 5);
  CHECK(r.warmup == 2);
  CHECK(r.end_to_end.mean_ms == doctest::Approx(3.0));
  CHECK(r.end_to_end.p50_ms == doctest::Approx(3.0));
  CHECK(r.end_to_end.p95_ms == doctest::Approx(3.0));
  CHECK(r.inference.mean_ms == doctest::Approx(1.0));
  CHECK(r.fps == doctest::Approx(1000.0 / 3.0));
  CHECK(r.mac_per_second ==
        doctest::Approx(static_cast<double>(r.total_macs) / 1e-3));
  CHECK(r.clock_hz == 0.0);
  CHECK(r.mac_per_cycle == 0.0);
  CHECK(r.params == count_params(eng.model));
  CHECK(r.total_macs == count_macs(eng.model));
  CHECK(r.arena_peak_bytes == eng.plan.peak_bytes);
}

TEST_CASE("reports are byte-identical under the same injected clock") {
  std::mt19937 rng(709);
  Engine eng = make_engine(fixtures::mini_model(2), 128, 96, 0, "mini");
  std::vector<Image> frames;
  for (int i = 0; i < 3; ++i) {
    frames.push_back(fixtures::random_frame(rng, 128, 96,
                                            ImageFormat::kGray8));
  }
  FixedStepClock c1(250), c2(250);
  const BenchReport r1 = run_bench(eng, frames, 8, 3, c1, 1.56e8);
  const BenchReport r2 = run_bench(eng, frames, 8, 3, c2, 1.56e8);
  CHECK(render_report_json(r1) == render_report_json(r2));
  CHECK(render_report_table(r1) == render_report_table(r2));
}

TEST_CASE("mac-per-cycle divides mac throughput by the target clock") {
  std::mt19937 rng(719);
  Engine eng = make_engine(fixtures::mini_model(3), 128, 96, 0, "mini");
  const std::vector<Image> frames = {
      fixtures::random_frame(rng, 128, 96, ImageFormat::kGray8)};
  FixedStepClock clock(10000);  // inference pinned at 10 ms
  const double hz = 1.56e8;
  const BenchReport r = run_bench(eng, frames, 2, 0, clock, hz);
  CHECK(r.clock_hz == hz);
  CHECK(r.mac_per_cycle ==
        doctest::Approx(static_cast<double>(r.total_macs) / (0.01 * hz)));
  // Dimensional sanity pinning the definition: a hypothetical 5.3e6-MAC
  // model at 10 ms and 156 MHz comes out near 3.4 MAC/cycle -- the quotient
  // (5.3e6 / (0.01 * 1.56e8)), an O(1) number, not an O(1e-3) one.
  CHECK(5.3e6 / (0.01 * 1.56e8) == doctest::Approx(3.397).epsilon(0.01));
}

TEST_CASE("json rendering omits the clock fields when no clock was given") {
  std::mt19937 rng(727);
  Engine eng = make_engine(fixtures::mini_model(4), 128, 96, 0, "mini");
  const std::vector<Image> frames = {
      fixtures::random_frame(rng, 128, 96, ImageFormat::kGray8)};
  FixedStepClock c1(100), c2(100);
  const BenchReport plain = run_bench(eng, frames, 2, 0, c1);
  const BenchReport clocked = run_bench(eng, frames, 2, 0, c2, 2.0e8);

  const std::string js_plain = render_report_json(plain);
  CHECK(js_plain.find("clock_hz") == std::string::npos);
  CHECK(js_plain.find("mac_per_cycle") == std::string::npos);
  CHECK(js_plain.find("\"model\"") != std::string::npos);
  CHECK(js_plain.find('\n') == std::string::npos);  // single line

  const std::string js_clocked = render_report_json(clocked);
  CHECK(js_clocked.find("clock_hz") != std::string::npos);
  CHECK(js_clocked.find("mac_per_cycle") != std::string::npos);
}

TEST_CASE("json round-trips through the parser") {
  std::mt19937 rng(733);
  Engine eng = make_engine(fixtures::mini_model(5), 128, 96, 0, "round");
  const std::vector<Image> frames = {
      fixtures::random_frame(rng, 128, 96, ImageFormat::kGray8)};
  FixedStepClock clock(500);
  for (const double hz : {0.0, 1.56e8}) {
    const BenchReport r = run_bench(eng, frames, 4, 1, clock, hz);
    const BenchReport back = parse_report_json(render_report_json(r));
    CHECK(back.model_name == r.model_name);
    CHECK(back.iterations == r.iterations);
    CHECK(back.warmup == r.warmup);
    CHECK(back.params == r.params);
    CHECK(back.total_macs == r.total_macs);
    CHECK(back.arena_peak_bytes == r.arena_peak_bytes);
    CHECK(back.end_to_end.mean_ms == doctest::Approx(r.end_to_end.mean_ms));
    CHECK(back.inference.p95_ms == doctest::Approx(r.inference.p95_ms));
    CHECK(back.fps == doctest::Approx(r.fps));
    CHECK(back.clock_hz == doctest::Approx(r.clock_hz));
    CHECK(back.mac_per_cycle == doctest::Approx(r.mac_per_cycle));
  }
  CHECK_THROWS_AS(parse_report_json("not json at all"), Error);
  CHECK_THROWS_AS(parse_report_json("{}"), Error);
}

TEST_CASE("table layout carries both sections and dashes absent fields") {
  std::mt19937 rng(739);
  Engine eng = make_engine(fixtures::mini_model(6), 128, 96, 0, "tbl");
  const std::vector<Image> frames = {
      fixtures::random_frame(rng, 128, 96, ImageFormat::kGray8)};
  FixedStepClock clock(100);
  const BenchReport r = run_bench(eng, frames, 2, 0, clock);
  const std::string table = render_report_table(r);
  CHECK(table.find("=== End-to-End Evaluation ===") != std::string::npos);
  CHECK(table.find("=== Inference Evaluation ===") != std::string::npos);
  CHECK(table.find("Latency [ms]") != std::string::npos);
  CHECK(table.find("Arena peak [B]") != std::string::npos);
  CHECK(table.find("MAC/Cycle") != std::string::npos);
  CHECK(table.find("Clock [Hz]") != std::string::npos);
  CHECK(table.find("tbl") != std::string::npos);
  // Without a clock the MAC/Cycle and Clock rows render "-".
  bool dashed = false;
  size_t pos = table.find("MAC/Cycle");
  if (pos != std::string::npos) {
    const size_t eol = table.find('\n', pos);
    dashed = table.substr(pos, eol - pos).find('-') != std::string::npos;
  }
  CHECK(dashed);
}

TEST_CASE("run_bench argument validation") {
  std::mt19937 rng(743);
  Engine eng = make_engine(fixtures::mini_model(7), 128, 96);
  const std::vector<Image> none;
  const std::vector<Image> one = {
      fixtures::random_frame(rng, 128, 96, ImageFormat::kGray8)};
  FixedStepClock clock(10);
  CHECK_THROWS_AS(run_bench(eng, none, 1, 0, clock), Error);
  CHECK_THROWS_AS(run_bench(eng, one, 0, 0, clock), Error);
  CHECK_THROWS_AS(run_bench(eng, one, 1, -1, clock), Error);
}

}  // TEST_SUITE
