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
// Acceptance harness. Each criterion prints exactly one PASS/FAIL line with
// its pinned tolerances and must finish inside its wall-clock limit. The
// process exits nonzero if any criterion fails.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "support/builders.hpp"
#include "support/oracles.hpp"
#include "ttks/arena.hpp"
#include "ttks/bench.hpp"
#include "ttks/execute.hpp"
#include "ttks/kernels.hpp"
#include "ttks/pipeline.hpp"
#include "ttks/serialize.hpp"
#include "ttks/wire.hpp"

using namespace ttks;

namespace {

int g_failures = 0;

// Runs one criterion, timing it against `limit_s`. The body returns a detail
// string on success and throws (or appends to `why`) on failure.
void criterion(int index, const char* title, double limit_s,
               const std::function<std::string()>& body) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  std::string detail;
  bool ok = true;
  try {
    detail = body();
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(clock::now() - t0).count();
  if (elapsed >= limit_s) {
    ok = false;
    detail += detail.empty() ? "" : "; ";
    detail += "over time limit";
  }
  std::printf("%s criterion %d: %s (%s) [%.2fs < %.0fs]\n",
              ok ? "PASS" : "FAIL", index, title, detail.c_str(), elapsed,
              limit_s);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void expect(bool cond, const char* what) {
  if (!cond) throw Error(std::string("check failed: ") + what);
}

// --------------------------------------------------------------------------
// 1. Static budget envelope.

std::string c1_budget() {
  const Model m = build_reference_model(1);
  const uint64_t params = count_params(m);
  const uint64_t macs = count_macs(m);
  const size_t encoded = encode_model(m).size();
  expect(params >= 77220 && params <= 94380, "params within +-10%");
  expect(macs >= 4770000 && macs <= 5830000, "MACs within +-10%");
  expect(encoded <= 173056, "encoded size <= 173056 bytes");
  std::ostringstream os;
  os << "params " << params << " in [77220, 94380], MACs " << macs
     << " in [4770000, 5830000], encoded " << encoded << " <= 173056 B";
  return os.str();
}

// --------------------------------------------------------------------------
// 2. Arena plan: exact peak, equal to the brute-force lifetime bound.

std::string c2_arena() {
  const Model m = build_reference_model(1);
  const std::vector<uint32_t> sizes = activation_sizes(m);
  const ArenaPlan plan = plan_arena(m);
  const uint64_t bound = oracle::arena_lower_bound(sizes);

  expect(plan.peak_bytes == 110592, "peak == 110592");
  expect(plan.peak_bytes == bound, "peak equals lifetime lower bound");
  expect(plan.peak_bytes <= kArenaBudgetBytes, "peak <= 131072");
  // Brute force: no two concurrently-live activations may share a byte.
  const size_t n = sizes.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const long hi_i = std::min<long>(static_cast<long>(i),
                                       static_cast<long>(n) - 2);
      const long lo_j = static_cast<long>(j) - 1;
      if (lo_j > hi_i) continue;  // lifetimes disjoint
      const uint64_t a0 = plan.offsets[i], a1 = a0 + sizes[i];
      const uint64_t b0 = plan.offsets[j], b1 = b0 + sizes[j];
      expect(a1 <= b0 || b1 <= a0, "live blocks do not overlap");
    }
  }
  std::ostringstream os;
  os << "peak 110592 == lifetime bound, <= 131072, overlap-free";
  return os.str();
}

// --------------------------------------------------------------------------
// 3. Kernel equivalence: bit-exact vs naive references, dequantized within
//    one output quantum of a double-precision real computation.

std::string c3_kernels() {
  std::mt19937 rng(0xBEEF);
  const int kCases = 1000;
  uint64_t checked = 0;

  for (int i = 0; i < kCases; ++i) {
    const auto tc = fixtures::random_conv_case(rng);
    const Tensor got =
        conv2d_s8(tc.input, tc.weights, tc.bias, tc.spec, tc.out_qp);
    const auto want = oracle::conv2d(tc);
    expect(got.i8().size() == want.size(), "conv output size");
    for (size_t k = 0; k < want.size(); ++k) {
      expect(got.i8()[k] == want[k], "conv bit-exact vs naive reference");
    }
    const auto real = oracle::conv2d_real(tc, false);
    for (size_t k = 0; k < real.size(); ++k) {
      expect(std::abs(dequantize(got.i8()[k], *got.qp) - real[k]) <=
                 static_cast<double>(got.qp->scale) * 1.0,
             "conv dequant within one quantum of real reference");
    }
    checked += want.size();
  }
  for (int i = 0; i < kCases; ++i) {
    const auto tc = fixtures::random_dw_case(rng);
    const Tensor got = depthwise_conv2d_s8(tc.input, tc.weights, tc.bias,
                                           tc.spec, tc.out_qp);
    const auto want = oracle::depthwise(tc);
    expect(got.i8().size() == want.size(), "dw output size");
    for (size_t k = 0; k < want.size(); ++k) {
      expect(got.i8()[k] == want[k], "dw bit-exact vs naive reference");
    }
    const auto real = oracle::conv2d_real(tc, true);
    for (size_t k = 0; k < real.size(); ++k) {
      expect(std::abs(dequantize(got.i8()[k], *got.qp) - real[k]) <=
                 static_cast<double>(got.qp->scale) * 1.0,
             "dw dequant within one quantum of real reference");
    }
    checked += want.size();
  }
  for (int i = 0; i < kCases; ++i) {
    const auto tc = fixtures::random_fc_case(rng);
    const Tensor got = fully_connected_s8(tc.input, tc.weights, tc.bias,
                                          tc.out_qp, tc.clamp_min,
                                          tc.clamp_max);
    const auto want = oracle::fully_connected(tc);
    expect(got.i8().size() == want.size(), "fc output size");
    for (size_t k = 0; k < want.size(); ++k) {
      expect(got.i8()[k] == want[k], "fc bit-exact vs naive reference");
    }
    checked += want.size();
  }
  std::ostringstream os;
  os << kCases << " random cases per kernel, " << checked
     << " outputs bit-exact, dequant tolerance 1 quantum";
  return os.str();
}

// --------------------------------------------------------------------------
// 4. Pipeline sweep: 10 seeded models x 1000 frames each.

std::string c4_pipeline() {
  const int kModels = 10;
  const int kFrames = 1000;
  std::vector<std::thread> workers;
  std::vector<std::string> errors(kModels);
  std::atomic<uint64_t> predictions{0};

  for (int s = 0; s < kModels; ++s) {
    workers.emplace_back([s, &errors, &predictions] {
      try {
        const uint32_t seed = static_cast<uint32_t>(s + 1);
        Engine eng = make_engine(build_reference_model(seed));
        const PipelineConfig cfg = make_pipeline_config(eng.model);

        // The stored grid plane must be bit-identical to a fresh embedding.
        const Tensor fresh = make_grid_embedding(cfg);
        if (eng.model.tensors.at(eng.model.grid_plane).data != fresh.data) {
          throw Error("stored grid plane differs from a fresh embedding");
        }
        // ...and the plane channel of a preprocessed frame identical to it.
        std::mt19937 rng(seed * 7919u);
        const Image probe = fixtures::random_frame(rng, 320, 240,
                                                   ImageFormat::kGray8);
        const Tensor pre = preprocess(probe, cfg, &fresh);
        for (size_t i = 0; i < 96 * 96; ++i) {
          if (pre.i8()[2 * i + 1] != fresh.i8()[i]) {
            throw Error("grid channel not bit-identical after preprocess");
          }
        }

        for (int f = 0; f < kFrames; ++f) {
          const Image frame = fixtures::random_frame(
              rng, 320, 240,
              f % 3 == 0 ? ImageFormat::kRgb888 : ImageFormat::kGray8);
          const GazeEstimate est = eng.predict(frame);
          if (!(est.x_cm >= -10.0f && est.x_cm <= 10.0f &&
                est.y_cm >= -10.0f && est.y_cm <= 10.0f)) {
            throw Error("estimate outside [-10, 10] cm");
          }
          if (!std::isfinite(est.raw_x) || !std::isfinite(est.raw_y)) {
            throw Error("non-finite raw output");
          }
          predictions.fetch_add(1, std::memory_order_relaxed);
        }
      } catch (const std::exception& e) {
        errors[s] = e.what();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (int s = 0; s < kModels; ++s) {
    if (!errors[s].empty()) {
      throw Error("model seed " + std::to_string(s + 1) + ": " + errors[s]);
    }
  }
  std::ostringstream os;
  os << predictions.load() << " predictions across " << kModels
     << " seeded models, all inside [-10, 10] cm, grid channel bit-identical";
  return os.str();
}

// --------------------------------------------------------------------------
// 5. Throughput and report determinism.

std::string c5_bench() {
  Engine eng = make_engine(build_reference_model(1), 320, 240, 0, "reference");
  std::mt19937 rng(0xFEED);
  std::vector<Image> frames;
  for (int i = 0; i < 100; ++i) {
    frames.push_back(fixtures::random_frame(rng, 320, 240,
                                            ImageFormat::kGray8));
  }
  SteadyClock wall;
  const BenchReport live = run_bench(eng, frames, 100, 10, wall);
  expect(live.fps >= 3.0, "sustained rate >= 3 FPS over 100 frames");

  FixedStepClock c1(400), c2(400);
  const BenchReport r1 = run_bench(eng, frames, 20, 5, c1, 1.56e8);
  const BenchReport r2 = run_bench(eng, frames, 20, 5, c2, 1.56e8);
  const std::string j1 = render_report_json(r1);
  expect(j1 == render_report_json(r2), "byte-identical JSON reports");
  expect(render_report_table(r1) == render_report_table(r2),
         "byte-identical table reports");
  const BenchReport back = parse_report_json(j1);
  expect(back.total_macs == r1.total_macs, "JSON parse inverts rendering");

  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << live.fps << " FPS (>= 3 required), injected-clock reports "
     << "byte-identical";
  return os.str();
}

// --------------------------------------------------------------------------
// 6. Loopback soak: 10,000 frames with injected garbage and bit corruption.

class ScriptStream : public ByteStream {
 public:
  explicit ScriptStream(std::vector<uint8_t> in) : in_(std::move(in)) {}
  size_t read(uint8_t* dst, size_t max) override {
    const size_t n = std::min({max, size_t{8192}, in_.size() - pos_});
    std::copy(in_.begin() + static_cast<long>(pos_),
              in_.begin() + static_cast<long>(pos_ + n), dst);
    pos_ += n;
    return n;
  }
  void write(const uint8_t* data, size_t size) override {
    out_.insert(out_.end(), data, data + size);
  }
  std::vector<uint8_t> out_;

 private:
  std::vector<uint8_t> in_;
  size_t pos_ = 0;
};

std::string c6_soak() {
  const int kFrames = 10000;
  Engine serve_eng = make_engine(fixtures::mini_model(1), 128, 96, 0, "soak");
  Engine check_eng = make_engine(fixtures::mini_model(1), 128, 96, 0, "soak");

  std::mt19937 rng(0xD1CE);
  std::vector<uint8_t> script;
  script.reserve(kFrames * 650);
  std::vector<GazeEstimate> expected;
  expected.reserve(kFrames);
  int corrupted = 0, garbage_blobs = 0;

  const PipelineConfig frame_cfg =
      make_pipeline_config(check_eng.model, 24, 24, 24);
  for (int i = 0; i < kFrames; ++i) {
    Image frame = fixtures::random_frame(rng, 24, 24, ImageFormat::kGray8);
    frame.pixels[0] = static_cast<uint8_t>(i);  // make frames distinct
    std::vector<uint8_t> msg = encode_message(
        static_cast<uint8_t>(MessageKind::kFrame), encode_frame_payload(frame));

    if (i % 11 == 5) {  // line noise between messages, sync bytes included
      const int blob = 1 + static_cast<int>(rng() % 9);
      for (int b = 0; b < blob; ++b) {
        script.push_back(static_cast<uint8_t>(rng() % 7 == 0 ? 0xA5 : rng()));
      }
      ++garbage_blobs;
    }
    if (i % 7 == 3) {  // single-bit corruption somewhere in the frame
      const size_t pos = rng() % msg.size();
      msg[pos] = static_cast<uint8_t>(msg[pos] ^ (1u << (rng() % 8)));
      ++corrupted;
    } else {
      expected.push_back(predict(check_eng, frame, frame_cfg));
    }
    script.insert(script.end(), msg.begin(), msg.end());
  }
  // A flip in a length field can declare a false payload of up to 2^24 - 1
  // bytes; the decoder then (correctly) waits for it before resyncing. Keep
  // the link talking long enough to resolve any such stall, the way a live
  // feed would -- the trailing zeros contain no sync byte, so they decode as
  // pure garbage once scanning resumes.
  script.insert(script.end(), (1u << 24) + 16, 0x00);

  ScriptStream stream(std::move(script));
  const ServeReport report = device_serve(stream, serve_eng);

  // Every reply decodes, arrives in order, and matches the local estimate
  // for the corresponding uncorrupted frame.
  StreamDecoder dec;
  dec.push(stream.out_);
  size_t idx = 0;
  while (auto ev = dec.next()) {
    if (!ev->message) throw Error("reply stream carried a diagnostic");
    if (ev->message->kind != static_cast<uint8_t>(MessageKind::kGaze)) {
      throw Error("unexpected reply kind: a corruption slipped through");
    }
    expect(idx < expected.size(), "more replies than valid frames");
    const GazeReply r = parse_gaze_payload(ev->message->payload);
    expect(r.x_cm == expected[idx].x_cm && r.y_cm == expected[idx].y_cm,
           "reply matches the local estimate for the same frame");
    ++idx;
  }
  expect(idx == expected.size(), "exactly one reply per valid frame");
  expect(report.frames_ok == expected.size(), "served count agrees");
  expect(report.frames_rejected == 0, "no semantic rejections expected");
  expect(report.crc_errors + report.garbage_runs + report.oversize_lengths >=
             static_cast<uint64_t>(corrupted),
         "every corrupted frame produced link diagnostics");

  std::ostringstream os;
  os << expected.size() << " valid frames answered in order, " << corrupted
     << " corrupted frames all detected, " << garbage_blobs
     << " garbage blobs absorbed, 0 undetected corruptions";
  return os.str();
}

// --------------------------------------------------------------------------
// 7. Container round-trip and decode fuzz.

std::string c7_format() {
  for (const uint32_t seed : {1u, 7u}) {
    const Model ref = build_reference_model(seed);
    const std::vector<uint8_t> bytes = encode_model(ref);
    const Model back = decode_model(bytes);
    expect(encode_model(back) == bytes, "decode/encode is the identity");
    expect(validate(back).ok(), "decoded model validates");
  }

  const std::vector<uint8_t> base = encode_model(fixtures::mini_model(3));
  std::mt19937 rng(0xF422);
  int decoded_ok = 0, rejected = 0;
  for (int t = 0; t < 10000; ++t) {
    std::vector<uint8_t> buf = base;
    const int edits = 1 + static_cast<int>(rng() % 16);
    for (int e = 0; e < edits; ++e) {
      switch (rng() % 8) {
        case 0:
          buf.resize(rng() % (buf.size() + 1));
          break;
        case 1:
          buf.push_back(static_cast<uint8_t>(rng()));
          break;
        default:
          if (!buf.empty()) buf[rng() % buf.size()] = static_cast<uint8_t>(rng());
          break;
      }
    }
    try {
      const Model m = decode_model(buf);
      ++decoded_ok;
      // Anything that decodes must re-encode without crashing.
      (void)encode_model(m);
    } catch (const DecodeError&) {
      ++rejected;
    }
  }
  std::ostringstream os;
  os << "reference round-trip bit-exact; fuzz: 10000 mutated buffers, "
     << rejected << " rejected cleanly, " << decoded_ok
     << " decoded, 0 crashes";
  return os.str();
}

}  // namespace

int main() {
  std::printf("acceptance: integer gaze runtime, desk-scale build\n");
  criterion(1, "static budget envelope", 1.0, c1_budget);
  criterion(2, "arena plan at the lifetime lower bound", 1.0, c2_arena);
  criterion(3, "kernel equivalence against naive references", 30.0,
            c3_kernels);
  criterion(4, "pipeline sweep over seeded models", 120.0, c4_pipeline);
  criterion(5, "throughput floor and report determinism", 60.0, c5_bench);
  criterion(6, "loopback soak with corruption injection", 120.0, c6_soak);
  criterion(7, "container round-trip and decode fuzz", 60.0, c7_format);
  std::printf(
      "SKIP criterion 8: physical gaze-accuracy evaluation (requires live "
      "capture hardware; excluded from this build's scope)\n");
  if (g_failures > 0) {
    std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("acceptance: all evaluated criteria passed\n");
  return 0;
}
