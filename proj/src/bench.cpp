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

#include "ttks/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "ttks/errors.hpp"
#include "ttks/execute.hpp"

namespace ttks {
namespace {

double percentile(const std::vector<uint64_t>& sorted, double q) {
  const size_t n = sorted.size();
  size_t idx = static_cast<size_t>(std::ceil(q * static_cast<double>(n)));
  if (idx == 0) idx = 1;
  if (idx > n) idx = n;
  return static_cast<double>(sorted[idx - 1]) / 1000.0;
}

std::string fmt(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string latency_row(const LatencyStats& s) {
  std::ostringstream os;
  os << "mean " << fmt(s.mean_ms) << "  p50 " << fmt(s.p50_ms) << "  p95 "
     << fmt(s.p95_ms);
  return os.str();
}

nlohmann::ordered_json stats_json(const LatencyStats& s) {
  return {{"mean_ms", s.mean_ms}, {"p50_ms", s.p50_ms}, {"p95_ms", s.p95_ms}};
}

LatencyStats stats_from_json(const nlohmann::json& j) {
  LatencyStats s;
  s.mean_ms = j.at("mean_ms").get<double>();
  s.p50_ms = j.at("p50_ms").get<double>();
  s.p95_ms = j.at("p95_ms").get<double>();
  return s;
}

}  // namespace

uint64_t SteadyClock::now_micros() {
  return static_cast<uint64_t>(
      std::chrono::duration_cast<std::chrono::microseconds>(
          std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

LatencyStats summarize_micros(std::vector<uint64_t> samples) {
  LatencyStats s;
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  uint64_t total = 0;
  for (uint64_t v : samples) total += v;
  s.mean_ms = static_cast<double>(total) /
              static_cast<double>(samples.size()) / 1000.0;
  s.p50_ms = percentile(samples, 0.50);
  s.p95_ms = percentile(samples, 0.95);
  return s;
}

BenchReport run_bench(Engine& eng, const std::vector<Image>& frames,
                      int iterations, int warmup, Clock& clock,
                      double clock_hz) {
  if (frames.empty()) throw Error("benchmark needs at least one frame");
  if (iterations < 1) throw Error("benchmark needs at least one iteration");
  if (warmup < 0) throw Error("warmup cannot be negative");

  const Tensor* grid = nullptr;
  if (eng.model.grid_plane != kNoTensor &&
      eng.model.tensors.at(eng.model.input_spec).dims[3] == 2) {
    grid = &eng.model.tensors[eng.model.grid_plane];
  }

  std::vector<uint64_t> e2e, inf;
  e2e.reserve(iterations);
  inf.reserve(iterations);

  for (int k = 0; k < warmup + iterations; ++k) {
    const Image& frame = frames[static_cast<size_t>(k) % frames.size()];
    const uint64_t t0 = clock.now_micros();
    const Tensor input = preprocess(frame, eng.config, grid);
    const uint64_t t1 = clock.now_micros();
    const Tensor out = execute(eng.model, eng.plan, input);
    const uint64_t t2 = clock.now_micros();
    const GazeEstimate est = postprocess(out);
    const uint64_t t3 = clock.now_micros();
    do_not_optimize(est);
    if (k >= warmup) {
      e2e.push_back(t3 - t0);
      inf.push_back(t2 - t1);
    }
  }

  BenchReport r;
  r.model_name = eng.name;
  r.iterations = iterations;
  r.warmup = warmup;
  r.params = count_params(eng.model);
  r.total_macs = count_macs(eng.model);
  r.arena_peak_bytes = eng.plan.peak_bytes;
  r.end_to_end = summarize_micros(std::move(e2e));
  r.inference = summarize_micros(std::move(inf));
  if (r.end_to_end.mean_ms > 0.0) r.fps = 1000.0 / r.end_to_end.mean_ms;
  const double inf_s = r.inference.mean_ms / 1000.0;
  if (inf_s > 0.0) {
    r.mac_per_second = static_cast<double>(r.total_macs) / inf_s;
    if (clock_hz > 0.0) {
      r.clock_hz = clock_hz;
      r.mac_per_cycle = static_cast<double>(r.total_macs) / (inf_s * clock_hz);
    }
  }
  return r;
}

std::string render_report_table(const BenchReport& r) {
  std::ostringstream os;
  const auto row = [&](const char* label, const std::string& value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%-16s", label);
    os << buf << value << "\n";
  };

  os << "=== End-to-End Evaluation ===\n";
  row("Model", r.model_name.empty() ? "-" : r.model_name);
  row("Iterations", std::to_string(r.iterations) + " (warmup " +
                        std::to_string(r.warmup) + ")");
  row("Latency [ms]", latency_row(r.end_to_end));
  row("FPS", fmt(r.fps, "%.2f"));
  os << "\n=== Inference Evaluation ===\n";
  row("Latency [ms]", latency_row(r.inference));
  row("Params", std::to_string(r.params));
  row("MACs", std::to_string(r.total_macs));
  row("Arena peak [B]", std::to_string(r.arena_peak_bytes));
  row("MAC/s", fmt(r.mac_per_second, "%.4e"));
  row("MAC/Cycle", r.clock_hz > 0.0 ? fmt(r.mac_per_cycle, "%.4f") : "-");
  row("Clock [Hz]", r.clock_hz > 0.0 ? fmt(r.clock_hz, "%.4e") : "-");
  return os.str();
}

std::string render_report_json(const BenchReport& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model_name;
  j["iterations"] = r.iterations;
  j["warmup"] = r.warmup;
  j["params"] = r.params;
  j["macs"] = r.total_macs;
  j["arena_peak_bytes"] = r.arena_peak_bytes;
  j["end_to_end"] = stats_json(r.end_to_end);
  j["inference"] = stats_json(r.inference);
  j["fps"] = r.fps;
  j["mac_per_second"] = r.mac_per_second;
  if (r.clock_hz > 0.0) {
    j["clock_hz"] = r.clock_hz;
    j["mac_per_cycle"] = r.mac_per_cycle;
  }
  return j.dump();
}

BenchReport parse_report_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad report document: ") + e.what());
  }
  try {
    BenchReport r;
    r.model_name = j.at("model").get<std::string>();
    r.iterations = j.at("iterations").get<int>();
    r.warmup = j.at("warmup").get<int>();
    r.params = j.at("params").get<uint64_t>();
    r.total_macs = j.at("macs").get<uint64_t>();
    r.arena_peak_bytes = j.at("arena_peak_bytes").get<uint32_t>();
    r.end_to_end = stats_from_json(j.at("end_to_end"));
    r.inference = stats_from_json(j.at("inference"));
    r.fps = j.at("fps").get<double>();
    r.mac_per_second = j.at("mac_per_second").get<double>();
    if (j.contains("clock_hz")) {
      r.clock_hz = j.at("clock_hz").get<double>();
      r.mac_per_cycle = j.at("mac_per_cycle").get<double>();
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad report document: ") + e.what());
  }
}

}  // namespace ttks
