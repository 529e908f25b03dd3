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
// ttks command-line tool: benchmarking, a device-side server, a host-side
// client, and small utilities for building models and frames.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <arpa/inet.h>
#include <csignal>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include "CLI11.hpp"
#include "ttks/bench.hpp"
#include "ttks/config.hpp"
#include "ttks/errors.hpp"
#include "ttks/pipeline.hpp"
#include "ttks/ppm.hpp"
#include "ttks/serialize.hpp"
#include "ttks/wire.hpp"

namespace {

using namespace ttks;

// ---------------------------------------------------------------------------
// Transport plumbing

class FdStream : public ByteStream {
 public:
  FdStream(int read_fd, int write_fd, bool owns)
      : read_fd_(read_fd), write_fd_(write_fd), owns_(owns) {}
  ~FdStream() override {
    if (owns_) {
      ::close(read_fd_);
      if (write_fd_ != read_fd_) ::close(write_fd_);
    }
  }
  FdStream(const FdStream&) = delete;
  FdStream& operator=(const FdStream&) = delete;

  size_t read(uint8_t* out, size_t max) override {
    for (;;) {
      const ssize_t n = ::read(read_fd_, out, max);
      if (n >= 0) return static_cast<size_t>(n);
      if (errno == EINTR) continue;
      throw IoError(std::string("read failed: ") + std::strerror(errno));
    }
  }

  void write(const uint8_t* data, size_t size) override {
    size_t done = 0;
    while (done < size) {
      const ssize_t n = ::write(write_fd_, data + done, size - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw IoError(std::string("write failed: ") + std::strerror(errno));
      }
      done += static_cast<size_t>(n);
    }
  }

 private:
  int read_fd_;
  int write_fd_;
  bool owns_;
};

bool looks_like_port(const std::string& addr) {
  if (addr.empty()) return false;
  return std::all_of(addr.begin(), addr.end(),
                     [](unsigned char c) { return c >= '0' && c <= '9'; });
}

int listen_socket(const std::string& addr) {
  if (looks_like_port(addr)) {
    const int port = std::stoi(addr);
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw IoError("socket() failed");
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    sa.sin_port = htons(static_cast<uint16_t>(port));
    if (::bind(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0 ||
        ::listen(fd, 4) != 0) {
      ::close(fd);
      throw IoError("cannot listen on port " + addr + ": " +
                    std::strerror(errno));
    }
    return fd;
  }
  const int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) throw IoError("socket() failed");
  sockaddr_un sa{};
  sa.sun_family = AF_UNIX;
  if (addr.size() >= sizeof(sa.sun_path)) throw IoError("socket path too long");
  std::strncpy(sa.sun_path, addr.c_str(), sizeof(sa.sun_path) - 1);
  ::unlink(addr.c_str());
  if (::bind(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0 ||
      ::listen(fd, 4) != 0) {
    ::close(fd);
    throw IoError("cannot listen on " + addr + ": " + std::strerror(errno));
  }
  return fd;
}

// Retries for ~2 s so a freshly spawned server has time to bind.
int connect_socket(const std::string& addr) {
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::seconds(2);
  for (;;) {
    int fd = -1;
    if (looks_like_port(addr)) {
      fd = ::socket(AF_INET, SOCK_STREAM, 0);
      if (fd < 0) throw IoError("socket() failed");
      sockaddr_in sa{};
      sa.sin_family = AF_INET;
      sa.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
      sa.sin_port = htons(static_cast<uint16_t>(std::stoi(addr)));
      if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) == 0) {
        return fd;
      }
    } else {
      fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
      if (fd < 0) throw IoError("socket() failed");
      sockaddr_un sa{};
      sa.sun_family = AF_UNIX;
      if (addr.size() >= sizeof(sa.sun_path)) {
        ::close(fd);
        throw IoError("socket path too long");
      }
      std::strncpy(sa.sun_path, addr.c_str(), sizeof(sa.sun_path) - 1);
      if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) == 0) {
        return fd;
      }
    }
    ::close(fd);
    if (std::chrono::steady_clock::now() >= deadline) {
      throw IoError("cannot connect to " + addr + ": " + std::strerror(errno));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

// ---------------------------------------------------------------------------
// Shared helpers

Model obtain_model(const std::string& model_path, uint32_t seed, int cap_w,
                   int cap_h, int crop) {
  if (!model_path.empty()) return load_model(model_path);
  return build_reference_model(seed, cap_w, cap_h, crop);
}

Image synthetic_frame(std::mt19937& rng, int w, int h, bool rgb) {
  Image img = make_image(w, h, rgb ? ImageFormat::kRgb888 : ImageFormat::kGray8);
  for (uint8_t& p : img.pixels) p = static_cast<uint8_t>(rng() % 256u);
  return img;
}

std::vector<Image> load_frames_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".ppm" || ext == ".pgm") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<Image> frames;
  frames.reserve(paths.size());
  for (const auto& p : paths) frames.push_back(read_ppm(p.string()));
  return frames;
}

bool parse_pair(const std::string& text, char sep, double& a, double& b) {
  const size_t pos = text.find(sep);
  if (pos == std::string::npos) return false;
  try {
    size_t used = 0;
    a = std::stod(text.substr(0, pos), &used);
    if (used != pos) return false;
    const std::string rest = text.substr(pos + 1);
    b = std::stod(rest, &used);
    return used == rest.size();
  } catch (...) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_bench(const std::string& model_path, uint32_t seed,
              const std::string& frames_dir, int iters, int warmup,
              double clock_hz, bool json, const std::string& config_path) {
  RunConfig rc;
  if (!config_path.empty()) rc = load_run_config(config_path);
  const std::string effective_model =
      !model_path.empty() ? model_path : rc.model_path;

  std::vector<Image> frames;
  if (!frames_dir.empty()) {
    frames = load_frames_dir(frames_dir);
    if (frames.empty()) {
      std::fprintf(stderr, "no .ppm/.pgm frames in %s\n", frames_dir.c_str());
      return 1;
    }
    rc.capture_width = frames.front().width;
    rc.capture_height = frames.front().height;
  }

  Model model = obtain_model(effective_model, seed, rc.capture_width,
                             rc.capture_height, rc.crop_side);
  Engine eng = make_engine(std::move(model), rc.capture_width,
                           rc.capture_height, rc.crop_side,
                           effective_model.empty()
                               ? "reference-s" + std::to_string(seed)
                               : effective_model);

  if (frames.empty()) {
    std::mt19937 rng(seed);
    for (int i = 0; i < 8; ++i) {
      frames.push_back(
          synthetic_frame(rng, rc.capture_width, rc.capture_height, false));
    }
  }
  for (const Image& f : frames) {
    if (f.width != rc.capture_width || f.height != rc.capture_height) {
      std::fprintf(stderr, "frames must share one capture size\n");
      return 1;
    }
  }

  SteadyClock clock;
  const BenchReport report =
      run_bench(eng, frames, iters, warmup, clock, clock_hz);
  const std::string text =
      json ? render_report_json(report) + "\n" : render_report_table(report);
  std::fputs(text.c_str(), stdout);
  return 0;
}

int cmd_device_sim(const std::string& model_path, uint32_t seed,
                   const std::string& listen, bool once,
                   const std::string& config_path) {
  RunConfig rc;
  if (!config_path.empty()) rc = load_run_config(config_path);
  const std::string effective_model =
      !model_path.empty() ? model_path : rc.model_path;

  Model model = obtain_model(effective_model, seed, rc.capture_width,
                             rc.capture_height, rc.crop_side);
  Engine eng = make_engine(std::move(model), rc.capture_width,
                           rc.capture_height, rc.crop_side, "device");

  const auto report_line = [](const ServeReport& r) {
    std::fprintf(stderr,
                 "served: ok=%llu rejected=%llu stats=%llu crc_errors=%llu "
                 "garbage_runs=%llu\n",
                 static_cast<unsigned long long>(r.frames_ok),
                 static_cast<unsigned long long>(r.frames_rejected),
                 static_cast<unsigned long long>(r.stats_requests),
                 static_cast<unsigned long long>(r.crc_errors),
                 static_cast<unsigned long long>(r.garbage_runs));
  };

  if (listen == "-") {
    FdStream stream(STDIN_FILENO, STDOUT_FILENO, false);
    report_line(device_serve(stream, eng));
    return 0;
  }

  const int listen_fd = listen_socket(listen);
  std::fprintf(stderr, "listening on %s\n", listen.c_str());
  do {
    const int fd = ::accept(listen_fd, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      ::close(listen_fd);
      throw IoError(std::string("accept failed: ") + std::strerror(errno));
    }
    FdStream stream(fd, fd, true);
    try {
      report_line(device_serve(stream, eng));
    } catch (const IoError& e) {
      std::fprintf(stderr, "connection dropped: %s\n", e.what());
    }
  } while (!once);
  ::close(listen_fd);
  if (!looks_like_port(listen)) ::unlink(listen.c_str());
  return 0;
}

int cmd_host(const std::string& connect, const std::string& frame_path,
             const std::string& out_path, const std::string& screen_cm,
             const std::string& origin_cm) {
  OverlayGeometry geom;
  if (!screen_cm.empty()) {
    double w = 0, h = 0;
    if (!parse_pair(screen_cm, 'x', w, h) || w <= 0 || h <= 0) {
      std::fprintf(stderr, "--screen-cm expects WxH, e.g. 31x17.4\n");
      return 1;
    }
    geom.screen_width_cm = w;
    geom.screen_height_cm = h;
  }
  if (!origin_cm.empty()) {
    double x = 0, y = 0;
    if (!parse_pair(origin_cm, ',', x, y)) {
      std::fprintf(stderr, "--origin-cm expects X,Y, e.g. -15.5,0\n");
      return 1;
    }
    geom.origin_x_cm = x;
    geom.origin_y_cm = y;
  }

  const Image frame = read_ppm(frame_path);
  const int fd = connect_socket(connect);
  FdStream stream(fd, fd, true);

  const std::vector<uint8_t> msg = encode_message(
      static_cast<uint8_t>(MessageKind::kFrame), encode_frame_payload(frame));
  stream.write(msg.data(), msg.size());

  StreamDecoder decoder;
  uint8_t chunk[4096];
  for (;;) {
    while (auto event = decoder.next()) {
      if (event->diagnostic) {
        if (wire_log_enabled()) {
          wire_log(std::string("link: ") + diagnostic_name(*event->diagnostic));
        }
        continue;
      }
      const WireMessage& m = *event->message;
      if (m.kind == static_cast<uint8_t>(MessageKind::kGaze)) {
        const GazeReply reply = parse_gaze_payload(m.payload);
        GazeEstimate est;
        est.x_cm = reply.x_cm;
        est.y_cm = reply.y_cm;
        est.inference_micros = reply.inference_micros;
        host_overlay(frame, est, geom, out_path);
        std::printf("gaze: x_cm=%.3f y_cm=%.3f inference_micros=%u\n",
                    est.x_cm, est.y_cm, est.inference_micros);
        std::printf("overlay written to %s\n", out_path.c_str());
        return 0;
      }
      if (m.kind == static_cast<uint8_t>(MessageKind::kError)) {
        const int code = m.payload.empty() ? 0 : m.payload[0];
        std::fprintf(stderr, "device rejected the frame (code %d)\n", code);
        return 1;
      }
    }
    const size_t n = stream.read(chunk, sizeof(chunk));
    if (n == 0) {
      std::fprintf(stderr, "connection closed before a reply arrived\n");
      return 1;
    }
    decoder.push(chunk, n);
  }
}

int cmd_make_model(const std::string& out, uint32_t seed, int cap_w, int cap_h,
                   int crop) {
  const Model m = build_reference_model(seed, cap_w, cap_h, crop);
  save_model(m, out);
  std::printf("wrote %s (params=%llu macs=%llu)\n", out.c_str(),
              static_cast<unsigned long long>(count_params(m)),
              static_cast<unsigned long long>(count_macs(m)));
  return 0;
}

int cmd_info(const std::string& model_path) {
  const Model m = load_model(model_path);
  const ValidationReport report = validate(m);
  std::printf("layers: %zu\ntensors: %zu\nparams: %llu\nmacs: %llu\n",
              m.layers.size(), m.tensors.size(),
              static_cast<unsigned long long>(count_params(m)),
              static_cast<unsigned long long>(count_macs(m)));
  const auto dims = activation_dims(m);
  for (size_t i = 0; i < m.layers.size(); ++i) {
    std::string shape;
    for (size_t d = 0; d < dims[i + 1].size(); ++d) {
      shape += (d ? "x" : "") + std::to_string(dims[i + 1][d]);
    }
    std::printf("  %2zu %-11s -> %-12s params=%-6llu macs=%llu\n", i,
                layer_kind_name(m.layers[i].kind), shape.c_str(),
                static_cast<unsigned long long>(layer_params(m, i)),
                static_cast<unsigned long long>(layer_macs(m, i)));
  }
  if (report.ok()) {
    const ArenaPlan plan = plan_arena(m);
    std::printf("arena peak: %u bytes\nvalidation: ok\n", plan.peak_bytes);
    return 0;
  }
  std::printf("validation FAILED:\n%s", report.to_string().c_str());
  return 1;
}

int cmd_predict(const std::string& model_path, uint32_t seed,
                const std::string& frame_path, bool json) {
  const Image frame = read_ppm(frame_path);
  Model model = obtain_model(model_path, seed, frame.width, frame.height, 0);
  Engine eng = make_engine(std::move(model), frame.width, frame.height, 0);
  const GazeEstimate est = eng.predict(frame);
  if (json) {
    std::printf(
        "{\"x_cm\":%.6f,\"y_cm\":%.6f,\"raw_x\":%.6f,\"raw_y\":%.6f,"
        "\"inference_micros\":%u}\n",
        est.x_cm, est.y_cm, est.raw_x, est.raw_y, est.inference_micros);
  } else {
    std::printf("x_cm=%.3f y_cm=%.3f (raw %.4f, %.4f) inference_micros=%u\n",
                est.x_cm, est.y_cm, est.raw_x, est.raw_y,
                est.inference_micros);
  }
  return 0;
}

int cmd_gen_frames(const std::string& out_dir, int count, uint32_t seed, int w,
                   int h, bool rgb) {
  std::filesystem::create_directories(out_dir);
  std::mt19937 rng(seed);
  for (int i = 0; i < count; ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "frame_%04d.%s", i, rgb ? "ppm" : "pgm");
    write_ppm(synthetic_frame(rng, w, h, rgb),
              (std::filesystem::path(out_dir) / name).string());
  }
  std::printf("wrote %d frames to %s\n", count, out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGPIPE, SIG_IGN);

  CLI::App app{"Integer gaze-inference runtime tools"};
  app.require_subcommand(1);

  std::string model_path, frames_dir, config_path, listen, connect, frame_path;
  std::string out_path = "overlay.ppm", screen_cm, origin_cm, out_dir;
  uint32_t seed = 1;
  int iters = 100, warmup = 10, count = 8;
  int cap_w = 320, cap_h = 240, crop = 0;
  double clock_hz = 0.0;
  bool json = false, once = false, rgb = false;

  auto* bench = app.add_subcommand("bench", "Measure pipeline latency");
  bench->add_option("--model", model_path, "Model file (defaults to a seeded build)");
  bench->add_option("--frames", frames_dir, "Directory of .ppm/.pgm frames");
  bench->add_option("--iters", iters, "Timed iterations")->check(CLI::PositiveNumber);
  bench->add_option("--warmup", warmup, "Discarded warmup iterations")
      ->check(CLI::NonNegativeNumber);
  bench->add_option("--clock-hz", clock_hz, "Target clock for MAC/cycle");
  bench->add_flag("--json", json, "Emit a single-line JSON report");
  bench->add_option("--seed", seed, "Seed when building a model");
  bench->add_option("--config", config_path, "Run configuration file");

  auto* dev = app.add_subcommand("device-sim", "Serve the gaze pipeline");
  dev->add_option("--model", model_path, "Model file (defaults to a seeded build)");
  dev->add_option("--listen", listen,
                  "Unix socket path, TCP port, or '-' for stdio")
      ->required();
  dev->add_flag("--once", once, "Exit after the first connection");
  dev->add_option("--seed", seed, "Seed when building a model");
  dev->add_option("--config", config_path, "Run configuration file");

  auto* host = app.add_subcommand("host", "Send one frame, write the overlay");
  host->add_option("--connect", connect, "Unix socket path or TCP port")
      ->required();
  host->add_option("--frame", frame_path, "PPM/PGM frame to send")->required();
  host->add_option("--out", out_path, "Overlay output path (P6 PPM)");
  host->add_option("--screen-cm", screen_cm, "Screen size WxH, e.g. 31x17.4");
  host->add_option("--origin-cm", origin_cm,
                   "Screen top-left in camera coords, e.g. -15.5,0");

  std::string model_out;
  auto* mk = app.add_subcommand("make-model", "Build and save a seeded model");
  mk->add_option("--out", model_out, "Output model path")->required();
  mk->add_option("--seed", seed, "Builder seed");
  mk->add_option("--capture-width", cap_w, "Capture width the grid encodes");
  mk->add_option("--capture-height", cap_h, "Capture height the grid encodes");
  mk->add_option("--crop-side", crop, "Crop side (0 = largest square)");

  auto* info = app.add_subcommand("info", "Inspect a model file");
  info->add_option("--model", model_path, "Model file")->required();

  auto* pred = app.add_subcommand("predict", "Run one frame locally");
  pred->add_option("--model", model_path, "Model file (defaults to a seeded build)");
  pred->add_option("--frame", frame_path, "PPM/PGM frame")->required();
  pred->add_option("--seed", seed, "Seed when building a model");
  pred->add_flag("--json", json, "Emit JSON");

  auto* gen = app.add_subcommand("gen-frames", "Write synthetic frames");
  gen->add_option("--out-dir", out_dir, "Output directory")->required();
  gen->add_option("--count", count, "Number of frames")->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "Pixel seed");
  gen->add_option("--width", cap_w, "Frame width");
  gen->add_option("--height", cap_h, "Frame height");
  gen->add_flag("--rgb", rgb, "RGB frames instead of grayscale");

  CLI11_PARSE(app, argc, argv);

  try {
    if (bench->parsed()) {
      return cmd_bench(model_path, seed, frames_dir, iters, warmup, clock_hz,
                       json, config_path);
    }
    if (dev->parsed()) {
      return cmd_device_sim(model_path, seed, listen, once, config_path);
    }
    if (host->parsed()) {
      return cmd_host(connect, frame_path, out_path, screen_cm, origin_cm);
    }
    if (mk->parsed()) {
      return cmd_make_model(model_out, seed, cap_w, cap_h, crop);
    }
    if (info->parsed()) return cmd_info(model_path);
    if (pred->parsed()) return cmd_predict(model_path, seed, frame_path, json);
    if (gen->parsed()) {
      return cmd_gen_frames(out_dir, count, seed, cap_w, cap_h, rgb);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
