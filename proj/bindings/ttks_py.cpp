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
// Python module exposing the main operations of the integer gaze runtime:
// quantization scalar helpers, image preprocessing, the model container,
// the inference engine, the benchmark harness, and the wire codecs.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <string>
#include <vector>

#include "ttks/arena.hpp"
#include "ttks/bench.hpp"
#include "ttks/errors.hpp"
#include "ttks/image.hpp"
#include "ttks/pipeline.hpp"
#include "ttks/ppm.hpp"
#include "ttks/qcore.hpp"
#include "ttks/serialize.hpp"
#include "ttks/wire.hpp"

namespace py = pybind11;
using namespace ttks;

namespace {

Image image_from_bytes(int width, int height, const std::string& format,
                       const py::bytes& pixels) {
  ImageFormat fmt;
  if (format == "gray") {
    fmt = ImageFormat::kGray8;
  } else if (format == "rgb") {
    fmt = ImageFormat::kRgb888;
  } else {
    throw Error("format must be 'gray' or 'rgb'");
  }
  Image img = make_image(width, height, fmt);
  const std::string buf = pixels;
  if (buf.size() != img.pixels.size()) {
    throw DimensionError("pixel buffer size mismatch");
  }
  std::memcpy(img.pixels.data(), buf.data(), buf.size());
  return img;
}

py::bytes to_py_bytes(const std::vector<uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

std::vector<uint8_t> from_py_bytes(const py::bytes& b) {
  const std::string s = b;
  return std::vector<uint8_t>(s.begin(), s.end());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Integer-only gaze-estimation runtime";

  // Translators run newest-first, so the base class goes in first and the
  // derived DecodeError gets matched ahead of it.
  py::register_exception<Error>(m, "RuntimeError_", PyExc_RuntimeError);
  py::register_exception<DecodeError>(m, "DecodeError");

  // --- quantization scalars -------------------------------------------------
  py::class_<QuantParams>(m, "QuantParams")
      .def(py::init<float, int32_t>(), py::arg("scale"),
           py::arg("zero_point"))
      .def_readwrite("scale", &QuantParams::scale)
      .def_readwrite("zero_point", &QuantParams::zero_point)
      .def("__repr__", [](const QuantParams& qp) {
        return "QuantParams(scale=" + std::to_string(qp.scale) +
               ", zero_point=" + std::to_string(qp.zero_point) + ")";
      });

  m.def("quantize", &quantize, py::arg("x"), py::arg("qp"));
  m.def("dequantize", &dequantize, py::arg("q"), py::arg("qp"));
  m.def(
      "derive_requant",
      [](double in_scale, double weight_scale, double out_scale) {
        const FixedMul fm = derive_requant(in_scale, weight_scale, out_scale);
        return py::make_tuple(fm.multiplier, fm.right_shift);
      },
      py::arg("in_scale"), py::arg("weight_scale"), py::arg("out_scale"),
      "Returns (multiplier, right_shift) for the fixed-point rescale.");
  m.def(
      "requantize",
      [](int32_t acc, int32_t multiplier, int32_t right_shift, int32_t zp) {
        return requantize(acc, FixedMul{multiplier, right_shift}, zp);
      },
      py::arg("acc"), py::arg("multiplier"), py::arg("right_shift"),
      py::arg("zero_point"));

  // --- images ---------------------------------------------------------------
  py::class_<Image>(m, "Image")
      .def(py::init(&image_from_bytes), py::arg("width"), py::arg("height"),
           py::arg("format"), py::arg("pixels"))
      .def_readonly("width", &Image::width)
      .def_readonly("height", &Image::height)
      .def_property_readonly(
          "format",
          [](const Image& img) {
            return img.format == ImageFormat::kRgb888 ? "rgb" : "gray";
          })
      .def_property_readonly(
          "pixels", [](const Image& img) { return to_py_bytes(img.pixels); });

  m.def("rgb_to_gray", &rgb_to_gray, py::arg("image"));
  m.def("center_crop", &center_crop, py::arg("image"), py::arg("side"));
  m.def("resize_bilinear", &resize_bilinear, py::arg("image"),
        py::arg("out_width"), py::arg("out_height"));
  m.def("read_ppm", &read_ppm, py::arg("path"));
  m.def("write_ppm", &write_ppm, py::arg("image"), py::arg("path"));

  // --- model container --------------------------------------------------------
  py::class_<Model>(m, "Model")
      .def_property_readonly("num_layers",
                             [](const Model& md) { return md.layers.size(); })
      .def_property_readonly("num_tensors",
                             [](const Model& md) { return md.tensors.size(); })
      .def_property_readonly("params",
                             [](const Model& md) { return count_params(md); })
      .def_property_readonly("macs",
                             [](const Model& md) { return count_macs(md); })
      .def_property_readonly(
          "arena_peak_bytes",
          [](const Model& md) { return plan_arena(md).peak_bytes; })
      .def("validate",
           [](const Model& md) {
             const auto report = validate(md);
             return py::make_tuple(report.ok(), report.to_string());
           })
      .def("encode", [](const Model& md) { return to_py_bytes(encode_model(md)); })
      .def("save", &save_model, py::arg("path"));

  m.def("load_model", &load_model, py::arg("path"));
  m.def(
      "decode_model",
      [](const py::bytes& buf) { return decode_model(from_py_bytes(buf)); },
      py::arg("data"));
  m.def("build_reference_model", &build_reference_model, py::arg("seed"),
        py::arg("capture_width") = 320, py::arg("capture_height") = 240,
        py::arg("crop_side") = 0);

  // --- engine -----------------------------------------------------------------
  py::class_<GazeEstimate>(m, "GazeEstimate")
      .def_readonly("x_cm", &GazeEstimate::x_cm)
      .def_readonly("y_cm", &GazeEstimate::y_cm)
      .def_readonly("raw_x", &GazeEstimate::raw_x)
      .def_readonly("raw_y", &GazeEstimate::raw_y)
      .def_readonly("inference_micros", &GazeEstimate::inference_micros)
      .def("__repr__", [](const GazeEstimate& e) {
        return "GazeEstimate(x_cm=" + std::to_string(e.x_cm) +
               ", y_cm=" + std::to_string(e.y_cm) + ")";
      });

  py::class_<Engine>(m, "Engine")
      .def_property_readonly("name",
                             [](const Engine& e) { return e.name; })
      .def_property_readonly(
          "last_inference_micros",
          [](const Engine& e) { return e.last_inference_micros; })
      .def("predict", &Engine::predict, py::arg("frame"));

  m.def("make_engine", &make_engine, py::arg("model"),
        py::arg("capture_width") = 320, py::arg("capture_height") = 240,
        py::arg("crop_side") = 0, py::arg("name") = "");

  // --- benchmark ---------------------------------------------------------------
  m.def(
      "bench_json",
      [](Engine& eng, const std::vector<Image>& frames, int iterations,
         int warmup, double clock_hz, uint64_t fixed_step_micros) {
        if (fixed_step_micros > 0) {
          FixedStepClock clock(fixed_step_micros);
          return render_report_json(
              run_bench(eng, frames, iterations, warmup, clock, clock_hz));
        }
        SteadyClock clock;
        return render_report_json(
            run_bench(eng, frames, iterations, warmup, clock, clock_hz));
      },
      py::arg("engine"), py::arg("frames"), py::arg("iterations") = 50,
      py::arg("warmup") = 5, py::arg("clock_hz") = 0.0,
      py::arg("fixed_step_micros") = 0,
      "Runs the benchmark and returns the single-line JSON report.");

  // --- wire codecs ---------------------------------------------------------------
  m.def(
      "crc16",
      [](const py::bytes& data) {
        const std::vector<uint8_t> buf = from_py_bytes(data);
        return crc16_ccitt_false(buf.data(), buf.size());
      },
      py::arg("data"));
  m.def(
      "encode_message",
      [](uint8_t kind, const py::bytes& payload) {
        return to_py_bytes(encode_message(kind, from_py_bytes(payload)));
      },
      py::arg("kind"), py::arg("payload"));
  m.def(
      "decode_messages",
      [](const py::bytes& data) {
        StreamDecoder dec;
        dec.push(from_py_bytes(data));
        py::list out;
        while (auto ev = dec.next()) {
          if (ev->message) {
            out.append(py::make_tuple(ev->message->kind,
                                      to_py_bytes(ev->message->payload)));
          } else {
            out.append(py::str(diagnostic_name(*ev->diagnostic)));
          }
        }
        return out;
      },
      py::arg("data"),
      "Scans a byte buffer; yields (kind, payload) tuples and diagnostic "
      "name strings in stream order.");
  m.def(
      "encode_frame_payload",
      [](const Image& img) { return to_py_bytes(encode_frame_payload(img)); },
      py::arg("frame"));
  m.def(
      "parse_gaze_payload",
      [](const py::bytes& payload) {
        const GazeReply r = parse_gaze_payload(from_py_bytes(payload));
        return py::make_tuple(r.x_cm, r.y_cm, r.inference_micros);
      },
      py::arg("payload"));

  m.attr("FRAME") = static_cast<int>(MessageKind::kFrame);
  m.attr("GAZE") = static_cast<int>(MessageKind::kGaze);
  m.attr("STATS") = static_cast<int>(MessageKind::kStats);
  m.attr("ERROR") = static_cast<int>(MessageKind::kError);
  m.attr("ARENA_BUDGET_BYTES") = kArenaBudgetBytes;
}
