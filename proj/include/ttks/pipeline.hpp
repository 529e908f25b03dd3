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
// Camera-to-gaze pipeline: frame preprocessing, the face-position grid
// embedding, the deterministic model builder and the engine wrapper that ties
// model + arena plan + pipeline configuration together.

#ifndef TTKS_PIPELINE_HPP_
#define TTKS_PIPELINE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ttks/arena.hpp"
#include "ttks/image.hpp"
#include "ttks/model.hpp"
#include "ttks/tensor.hpp"

namespace ttks {

// Side length of the square network input, in pixels.
inline constexpr int kInputSide = 96;

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
};

struct PipelineConfig {
  int capture_width = 320;
  int capture_height = 240;
  // Side of the centered square crop taken from the capture frame.
  int crop_side = 240;
  // Side of the square tensor the crop is resized to.
  int input_side = kInputSide;
  // Quantization of the network input (and of the grid embedding).
  QuantParams input_qp{1.0f / 255.0f, -128};
  // Face region in capture-frame coordinates encoded by the grid embedding.
  Rect grid_rect{40, 0, 240, 240};
};

// Derives a config from the model's input spec and the capture geometry.
// crop_side <= 0 selects the largest centered square.
PipelineConfig make_pipeline_config(const Model& m, int capture_width = 320,
                                    int capture_height = 240,
                                    int crop_side = 0);

struct GazeEstimate {
  float x_cm = 0.0f;  // clamped to [-10, 10], centimetres from the camera
  float y_cm = 0.0f;
  float raw_x = 0.0f;  // pre-clamp network output, normalized units
  float raw_y = 0.0f;
  uint32_t inference_micros = 0;  // filled in by predict()
};

// Binary occupancy plane over an input_side x input_side grid laid over the
// capture frame: a cell stores quantize(1) when its center falls inside
// cfg.grid_rect and quantize(0) otherwise. Shape (1, side, side, 1).
Tensor make_grid_embedding(const PipelineConfig& cfg);

// gray -> centered square crop -> bilinear resize -> quantize. When
// `grid_plane` is non-null its values are interleaved as a second channel.
// The frame must match cfg's capture dimensions.
Tensor preprocess(const Image& frame, const PipelineConfig& cfg,
                  const Tensor* grid_plane);

// Maps the raw network output to screen coordinates in centimetres:
// clamp to [-1, 1], times 10. Non-finite outputs raise InvalidOutputError.
GazeEstimate postprocess(const Tensor& raw);

// Deterministic gaze model: the depthwise-separable reference topology with
// seed-derived weights and activation ranges calibrated on synthetic frames.
// Identical arguments always produce bit-identical models.
Model build_reference_model(uint32_t seed, int capture_width = 320,
                            int capture_height = 240, int crop_side = 0);

struct Engine {
  Model model;
  ArenaPlan plan;
  PipelineConfig config;
  std::string name;
  // Wall time the most recent execute() took, in microseconds.
  uint64_t last_inference_micros = 0;

  GazeEstimate predict(const Image& frame);
};

// Validates and plans the model; throws on an invalid model or a busted
// arena budget.
Engine make_engine(Model model, int capture_width = 320,
                   int capture_height = 240, int crop_side = 0,
                   std::string name = "");

// Full pipeline pass with an explicit config (the engine's stays untouched).
// Updates eng.last_inference_micros.
GazeEstimate predict(Engine& eng, const Image& frame,
                     const PipelineConfig& cfg);

namespace detail {

// Recipe entry for build_chain_model. Convolutions use TF-style same padding
// (extra pixel on the bottom/right when the total is odd).
struct ArchLayer {
  LayerKind kind;
  int out_channels = 0;  // conv2d / fc kinds
  int kernel = 1;        // conv kinds
  int stride = 1;        // conv kinds
};

// Generic deterministic builder behind build_reference_model; also used by
// tests to make small chains with the same calibration scheme.
Model build_chain_model(const std::vector<ArchLayer>& arch, uint32_t seed,
                        int capture_width, int capture_height, int crop_side);

}  // namespace detail

}  // namespace ttks

#endif  // TTKS_PIPELINE_HPP_
