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

#ifndef TTKS_EXECUTE_HPP_
#define TTKS_EXECUTE_HPP_

#include "ttks/arena.hpp"
#include "ttks/model.hpp"
#include "ttks/tensor.hpp"

namespace ttks {

// Runs the layer chain over one input tensor using the planned arena offsets.
// `input` must match the model's input spec exactly (dims, element kind and
// quantization). Returns the terminal full-precision output.
Tensor execute(const Model& m, const ArenaPlan& plan, const Tensor& input);

}  // namespace ttks

#endif  // TTKS_EXECUTE_HPP_
