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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ttks {

// Base class for every error raised by the runtime.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or element-kind contract violation in a kernel or the executor.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Requantization ratio outside the representable (0, 1] range.
class UnsupportedRatioError : public Error {
 public:
  using Error::Error;
};

enum class DecodeErrorKind : uint8_t {
  kBadMagic,
  kBadVersion,
  kTruncated,
  kChecksumMismatch,
  kUnknownLayerKind,
  kUnknownElementKind,
  kMalformed,
};

// Raised when a serialized model cannot be decoded. `kind()` tells why.
class DecodeError : public Error {
 public:
  DecodeError(DecodeErrorKind kind, const std::string& message)
      : Error(message), kind_(kind) {}
  DecodeErrorKind kind() const { return kind_; }

 private:
  DecodeErrorKind kind_;
};

// Raised by the arena planner when the activation peak exceeds the budget.
class BudgetError : public Error {
 public:
  BudgetError(uint64_t peak_bytes, int layer_index, const std::string& message)
      : Error(message), peak_bytes_(peak_bytes), layer_index_(layer_index) {}
  uint64_t peak_bytes() const { return peak_bytes_; }
  int layer_index() const { return layer_index_; }

 private:
  uint64_t peak_bytes_;
  int layer_index_;
};

// Non-finite value where a finite one is required (e.g. model output).
class InvalidOutputError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ttks
