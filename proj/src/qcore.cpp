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

#include "ttks/qcore.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace ttks {
namespace {

constexpr int64_t kQ31 = int64_t{1} << 31;

}  // namespace

bool is_valid(const QuantParams& qp) {
  return std::isfinite(qp.scale) && qp.scale > 0.0f && qp.zero_point >= -128 &&
         qp.zero_point <= 127;
}

bool is_valid(const FixedMul& fm) {
  return fm.multiplier >= (1 << 30) && fm.right_shift >= 0 &&
         fm.right_shift <= 62;
}

double fixed_mul_value(const FixedMul& fm) {
  return std::ldexp(static_cast<double>(fm.multiplier), -31 - fm.right_shift);
}

int8_t quantize(double x, const QuantParams& qp) {
  const double v = x / static_cast<double>(qp.scale);
  if (std::isnan(v)) {
    return static_cast<int8_t>(qp.zero_point);
  }
  // std::round is round-half-away-from-zero, matching requantize().
  const double shifted = std::round(v) + static_cast<double>(qp.zero_point);
  if (shifted <= -128.0) return -128;
  if (shifted >= 127.0) return 127;
  return static_cast<int8_t>(shifted);
}

double dequantize(int8_t q, const QuantParams& qp) {
  return static_cast<double>(qp.scale) *
         (static_cast<double>(q) - static_cast<double>(qp.zero_point));
}

FixedMul derive_requant(double in_scale, double w_scale, double out_scale) {
  const auto bad = [&](const char* why) {
    std::ostringstream os;
    os << "unsupported requantization ratio (" << why << "): in_scale=" << in_scale
       << " w_scale=" << w_scale << " out_scale=" << out_scale;
    return UnsupportedRatioError(os.str());
  };
  if (!(std::isfinite(in_scale) && in_scale > 0.0) ||
      !(std::isfinite(w_scale) && w_scale > 0.0) ||
      !(std::isfinite(out_scale) && out_scale > 0.0)) {
    throw bad("scales must be positive and finite");
  }
  const double m = in_scale * w_scale / out_scale;
  if (!(m > 0.0)) throw bad("ratio underflows to zero");
  if (m > 1.0) throw bad("ratio exceeds 1");

  // Normalize m = q * 2^exp with q in [0.5, 1), then put q on 31 fractional
  // bits. Rounding q can carry up to exactly 2^31; fold the carry back into
  // the shift. m == 1 is the one ratio the [2^30, 2^31) window cannot hit
  // exactly; the saturated multiplier is off by 2^-31, well inside the
  // 2^-24 contract.
  int exp = 0;
  const double q = std::frexp(m, &exp);
  int64_t q_fixed = std::llround(q * static_cast<double>(kQ31));
  int right_shift = -exp;
  if (q_fixed == kQ31) {
    q_fixed >>= 1;
    --right_shift;
  }
  if (right_shift < 0) {
    // Only reachable when m rounds to 1.
    q_fixed = kQ31 - 1;
    right_shift = 0;
  }
  return FixedMul{static_cast<int32_t>(q_fixed), right_shift};
}

int8_t requantize(int32_t acc, const FixedMul& fm, int32_t out_zero_point) {
  // prod fits in 63 bits: |acc| <= 2^31, multiplier < 2^31.
  const int64_t prod = static_cast<int64_t>(acc) * fm.multiplier;
  const int shift = 31 + fm.right_shift;
  int64_t magnitude = prod < 0 ? -prod : prod;
  int64_t rounded;
  if (shift >= 64) {
    rounded = 0;  // |prod| < 2^62 < 2^(shift-1): rounds to zero.
  } else {
    rounded = (magnitude + (int64_t{1} << (shift - 1))) >> shift;
  }
  int64_t value = (prod < 0 ? -rounded : rounded) + out_zero_point;
  if (value < -128) value = -128;
  if (value > 127) value = 127;
  return static_cast<int8_t>(value);
}

}  // namespace ttks
