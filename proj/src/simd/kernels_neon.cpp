// Copyright 2026 The TacticForge Authors.
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

// AArch64 only. Two float64x2 accumulators hold (s0, s1) and (s2, s3) so the
// fold order matches the scalar reference.

#include <arm_neon.h>

#include "kernels_internal.hpp"

namespace tacticforge::simd {
namespace {

inline double fold(float64x2_t lo, float64x2_t hi) {
  const float64x2_t pair = vaddq_f64(lo, hi);
  return vgetq_lane_f64(pair, 0) + vgetq_lane_f64(pair, 1);
}

double squared_distance_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    lo = vaddq_f64(lo, vmulq_f64(d0, d0));
    hi = vaddq_f64(hi, vmulq_f64(d1, d1));
  }
  double total = fold(lo, hi);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    total = total + d * d;
  }
  return total;
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double total = fold(lo, hi);
  for (; i < n; ++i) total = total + a[i] * b[i];
  return total;
}

void accumulate_neon(double* y, const double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = y[i] + x[i];
}

void axpy_neon(double* y, double alpha, const double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void pull_toward_neon(double* w, const double* x, double rate, std::size_t n) {
  const float64x2_t vr = vdupq_n_f64(rate);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t wv = vld1q_f64(w + i);
    const float64x2_t diff = vsubq_f64(vld1q_f64(x + i), wv);
    vst1q_f64(w + i, vaddq_f64(wv, vmulq_f64(vr, diff)));
  }
  for (; i < n; ++i) w[i] = w[i] + rate * (x[i] - w[i]);
}

void scale_neon(double* y, double alpha, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmulq_f64(vld1q_f64(y + i), va));
  for (; i < n; ++i) y[i] = y[i] * alpha;
}

}  // namespace

namespace detail {

const KernelTable* neon_table_if_built() {
  static const KernelTable table{
      Isa::kNeon,      squared_distance_neon, dot_neon,
      accumulate_neon, axpy_neon,             pull_toward_neon,
      scale_neon,
  };
  return &table;
}

}  // namespace detail
}  // namespace tacticforge::simd
