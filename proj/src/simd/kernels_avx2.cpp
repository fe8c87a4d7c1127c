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

// Compiled with -mavx2 (and without -mfma). Only reached after a runtime
// CPU check in dispatch.cpp.

#include <immintrin.h>

#include "kernels_internal.hpp"

namespace tacticforge::simd {
namespace {

inline double fold(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d pair = _mm_add_pd(lo, hi);  // (s0 + s2, s1 + s3)
  const __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

double squared_distance_avx2(const double* a, const double* b,
                             std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double total = fold(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    total = total + d * d;
  }
  return total;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double total = fold(acc);
  for (; i < n; ++i) total = total + a[i] * b[i];
  return total;
}

void accumulate_avx2(double* y, const double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) y[i] = y[i] + x[i];
}

void axpy_avx2(double* y, double alpha, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void pull_toward_avx2(double* w, const double* x, double rate, std::size_t n) {
  const __m256d vr = _mm256_set1_pd(rate);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wv = _mm256_loadu_pd(w + i);
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(x + i), wv);
    _mm256_storeu_pd(w + i, _mm256_add_pd(wv, _mm256_mul_pd(vr, diff)));
  }
  for (; i < n; ++i) w[i] = w[i] + rate * (x[i] - w[i]);
}

void scale_avx2(double* y, double alpha, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(y + i), va));
  }
  for (; i < n; ++i) y[i] = y[i] * alpha;
}

}  // namespace

namespace detail {

const KernelTable* avx2_table_if_built() {
  static const KernelTable table{
      Isa::kAvx2,      squared_distance_avx2, dot_avx2,
      accumulate_avx2, axpy_avx2,             pull_toward_avx2,
      scale_avx2,
  };
  return &table;
}

}  // namespace detail
}  // namespace tacticforge::simd
