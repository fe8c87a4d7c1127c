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

#pragma once

// Dense double-precision kernels used by clustering, signatures and the
// classifier head. Every variant follows the same reduction order (four
// interleaved partial sums folded as (s0 + s2) + (s1 + s3), then the tail
// added left to right) and never fuses multiply-add, so scalar and vector
// paths return bit-identical results.

#include <cstddef>
#include <span>
#include <string_view>

namespace tacticforge::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i (a[i] - b[i])^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += x[i]
  void (*accumulate)(double* y, const double* x, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double* y, double alpha, const double* x, std::size_t n);
  // w[i] += rate * (x[i] - w[i])
  void (*pull_toward)(double* w, const double* x, double rate, std::size_t n);
  // y[i] *= alpha
  void (*scale)(double* y, double alpha, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// Best table for this CPU. Setting TACTICFORGE_SIMD=scalar in the
// environment pins the scalar reference.
const KernelTable& active();

// Convenience wrappers over active().
double squared_distance(std::span<const double> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);

struct Nearest {
  std::size_t index = 0;
  double squared_distance = 0.0;
};

// Row-major `centers` (count x dim). Ties resolve to the lowest index.
Nearest nearest_row(const KernelTable& k, const double* point,
                    const double* centers, std::size_t count, std::size_t dim);

}  // namespace tacticforge::simd
