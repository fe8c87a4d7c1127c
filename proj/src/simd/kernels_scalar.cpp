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

#include "tacticforge/simd/kernels.hpp"

#include "kernels_internal.hpp"

namespace tacticforge::simd {
namespace {

double squared_distance_scalar(const double* a, const double* b,
                               std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double d0 = a[i] - b[i];
    const double d1 = a[i + 1] - b[i + 1];
    const double d2 = a[i + 2] - b[i + 2];
    const double d3 = a[i + 3] - b[i + 3];
    s0 = s0 + d0 * d0;
    s1 = s1 + d1 * d1;
    s2 = s2 + d2 * d2;
    s3 = s3 + d3 * d3;
  }
  double total = (s0 + s2) + (s1 + s3);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    total = total + d * d;
  }
  return total;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 = s0 + a[i] * b[i];
    s1 = s1 + a[i + 1] * b[i + 1];
    s2 = s2 + a[i + 2] * b[i + 2];
    s3 = s3 + a[i + 3] * b[i + 3];
  }
  double total = (s0 + s2) + (s1 + s3);
  for (; i < n; ++i) total = total + a[i] * b[i];
  return total;
}

void accumulate_scalar(double* y, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + x[i];
}

void axpy_scalar(double* y, double alpha, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void pull_toward_scalar(double* w, const double* x, double rate,
                        std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) w[i] = w[i] + rate * (x[i] - w[i]);
}

void scale_scalar(double* y, double alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] * alpha;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      Isa::kScalar,       squared_distance_scalar, dot_scalar,
      accumulate_scalar,  axpy_scalar,             pull_toward_scalar,
      scale_scalar,
  };
  return table;
}

}  // namespace tacticforge::simd
