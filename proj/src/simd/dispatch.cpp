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

#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"
#include "tacticforge/simd/kernels.hpp"

namespace tacticforge::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

const KernelTable* avx2_kernels() {
#if defined(TACTICFORGE_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
  }();
  return supported ? detail::avx2_table_if_built() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() {
#if defined(TACTICFORGE_HAVE_NEON)
  // Advanced SIMD is mandatory on AArch64.
  return detail::neon_table_if_built();
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& chosen = []() -> const KernelTable& {
    const char* pin = std::getenv("TACTICFORGE_SIMD");
    if (pin != nullptr && std::string(pin) == "scalar") return scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return *t;
    if (const KernelTable* t = neon_kernels()) return *t;
    return scalar_kernels();
  }();
  return chosen;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

Nearest nearest_row(const KernelTable& k, const double* point,
                    const double* centers, std::size_t count,
                    std::size_t dim) {
  Nearest best;
  for (std::size_t c = 0; c < count; ++c) {
    const double d = k.squared_distance(point, centers + c * dim, dim);
    if (c == 0 || d < best.squared_distance) {
      best.index = c;
      best.squared_distance = d;
    }
  }
  return best;
}

}  // namespace tacticforge::simd
