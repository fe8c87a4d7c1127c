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

#include <cmath>
#include <cstdint>

#include "tacticforge/common/error.hpp"
#include "tacticforge/embed/embedding.hpp"

namespace tacticforge::embed {

namespace {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// splitmix64 finalizer; spreads FNV's weak low bits.
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void add_gram(std::vector<double>& bins, std::string_view gram) {
  const std::uint64_t h = mix(fnv1a(gram));
  const std::size_t bin = static_cast<std::size_t>(h % kDim);
  bins[bin] += (h >> 63) != 0 ? -1.0 : 1.0;
}

// Byte offsets of each UTF-8 code point start, plus the end offset.
std::vector<std::size_t> char_offsets(std::string_view text) {
  std::vector<std::size_t> offsets;
  offsets.reserve(text.size() + 1);
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) offsets.push_back(i);
  }
  offsets.push_back(text.size());
  return offsets;
}

}  // namespace

void EmbeddingVector::validate() const {
  if (values.size() != kDim) {
    throw ProtocolError("embedding has " + std::to_string(values.size()) +
                        " components, expected " + std::to_string(kDim));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ProtocolError("embedding component " + std::to_string(i) + " is not finite");
    }
  }
}

EmbeddingVector embed_reference(std::string_view text) {
  EmbeddingVector out{std::vector<double>(kDim, 0.0), "reference"};
  if (text.empty()) return out;

  const auto offsets = char_offsets(text);
  const std::size_t chars = offsets.size() - 1;
  if (chars < 3) {
    add_gram(out.values, text);
  } else {
    for (std::size_t n = 3; n <= 5; ++n) {
      for (std::size_t i = 0; i + n <= chars; ++i) {
        add_gram(out.values, text.substr(offsets[i], offsets[i + n] - offsets[i]));
      }
    }
  }

  double norm_sq = 0.0;
  for (double v : out.values) norm_sq += v * v;
  if (norm_sq == 0.0) {
    // Every bin cancelled; fall back to the whole-text gram.
    add_gram(out.values, text);
    norm_sq = 1.0;
  }
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& v : out.values) v *= inv;
  return out;
}

std::vector<EmbeddingVector> ReferenceBackend::embed(const std::vector<std::string>& batch) {
  std::vector<EmbeddingVector> out;
  out.reserve(batch.size());
  for (const auto& text : batch) out.push_back(embed_reference(text));
  return out;
}

}  // namespace tacticforge::embed
