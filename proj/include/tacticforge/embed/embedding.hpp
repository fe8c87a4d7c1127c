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

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tacticforge/common/matrix.hpp"

namespace tacticforge::embed {

inline constexpr std::size_t kDim = 768;

struct EmbeddingVector {
  std::vector<double> values;
  std::string backend_id;

  // Throws ProtocolError unless there are exactly kDim finite components.
  void validate() const;
};

// A text -> vector model. Identical text must always embed identically.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::string name() const = 0;
  virtual std::size_t max_tokens() const = 0;
  // One vector per input, in order. An empty batch returns an empty list.
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& batch) = 0;
};

// Signed feature hashing of character 3..5-grams into kDim bins followed by
// L2 normalization. Texts shorter than three characters hash as a single
// gram; the empty text maps to the zero vector.
EmbeddingVector embed_reference(std::string_view text);

class ReferenceBackend final : public EmbeddingBackend {
 public:
  explicit ReferenceBackend(std::size_t max_tokens = 512) : max_tokens_(max_tokens) {}
  std::string name() const override { return "reference"; }
  std::size_t max_tokens() const override { return max_tokens_; }
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& batch) override;

 private:
  std::size_t max_tokens_;
};

struct RemoteOptions {
  std::string endpoint;  // e.g. "http://127.0.0.1:8000"
  std::size_t batch_limit = 64;
  int attempts = 3;
  int initial_backoff_ms = 200;
  int timeout_s = 60;
  std::size_t max_tokens = 512;
};

struct HealthStatus {
  std::string status;
  std::string model;
};

// Client for the embedding service: POST /embed {"texts": [...]} ->
// {"vectors": [[768 floats], ...]}, GET /health.
class RemoteBackend final : public EmbeddingBackend {
 public:
  explicit RemoteBackend(RemoteOptions options);
  std::string name() const override { return "remote:" + options_.endpoint; }
  std::size_t max_tokens() const override { return options_.max_tokens; }
  // Splits into batches of at most batch_limit.
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

  // Exactly one request; batch must not exceed batch_limit.
  std::vector<EmbeddingVector> embed_remote(const std::vector<std::string>& batch);
  HealthStatus health();

 private:
  RemoteOptions options_;
};

// "reference" or "remote:<url>".
std::unique_ptr<EmbeddingBackend> make_backend(std::string_view spec);

// Embeddings for an ordered list of payloads, persisted in a small
// little-endian binary container.
struct EmbeddingTable {
  std::string backend_id;
  Matrix vectors;  // rows x kDim

  std::string serialize() const;
  static EmbeddingTable deserialize(std::string_view bytes);
};

EmbeddingTable embed_all(EmbeddingBackend& backend, const std::vector<std::string>& texts,
                         std::size_t batch_size = 64);

}  // namespace tacticforge::embed
