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

#include <bit>
#include <cstring>

#include "tacticforge/common/error.hpp"
#include "tacticforge/embed/embedding.hpp"

namespace tacticforge::embed {

namespace {

constexpr std::string_view kMagic = "TFEMB001";

static_assert(std::endian::native == std::endian::little,
              "embedding tables are written in native little-endian order");

template <typename T>
void put(std::string& out, T value) {
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.append(raw, sizeof(T));
}

template <typename T>
T take(std::string_view bytes, std::size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) throw Error("embedding table truncated");
  T value;
  std::memcpy(&value, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

}  // namespace

std::unique_ptr<EmbeddingBackend> make_backend(std::string_view spec) {
  if (spec == "reference") return std::make_unique<ReferenceBackend>();
  if (spec.starts_with("remote:")) {
    RemoteOptions options;
    options.endpoint = std::string(spec.substr(7));
    return std::make_unique<RemoteBackend>(options);
  }
  throw ConfigError("unknown embedding backend '" + std::string(spec) +
                    "' (expected reference or remote:<url>)");
}

std::string EmbeddingTable::serialize() const {
  std::string out(kMagic);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(vectors.cols()));
  put<std::uint64_t>(out, vectors.rows());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(backend_id.size()));
  out += backend_id;
  out.append(reinterpret_cast<const char*>(vectors.data()),
             vectors.rows() * vectors.cols() * sizeof(double));
  return out;
}

EmbeddingTable EmbeddingTable::deserialize(std::string_view bytes) {
  if (!bytes.starts_with(kMagic)) throw Error("not an embedding table (bad magic)");
  std::size_t pos = kMagic.size();
  const auto dim = take<std::uint32_t>(bytes, pos);
  const auto rows = take<std::uint64_t>(bytes, pos);
  const auto id_len = take<std::uint32_t>(bytes, pos);
  if (pos + id_len > bytes.size()) throw Error("embedding table truncated");
  EmbeddingTable table;
  table.backend_id = std::string(bytes.substr(pos, id_len));
  pos += id_len;
  const std::size_t payload = static_cast<std::size_t>(rows) * dim * sizeof(double);
  if (bytes.size() - pos != payload) throw Error("embedding table size mismatch");
  table.vectors = Matrix(rows, dim);
  if (payload > 0) std::memcpy(table.vectors.data(), bytes.data() + pos, payload);
  return table;
}

EmbeddingTable embed_all(EmbeddingBackend& backend, const std::vector<std::string>& texts,
                         std::size_t batch_size) {
  EmbeddingTable table;
  table.backend_id = backend.name();
  table.vectors = Matrix(texts.size(), kDim);
  for (std::size_t start = 0; start < texts.size(); start += batch_size) {
    const std::size_t end = std::min(texts.size(), start + batch_size);
    std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                   texts.begin() + static_cast<std::ptrdiff_t>(end));
    const auto vectors = backend.embed(batch);
    if (vectors.size() != batch.size()) {
      throw ProtocolError("backend returned " + std::to_string(vectors.size()) +
                          " vectors for " + std::to_string(batch.size()) + " texts");
    }
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      vectors[i].validate();
      std::copy(vectors[i].values.begin(), vectors[i].values.end(),
                table.vectors.row(start + i).begin());
    }
  }
  return table;
}

}  // namespace tacticforge::embed
