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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tacticforge/ingest/capture.hpp"

namespace tacticforge::ingest {

// Decodes bytes as UTF-8, replacing each maximal invalid subsequence with
// U+FFFD.
std::string decode_utf8_lossy(std::string_view bytes);

// The payload text of an inbound packet that starts with an HTTP method
// token followed by a space, or with "HTTP/". Anything else yields nullopt.
std::optional<std::string> extract_http(const PacketRecord& record);

// Drops Accept / Accept-Encoding header lines, rewrites dotted-quad IPv4
// literals to "IP", and rewrites product versions inside User-Agent lines
// to "name/VERSION". Line order and line terminators are preserved.
std::string normalize(std::string_view raw);

struct NormalizedPayload {
  std::string text;
  std::vector<std::int64_t> origin_timestamps;  // ascending

  std::size_t multiplicity() const { return origin_timestamps.size(); }
  friend bool operator==(const NormalizedPayload&, const NormalizedPayload&) = default;
};

void to_json(nlohmann::json& j, const NormalizedPayload& p);
void from_json(const nlohmann::json& j, NormalizedPayload& p);

// Mergeable duplicate collapse. Output is ordered by text so partial
// deduplicators merged in any grouping produce the same result.
class Deduplicator {
 public:
  void add(std::string text, std::int64_t timestamp_us);
  void merge(const Deduplicator& other);
  std::size_t total() const { return total_; }
  std::vector<NormalizedPayload> finish() const;

 private:
  std::map<std::string, std::vector<std::int64_t>, std::less<>> seen_;
  std::size_t total_ = 0;
};

std::vector<NormalizedPayload> dedup(
    const std::vector<std::pair<std::string, std::int64_t>>& stream);

std::string payloads_to_jsonl(const std::vector<NormalizedPayload>& payloads);
std::vector<NormalizedPayload> payloads_from_jsonl(std::string_view text);

}  // namespace tacticforge::ingest
