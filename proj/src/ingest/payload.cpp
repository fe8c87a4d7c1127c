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

#include "tacticforge/ingest/payload.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "tacticforge/common/error.hpp"
#include "tacticforge/common/io.hpp"

namespace tacticforge::ingest {

namespace {

constexpr std::string_view kReplacement = "\xEF\xBF\xBD";

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_word(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_product_char(char c) {
  return is_word(c) || c == '-' || c == '.' || c == '+';
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Header name of a line ("Name: value"), lowercased; empty if none.
std::string header_name(std::string_view line) {
  const auto colon = line.find(':');
  if (colon == std::string_view::npos || colon == 0) return {};
  return lower(line.substr(0, colon));
}

// Length of a dotted quad starting at `pos`, or 0.
std::size_t match_ipv4(std::string_view s, std::size_t pos) {
  if (pos > 0 && is_digit(s[pos - 1])) return 0;
  std::size_t i = pos;
  for (int group = 0; group < 4; ++group) {
    if (group > 0) {
      if (i >= s.size() || s[i] != '.') return 0;
      ++i;
    }
    std::size_t digits = 0;
    int value = 0;
    while (i < s.size() && is_digit(s[i]) && digits < 3) {
      value = value * 10 + (s[i] - '0');
      ++i;
      ++digits;
    }
    if (digits == 0 || value > 255) return 0;
    if (i < s.size() && is_digit(s[i])) return 0;
  }
  return i - pos;
}

std::string replace_ipv4(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (is_digit(s[i])) {
      if (const std::size_t len = match_ipv4(s, i); len > 0) {
        out += "IP";
        i += len;
        continue;
      }
    }
    out.push_back(s[i]);
    ++i;
  }
  return out;
}

// name/digits[.digits]* -> name/VERSION, applied to one User-Agent line.
std::string replace_versions(std::string_view line) {
  std::string out;
  out.reserve(line.size());
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '/' && !out.empty() && is_product_char(out.back())) {
      std::size_t j = i + 1;
      bool ok = j < line.size() && is_digit(line[j]);
      while (ok) {
        while (j < line.size() && is_digit(line[j])) ++j;
        if (j + 1 < line.size() && line[j] == '.' && is_digit(line[j + 1])) {
          ++j;
          continue;
        }
        break;
      }
      if (ok && (j >= line.size() || !is_word(line[j]))) {
        out += "/VERSION";
        i = j;
        continue;
      }
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

}  // namespace

std::string decode_utf8_lossy(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char lead = p[i];
    if (lead < 0x80) {
      out.push_back(static_cast<char>(lead));
      ++i;
      continue;
    }
    std::size_t need = 0;
    unsigned char lo = 0x80, hi = 0xBF;
    if (lead >= 0xC2 && lead <= 0xDF) {
      need = 1;
    } else if (lead >= 0xE0 && lead <= 0xEF) {
      need = 2;
      if (lead == 0xE0) lo = 0xA0;
      if (lead == 0xED) hi = 0x9F;
    } else if (lead >= 0xF0 && lead <= 0xF4) {
      need = 3;
      if (lead == 0xF0) lo = 0x90;
      if (lead == 0xF4) hi = 0x8F;
    } else {
      out += kReplacement;
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    std::size_t valid = 0;
    while (valid < need && j < n) {
      const unsigned char b = p[j];
      const unsigned char min = valid == 0 ? lo : 0x80;
      const unsigned char max = valid == 0 ? hi : 0xBF;
      if (b < min || b > max) break;
      ++valid;
      ++j;
    }
    if (valid == need) {
      out.append(bytes.substr(i, need + 1));
    } else {
      out += kReplacement;
    }
    i = j;
  }
  return out;
}

std::optional<std::string> extract_http(const PacketRecord& record) {
  if (record.direction != Direction::kInbound) return std::nullopt;
  static constexpr std::array<std::string_view, 9> kMethods = {
      "GET ", "POST ", "HEAD ", "PUT ", "DELETE ", "OPTIONS ", "TRACE ", "CONNECT ", "PATCH "};
  const std::string_view bytes = record.payload_bytes;
  bool http = bytes.starts_with("HTTP/");
  for (auto m : kMethods) http = http || bytes.starts_with(m);
  if (!http) return std::nullopt;
  return decode_utf8_lossy(bytes);
}

std::string normalize(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  std::size_t start = 0;
  while (start < raw.size()) {
    std::size_t end = raw.find('\n', start);
    end = end == std::string_view::npos ? raw.size() : end + 1;
    const std::string_view line = raw.substr(start, end - start);
    start = end;

    const std::string name = header_name(line);
    if (name == "accept" || name == "accept-encoding") continue;
    std::string rewritten = replace_ipv4(line);
    if (name == "user-agent") rewritten = replace_versions(rewritten);
    out += rewritten;
  }
  return out;
}

void to_json(nlohmann::json& j, const NormalizedPayload& p) {
  j = nlohmann::json{{"text", p.text}, {"mult", p.multiplicity()}, {"ts_us", p.origin_timestamps}};
}

void from_json(const nlohmann::json& j, NormalizedPayload& p) {
  p.text = j.at("text").get<std::string>();
  p.origin_timestamps = j.at("ts_us").get<std::vector<std::int64_t>>();
  if (j.contains("mult") && j.at("mult").get<std::size_t>() != p.origin_timestamps.size()) {
    throw Error("payload record: mult does not match ts_us length");
  }
}

void Deduplicator::add(std::string text, std::int64_t timestamp_us) {
  seen_[std::move(text)].push_back(timestamp_us);
  ++total_;
}

void Deduplicator::merge(const Deduplicator& other) {
  for (const auto& [text, stamps] : other.seen_) {
    auto& mine = seen_[text];
    mine.insert(mine.end(), stamps.begin(), stamps.end());
  }
  total_ += other.total_;
}

std::vector<NormalizedPayload> Deduplicator::finish() const {
  std::vector<NormalizedPayload> out;
  out.reserve(seen_.size());
  for (const auto& [text, stamps] : seen_) {
    NormalizedPayload p{text, stamps};
    std::sort(p.origin_timestamps.begin(), p.origin_timestamps.end());
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<NormalizedPayload> dedup(
    const std::vector<std::pair<std::string, std::int64_t>>& stream) {
  Deduplicator d;
  for (const auto& [text, ts] : stream) d.add(text, ts);
  return d.finish();
}

std::string payloads_to_jsonl(const std::vector<NormalizedPayload>& payloads) {
  std::string out;
  for (const auto& p : payloads) {
    out += nlohmann::json(p).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out.push_back('\n');
  }
  return out;
}

std::vector<NormalizedPayload> payloads_from_jsonl(std::string_view text) {
  std::vector<NormalizedPayload> out;
  for (const auto& line : io::split_lines(text)) {
    if (line.empty()) continue;
    out.push_back(nlohmann::json::parse(line).get<NormalizedPayload>());
  }
  return out;
}

}  // namespace tacticforge::ingest
