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

#include <algorithm>
#include <charconv>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "tacticforge/common/io.hpp"
#include "tacticforge/label/label.hpp"

namespace tacticforge::label {

namespace {

template <typename T>
T parse_number(std::string_view field, std::size_t line_no) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("snort log line " + std::to_string(line_no) +
                                ": bad number '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::vector<LogEntry> parse_snort_log(std::string_view csv) {
  std::vector<LogEntry> out;
  std::size_t line_no = 0;
  for (const auto& line : io::split_lines(csv)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("ts_us", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("snort log line " + std::to_string(line_no) + ": missing ','");
    }
    const std::string_view view(line);
    out.push_back({parse_number<std::int64_t>(view.substr(0, comma), line_no),
                   parse_number<std::uint32_t>(view.substr(comma + 1), line_no)});
  }
  return out;
}

std::string snort_log_to_csv(const std::vector<LogEntry>& entries) {
  std::string out = "ts_us,sid\n";
  for (const auto& e : entries) {
    out += std::to_string(e.timestamp_us);
    out.push_back(',');
    out += std::to_string(e.sid);
    out.push_back('\n');
  }
  return out;
}

JoinResult join_snort_log(const std::vector<LogEntry>& log,
                          const std::vector<ingest::NormalizedPayload>& payloads,
                          const std::map<std::uint32_t, PacketLabel>& sid_to_label) {
  std::unordered_map<std::int64_t, std::set<std::uint32_t>> sids_at;
  for (const auto& e : log) {
    if (!sid_to_label.count(e.sid)) {
      throw std::invalid_argument("snort log references unknown sid " + std::to_string(e.sid));
    }
    sids_at[e.timestamp_us].insert(e.sid);
  }

  JoinResult result;
  for (const auto& payload : payloads) {
    std::set<PacketLabel> labels;
    for (auto ts : payload.origin_timestamps) {
      auto it = sids_at.find(ts);
      if (it == sids_at.end()) continue;
      for (auto sid : it->second) labels.insert(sid_to_label.at(sid));
    }
    labels.erase(PacketLabel::kUnknown);
    if (labels.empty()) {
      result.unlabeled.push_back(payload);
      continue;
    }
    std::vector<PacketLabel> list(labels.begin(), labels.end());
    if (PacketClass::valid(list)) {
      result.labeled.push_back({payload, std::nullopt, PacketClass::of(list), Provenance::kSnort});
      continue;
    }
    const bool mixed = labels.count(PacketLabel::kNonAttack) > 0;
    result.flagged.push_back({payload, list,
                              mixed ? "non-attack rule fired together with a tactic rule"
                                    : "more than two tactics matched"});
  }
  return result;
}

}  // namespace tacticforge::label
