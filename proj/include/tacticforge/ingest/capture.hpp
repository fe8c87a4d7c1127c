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
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tacticforge/ingest/address.hpp"

namespace tacticforge::ingest {

enum class Direction : std::uint8_t { kInbound, kOutbound };

struct PacketRecord {
  std::int64_t timestamp_us = 0;
  IpAddress src_ip;
  IpAddress dst_ip;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  Direction direction = Direction::kOutbound;
  std::string payload_bytes;  // TCP payload of this packet alone
};

struct CaptureOptions {
  PrefixSet honeypot;
  // A packet is kept when either port is listed.
  std::vector<std::uint16_t> ports{80, 8080};
};

struct CaptureStats {
  std::uint64_t records_seen = 0;
  std::uint64_t yielded = 0;
  std::uint64_t skipped_malformed = 0;
  std::uint64_t filtered = 0;  // non-IP, non-TCP, or port not listed
};

// Streams TCP packets out of a libpcap file or the JSONL fallback format
// ({"ts_us","src","dst","sport","dport","payload_b64"} per line), in file
// order. Unreadable input throws CaptureError naming the byte offset;
// a single malformed record is skipped and counted.
class CaptureReader {
 public:
  CaptureReader(const std::filesystem::path& path, CaptureOptions options);
  ~CaptureReader();
  CaptureReader(CaptureReader&&) noexcept;
  CaptureReader& operator=(CaptureReader&&) noexcept;

  std::optional<PacketRecord> next();
  const CaptureStats& stats() const { return stats_; }

  class Source;

 private:
  CaptureOptions options_;
  CaptureStats stats_;
  std::unique_ptr<Source> source_;
};

struct CaptureResult {
  std::vector<PacketRecord> records;
  CaptureStats stats;
};

CaptureResult parse_capture(const std::filesystem::path& path, const CaptureOptions& options);

// Decodes one link-layer frame; exposed for tests. Returns nullopt and sets
// `malformed` when headers are cut short or inconsistent.
struct FrameDecode {
  std::optional<PacketRecord> record;
  bool malformed = false;
};
FrameDecode decode_frame(std::uint32_t linktype, const std::uint8_t* data, std::size_t size,
                         std::int64_t timestamp_us);

}  // namespace tacticforge::ingest
