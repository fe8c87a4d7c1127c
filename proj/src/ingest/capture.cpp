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

#include "tacticforge/ingest/capture.hpp"

#include <algorithm>
#include <array>
#include <cstring>

#include <nlohmann/json.hpp>

#include "tacticforge/common/error.hpp"
#include "tacticforge/common/io.hpp"

namespace tacticforge::ingest {

namespace {

constexpr std::uint32_t kPcapMagicMicro = 0xa1b2c3d4;
constexpr std::uint32_t kPcapMagicNano = 0xa1b23c4d;
constexpr std::uint32_t kPcapngMagic = 0x0a0d0d0a;
constexpr std::uint32_t kMaxRecordBytes = 1u << 20;

constexpr std::uint32_t kLinkNull = 0;
constexpr std::uint32_t kLinkEthernet = 1;
constexpr std::uint32_t kLinkRaw = 101;
constexpr std::uint32_t kLinkLinuxSll = 113;

std::uint16_t be16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

std::uint32_t le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint32_t bswap32(std::uint32_t v) {
  return ((v & 0xFF) << 24) | ((v & 0xFF00) << 8) | ((v >> 8) & 0xFF00) | (v >> 24);
}

// Network-layer decode result shared by all link types.
FrameDecode decode_ip(const std::uint8_t* data, std::size_t size, std::int64_t ts) {
  FrameDecode out;
  if (size < 1) {
    out.malformed = true;
    return out;
  }
  const unsigned version = data[0] >> 4;
  IpAddress src, dst;
  const std::uint8_t* l4 = nullptr;
  std::size_t l4_size = 0;
  if (version == 4) {
    if (size < 20) {
      out.malformed = true;
      return out;
    }
    const std::size_t ihl = static_cast<std::size_t>(data[0] & 0x0F) * 4;
    const std::size_t total = be16(data + 2);
    if (ihl < 20 || total < ihl || total > size) {
      out.malformed = true;
      return out;
    }
    const std::uint16_t frag = be16(data + 6);
    if ((frag & 0x1FFF) != 0 || data[9] != 6) return out;  // later fragment or not TCP
    src = IpAddress::v4(data + 12);
    dst = IpAddress::v4(data + 16);
    l4 = data + ihl;
    l4_size = total - ihl;
  } else if (version == 6) {
    if (size < 40) {
      out.malformed = true;
      return out;
    }
    const std::size_t payload_len = be16(data + 4);
    if (40 + payload_len > size) {
      out.malformed = true;
      return out;
    }
    if (data[6] != 6) return out;
    src = IpAddress::v6(data + 8);
    dst = IpAddress::v6(data + 24);
    l4 = data + 40;
    l4_size = payload_len;
  } else {
    out.malformed = true;
    return out;
  }

  if (l4_size < 20) {
    out.malformed = true;
    return out;
  }
  const std::size_t tcp_header = static_cast<std::size_t>(l4[12] >> 4) * 4;
  if (tcp_header < 20 || tcp_header > l4_size) {
    out.malformed = true;
    return out;
  }
  PacketRecord rec;
  rec.timestamp_us = ts;
  rec.src_ip = src;
  rec.dst_ip = dst;
  rec.src_port = be16(l4);
  rec.dst_port = be16(l4 + 2);
  rec.payload_bytes.assign(reinterpret_cast<const char*>(l4 + tcp_header), l4_size - tcp_header);
  out.record = std::move(rec);
  return out;
}

}  // namespace

FrameDecode decode_frame(std::uint32_t linktype, const std::uint8_t* data, std::size_t size,
                         std::int64_t timestamp_us) {
  switch (linktype) {
    case kLinkEthernet: {
      std::size_t offset = 12;
      if (size < offset + 2) return {std::nullopt, true};
      std::uint16_t ethertype = be16(data + offset);
      offset += 2;
      while (ethertype == 0x8100 || ethertype == 0x88A8) {
        if (size < offset + 4) return {std::nullopt, true};
        ethertype = be16(data + offset + 2);
        offset += 4;
      }
      if (ethertype != 0x0800 && ethertype != 0x86DD) return {};
      return decode_ip(data + offset, size - offset, timestamp_us);
    }
    case kLinkRaw:
      return decode_ip(data, size, timestamp_us);
    case kLinkNull:
      if (size < 4) return {std::nullopt, true};
      return decode_ip(data + 4, size - 4, timestamp_us);
    case kLinkLinuxSll: {
      if (size < 16) return {std::nullopt, true};
      const std::uint16_t proto = be16(data + 14);
      if (proto != 0x0800 && proto != 0x86DD) return {};
      return decode_ip(data + 16, size - 16, timestamp_us);
    }
    default:
      return {};
  }
}

class CaptureReader::Source {
 public:
  virtual ~Source() = default;
  // Returns false at end of input. `malformed` flags a skipped record.
  virtual bool next(FrameDecode& out) = 0;
};

namespace {

class PcapSource final : public CaptureReader::Source {
 public:
  PcapSource(std::ifstream in, const std::array<std::uint8_t, 24>& header)
      : in_(std::move(in)) {
    std::uint32_t magic = le32(header.data());
    if (magic == kPcapMagicMicro || magic == kPcapMagicNano) {
      swapped_ = false;
    } else {
      swapped_ = true;
      magic = bswap32(magic);
    }
    nanos_ = magic == kPcapMagicNano;
    linktype_ = read32(header.data() + 20) & 0x0FFFFFFF;
    offset_ = 24;
  }

  bool next(FrameDecode& out) override {
    std::array<std::uint8_t, 16> rh{};
    in_.read(reinterpret_cast<char*>(rh.data()), rh.size());
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got == 0) return false;
    if (got < rh.size()) throw CaptureError("truncated pcap record header", offset_);
    const std::uint32_t sec = read32(rh.data());
    const std::uint32_t frac = read32(rh.data() + 4);
    const std::uint32_t incl = read32(rh.data() + 8);
    if (incl > kMaxRecordBytes) throw CaptureError("implausible pcap record length", offset_);
    buffer_.resize(incl);
    in_.read(reinterpret_cast<char*>(buffer_.data()), incl);
    if (static_cast<std::uint32_t>(in_.gcount()) != incl) {
      throw CaptureError("pcap record data extends past end of file", offset_);
    }
    const std::int64_t ts = static_cast<std::int64_t>(sec) * 1'000'000 +
                            (nanos_ ? frac / 1000 : frac);
    out = decode_frame(linktype_, buffer_.data(), buffer_.size(), ts);
    offset_ += rh.size() + incl;
    return true;
  }

 private:
  std::uint32_t read32(const std::uint8_t* p) const {
    const std::uint32_t v = le32(p);
    return swapped_ ? bswap32(v) : v;
  }

  std::ifstream in_;
  bool swapped_ = false;
  bool nanos_ = false;
  std::uint32_t linktype_ = kLinkEthernet;
  std::uint64_t offset_ = 0;
  std::vector<std::uint8_t> buffer_;
};

class JsonlSource final : public CaptureReader::Source {
 public:
  explicit JsonlSource(std::ifstream in) : in_(std::move(in)) {}

  bool next(FrameDecode& out) override {
    std::string line;
    while (true) {
      if (!std::getline(in_, line)) return false;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      out = {};
      try {
        const auto obj = nlohmann::json::parse(line);
        PacketRecord rec;
        rec.timestamp_us = obj.at("ts_us").get<std::int64_t>();
        const auto src = IpAddress::parse(obj.at("src").get<std::string>());
        const auto dst = IpAddress::parse(obj.at("dst").get<std::string>());
        const int sport = obj.at("sport").get<int>();
        const int dport = obj.at("dport").get<int>();
        if (!src || !dst || sport < 0 || sport > 65535 || dport < 0 || dport > 65535) {
          out.malformed = true;
          return true;
        }
        rec.src_ip = *src;
        rec.dst_ip = *dst;
        rec.src_port = static_cast<std::uint16_t>(sport);
        rec.dst_port = static_cast<std::uint16_t>(dport);
        const auto bytes = io::base64_decode(obj.at("payload_b64").get<std::string>());
        rec.payload_bytes.assign(bytes.begin(), bytes.end());
        out.record = std::move(rec);
      } catch (const std::exception&) {
        out.malformed = true;
      }
      return true;
    }
  }

 private:
  std::ifstream in_;
};

}  // namespace

CaptureReader::CaptureReader(const std::filesystem::path& path, CaptureOptions options)
    : options_(std::move(options)) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CaptureError("cannot open capture " + path.string(), 0);
  std::array<std::uint8_t, 24> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  const auto got = static_cast<std::size_t>(in.gcount());
  const std::uint32_t magic = got >= 4 ? le32(header.data()) : 0;
  const bool pcap = got >= 4 && (magic == kPcapMagicMicro || magic == kPcapMagicNano ||
                                 bswap32(magic) == kPcapMagicMicro ||
                                 bswap32(magic) == kPcapMagicNano);
  if (pcap) {
    if (got < header.size()) throw CaptureError("truncated pcap global header", got);
    source_ = std::make_unique<PcapSource>(std::move(in), header);
    return;
  }
  if (got >= 4 && magic == kPcapngMagic) {
    throw CaptureError("pcapng captures are not supported; convert to libpcap", 0);
  }
  // JSONL fallback: first non-blank character must open an object.
  std::size_t i = 0;
  while (i < got && (header[i] == ' ' || header[i] == '\n' || header[i] == '\r' ||
                     header[i] == '\t')) {
    ++i;
  }
  if (i < got && header[i] != '{') throw CaptureError("unrecognized capture format", i);
  in.clear();
  in.seekg(0);
  source_ = std::make_unique<JsonlSource>(std::move(in));
}

CaptureReader::~CaptureReader() = default;
CaptureReader::CaptureReader(CaptureReader&&) noexcept = default;
CaptureReader& CaptureReader::operator=(CaptureReader&&) noexcept = default;

std::optional<PacketRecord> CaptureReader::next() {
  FrameDecode frame;
  while (source_->next(frame)) {
    ++stats_.records_seen;
    if (frame.malformed) {
      ++stats_.skipped_malformed;
      continue;
    }
    if (!frame.record) {
      ++stats_.filtered;
      continue;
    }
    PacketRecord& rec = *frame.record;
    const bool port_ok =
        std::find(options_.ports.begin(), options_.ports.end(), rec.dst_port) != options_.ports.end() ||
        std::find(options_.ports.begin(), options_.ports.end(), rec.src_port) != options_.ports.end();
    if (!port_ok) {
      ++stats_.filtered;
      continue;
    }
    rec.direction = options_.honeypot.contains(rec.dst_ip) ? Direction::kInbound : Direction::kOutbound;
    ++stats_.yielded;
    return std::move(rec);
  }
  return std::nullopt;
}

CaptureResult parse_capture(const std::filesystem::path& path, const CaptureOptions& options) {
  CaptureReader reader(path, options);
  CaptureResult result;
  while (auto rec = reader.next()) result.records.push_back(std::move(*rec));
  result.stats = reader.stats();
  return result;
}

}  // namespace tacticforge::ingest
