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

#include "tacticforge/ingest/address.hpp"

#include <arpa/inet.h>

#include <charconv>
#include <cstring>

#include "tacticforge/common/error.hpp"

namespace tacticforge::ingest {

std::optional<IpAddress> IpAddress::parse(std::string_view text) {
  const std::string s(text);
  IpAddress addr;
  if (inet_pton(AF_INET, s.c_str(), addr.bytes.data()) == 1) {
    addr.family = Family::kV4;
    return addr;
  }
  if (inet_pton(AF_INET6, s.c_str(), addr.bytes.data()) == 1) {
    addr.family = Family::kV6;
    return addr;
  }
  return std::nullopt;
}

IpAddress IpAddress::v4(const std::uint8_t* raw) {
  IpAddress addr;
  addr.family = Family::kV4;
  std::memcpy(addr.bytes.data(), raw, 4);
  return addr;
}

IpAddress IpAddress::v6(const std::uint8_t* raw) {
  IpAddress addr;
  addr.family = Family::kV6;
  std::memcpy(addr.bytes.data(), raw, 16);
  return addr;
}

std::string IpAddress::to_string() const {
  char buf[INET6_ADDRSTRLEN] = {};
  const int af = family == Family::kV4 ? AF_INET : AF_INET6;
  inet_ntop(af, bytes.data(), buf, sizeof(buf));
  return buf;
}

IpPrefix IpPrefix::parse(std::string_view text) {
  const auto slash = text.find('/');
  const auto addr = IpAddress::parse(text.substr(0, slash));
  if (!addr) throw ConfigError("invalid prefix address: " + std::string(text));
  IpPrefix prefix;
  prefix.base = *addr;
  const unsigned max_len = addr->family == IpAddress::Family::kV4 ? 32 : 128;
  prefix.length = max_len;
  if (slash != std::string_view::npos) {
    const std::string_view len = text.substr(slash + 1);
    unsigned value = 0;
    auto [end, ec] = std::from_chars(len.data(), len.data() + len.size(), value);
    if (ec != std::errc{} || end != len.data() + len.size() || value > max_len) {
      throw ConfigError("invalid prefix length: " + std::string(text));
    }
    prefix.length = value;
  }
  return prefix;
}

bool IpPrefix::contains(const IpAddress& addr) const {
  if (addr.family != base.family) return false;
  const unsigned full = length / 8;
  if (std::memcmp(addr.bytes.data(), base.bytes.data(), full) != 0) return false;
  const unsigned rest = length % 8;
  if (rest == 0) return true;
  const auto mask = static_cast<std::uint8_t>(0xFF << (8 - rest));
  return (addr.bytes[full] & mask) == (base.bytes[full] & mask);
}

PrefixSet PrefixSet::parse(const std::vector<std::string>& texts) {
  std::vector<IpPrefix> prefixes;
  prefixes.reserve(texts.size());
  for (const auto& t : texts) prefixes.push_back(IpPrefix::parse(t));
  return PrefixSet(std::move(prefixes));
}

bool PrefixSet::contains(const IpAddress& addr) const {
  for (const auto& p : prefixes_) {
    if (p.contains(addr)) return true;
  }
  return false;
}

}  // namespace tacticforge::ingest
