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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tacticforge::ingest {

struct IpAddress {
  enum class Family : std::uint8_t { kV4, kV6 };
  Family family = Family::kV4;
  std::array<std::uint8_t, 16> bytes{};  // v4 uses the first four

  static std::optional<IpAddress> parse(std::string_view text);
  static IpAddress v4(const std::uint8_t* raw);
  static IpAddress v6(const std::uint8_t* raw);
  std::string to_string() const;
  friend bool operator==(const IpAddress&, const IpAddress&) = default;
};

struct IpPrefix {
  IpAddress base;
  unsigned length = 0;

  // "10.0.0.0/24", "2001:db8::/32"; a bare address is a host prefix.
  static IpPrefix parse(std::string_view text);
  bool contains(const IpAddress& addr) const;
};

// The honeypot address space. Traffic addressed into it is inbound.
class PrefixSet {
 public:
  PrefixSet() = default;
  explicit PrefixSet(std::vector<IpPrefix> prefixes) : prefixes_(std::move(prefixes)) {}
  static PrefixSet parse(const std::vector<std::string>& texts);

  bool contains(const IpAddress& addr) const;
  const std::vector<IpPrefix>& prefixes() const { return prefixes_; }

 private:
  std::vector<IpPrefix> prefixes_;
};

}  // namespace tacticforge::ingest
