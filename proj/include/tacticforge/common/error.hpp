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
#include <stdexcept>
#include <string>

namespace tacticforge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or unusable configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A declared stage input does not exist yet.
class MissingInputError : public Error {
 public:
  using Error::Error;
};

// Remote peer spoke the wire protocol incorrectly or could not be reached.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Capture file could not be read past `offset`.
class CaptureError : public Error {
 public:
  CaptureError(const std::string& what, std::uint64_t offset)
      : Error(what + " at byte offset " + std::to_string(offset)),
        offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace tacticforge
