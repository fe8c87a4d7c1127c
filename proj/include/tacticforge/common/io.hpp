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
#include <string>
#include <string_view>
#include <vector>

namespace tacticforge::io {

std::string read_file(const std::filesystem::path& path);

// Writes to "<path>.tmp" then renames over `path`, creating parent
// directories as needed.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::vector<std::string> split_lines(std::string_view text);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

std::vector<std::uint8_t> base64_decode(std::string_view text);
std::string base64_encode(std::string_view bytes);

}  // namespace tacticforge::io
