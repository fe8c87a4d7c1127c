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
#include <vector>

#include "tacticforge/common/matrix.hpp"
#include "tacticforge/common/rng.hpp"

namespace tftest {

inline std::filesystem::path fixture_dir() { return TF_FIXTURE_DIR; }
inline std::filesystem::path cli_path() { return TF_CLI_PATH; }

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Points drawn around `centers` with isotropic Gaussian noise; labels[i] is
// the generating center.
struct Blobs {
  tacticforge::Matrix points;
  std::vector<std::uint32_t> labels;
};
Blobs gaussian_blobs(const tacticforge::Matrix& centers, std::size_t per_center, double sigma,
                     tacticforge::Rng& rng);

tacticforge::Matrix random_matrix(std::size_t rows, std::size_t cols, tacticforge::Rng& rng,
                                  double lo = -1.0, double hi = 1.0);

// Little-endian pcap writer for hand-built captures.
class PcapBuilder {
 public:
  explicit PcapBuilder(std::uint32_t linktype = 1);
  // Ethernet + IPv4 + TCP frame.
  void add_tcp(std::int64_t ts_us, const std::string& src, const std::string& dst, std::uint16_t sport,
               std::uint16_t dport, const std::string& payload);
  void add_raw(std::int64_t ts_us, const std::string& frame, std::uint32_t orig_len = 0);
  std::string bytes() const { return data_; }
  void write(const std::filesystem::path& path) const;

 private:
  std::string data_;
};

std::string tcp_frame(const std::string& src, const std::string& dst, std::uint16_t sport,
                      std::uint16_t dport, const std::string& payload);

// Runs a shell command line, returning its exit status.
int run_command(const std::string& command);

}  // namespace tftest
