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

#include "support.hpp"

#include <arpa/inet.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace tftest {

namespace {

void put_le32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_le16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}
void put_be16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v & 0xFF));
}

}  // namespace

TempDir::TempDir(const std::string& tag) {
  std::string pattern = (std::filesystem::temp_directory_path() / ("tacticforge-" + tag + "-XXXXXX")).string();
  if (::mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

Blobs gaussian_blobs(const tacticforge::Matrix& centers, std::size_t per_center, double sigma,
                     tacticforge::Rng& rng) {
  Blobs b;
  b.points = tacticforge::Matrix(centers.rows() * per_center, centers.cols());
  std::size_t r = 0;
  for (std::size_t c = 0; c < centers.rows(); ++c) {
    for (std::size_t i = 0; i < per_center; ++i, ++r) {
      for (std::size_t d = 0; d < centers.cols(); ++d) b.points(r, d) = centers(c, d) + sigma * rng.normal();
      b.labels.push_back(static_cast<std::uint32_t>(c));
    }
  }
  return b;
}

tacticforge::Matrix random_matrix(std::size_t rows, std::size_t cols, tacticforge::Rng& rng, double lo,
                                  double hi) {
  tacticforge::Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = lo + (hi - lo) * rng.uniform();
  }
  return m;
}

std::string tcp_frame(const std::string& src, const std::string& dst, std::uint16_t sport,
                      std::uint16_t dport, const std::string& payload) {
  std::string f("\x02\x00\x00\x00\x00\x01\x02\x00\x00\x00\x00\x02\x08\x00", 14);
  in_addr s{}, d{};
  ::inet_pton(AF_INET, src.c_str(), &s);
  ::inet_pton(AF_INET, dst.c_str(), &d);
  f.push_back(0x45);
  f.push_back(0);
  put_be16(f, static_cast<std::uint16_t>(40 + payload.size()));
  f.append(4, '\0');
  f.push_back(64);
  f.push_back(6);
  f.append(2, '\0');
  f.append(reinterpret_cast<const char*>(&s), 4);
  f.append(reinterpret_cast<const char*>(&d), 4);
  put_be16(f, sport);
  put_be16(f, dport);
  f.append(8, '\0');
  f.push_back(0x50);
  f.push_back(0x18);
  put_be16(f, 65535);
  f.append(4, '\0');
  return f + payload;
}

PcapBuilder::PcapBuilder(std::uint32_t linktype) {
  put_le32(data_, 0xA1B2C3D4);
  put_le16(data_, 2);
  put_le16(data_, 4);
  put_le32(data_, 0);
  put_le32(data_, 0);
  put_le32(data_, 65535);
  put_le32(data_, linktype);
}

void PcapBuilder::add_tcp(std::int64_t ts_us, const std::string& src, const std::string& dst,
                          std::uint16_t sport, std::uint16_t dport, const std::string& payload) {
  add_raw(ts_us, tcp_frame(src, dst, sport, dport, payload));
}

void PcapBuilder::add_raw(std::int64_t ts_us, const std::string& frame, std::uint32_t orig_len) {
  put_le32(data_, static_cast<std::uint32_t>(ts_us / 1000000));
  put_le32(data_, static_cast<std::uint32_t>(ts_us % 1000000));
  put_le32(data_, static_cast<std::uint32_t>(frame.size()));
  put_le32(data_, orig_len ? orig_len : static_cast<std::uint32_t>(frame.size()));
  data_ += frame;
}

void PcapBuilder::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  out << data_;
}

int run_command(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128;
}

}  // namespace tftest
