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

#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "support.hpp"
#include "tacticforge/common/io.hpp"
#include "tacticforge/ingest/payload.hpp"

using namespace tacticforge::ingest;

namespace {

PacketRecord inbound(std::string bytes) {
  PacketRecord r;
  r.direction = Direction::kInbound;
  r.dst_port = 80;
  r.payload_bytes = std::move(bytes);
  return r;
}

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

// Random request-like text assembled from fragments that exercise every
// normalization rule, plus noise.
std::string random_payload(tacticforge::Rng& rng) {
  static const std::vector<std::string> pieces = {
      "GET /a HTTP/1.1\r\n", "Host: 203.0.113.7\r\n", "Accept: */*\r\n", "accept-encoding: gzip\r\n",
      "User-Agent: Mozilla/5.0 Chrome/88.0.4324.150\r\n", "X-Fwd: 1.2.3.4.5\r\n", "999.1.1.1 ",
      "Accepted: yes\r\n", "user-agent: curl/7.1 (x/2)\r\n", "Referer: a/1.2\r\n", "\r\n", "10.0.0.255",
      "User-Agent: a/1.2.3/4\n", "1.2.3.4", "Acceptance", "\xff", "IP/VERSION", "0.0.0.0"};
  std::string out;
  const std::size_t n = rng.index(8);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < 0.2) {
      out.push_back(static_cast<char>(' ' + rng.index(95)));
    } else {
      out += pieces[rng.index(pieces.size())];
    }
  }
  return out;
}

}  // namespace

TEST_CASE("extract_http keeps only HTTP-looking inbound payloads") {
  const std::string get = "GET /index.php HTTP/1.1\r\nHost: a\r\n\r\n";
  CHECK(extract_http(inbound(get)) == get);
  CHECK(extract_http(inbound("HTTP/1.1 200 OK\r\n")).has_value());
  CHECK_FALSE(extract_http(inbound("\x16\x03\x01\x00\xa5")).has_value());
  CHECK_FALSE(extract_http(inbound("GETX / HTTP/1.1")).has_value());
  CHECK_FALSE(extract_http(inbound("")).has_value());
  for (const char* m : {"GET", "POST", "HEAD", "PUT", "DELETE", "OPTIONS", "TRACE", "CONNECT", "PATCH"}) {
    CHECK(extract_http(inbound(std::string(m) + " / HTTP/1.0\r\n")).has_value());
  }

  auto out = inbound(get);
  out.direction = Direction::kOutbound;
  CHECK_FALSE(extract_http(out).has_value());
}

TEST_CASE("extract_http replaces invalid UTF-8 with U+FFFD") {
  const auto text = extract_http(inbound(std::string("POST /x HTTP/1.1\r\n") + '\xff'));
  REQUIRE(text.has_value());
  CHECK(*text == "POST /x HTTP/1.1\r\n\xEF\xBF\xBD");
  CHECK(decode_utf8_lossy("caf\xC3\xA9") == "caf\xC3\xA9");
  CHECK(decode_utf8_lossy("\xC3") == "\xEF\xBF\xBD");
  CHECK(decode_utf8_lossy("\xE2\x82") == "\xEF\xBF\xBD");
  CHECK(decode_utf8_lossy("\xC0\xAF") == "\xEF\xBF\xBD\xEF\xBF\xBD");
  CHECK(decode_utf8_lossy("\xED\xA0\x80") == "\xEF\xBF\xBD\xEF\xBF\xBD\xEF\xBF\xBD");
}

TEST_CASE("normalize examples") {
  CHECK(normalize("Host: 203.0.113.7\r\n") == "Host: IP\r\n");
  CHECK(normalize("Accept-Encoding: gzip\r\nHost: a\r\n") == "Host: a\r\n");
  CHECK(normalize("User-Agent: Mozilla/5.0 Chrome/88.0.4324.150\r\n") ==
        "User-Agent: Mozilla/VERSION Chrome/VERSION\r\n");
  CHECK(normalize("ACCEPT: text/html\r\nX: 1\r\n") == "X: 1\r\n");
  CHECK(normalize("Accepted: yes\r\n") == "Accepted: yes\r\n");
  CHECK(normalize("Referer: http://x/a/1.2\r\n") == "Referer: http://x/a/1.2\r\n");
  CHECK(normalize("GET /?ip=256.1.1.1 HTTP/1.1") == "GET /?ip=256.1.1.1 HTTP/1.1");
  CHECK(normalize("a 10.0.0.1, 192.168.1.254") == "a IP, IP");
  CHECK(normalize("v1.2.3.45") == "vIP");
  CHECK(normalize("1.2.3.4.5") == "IP.5");  // no dotted quad may survive
  CHECK(normalize("") == "");
}

TEST_CASE("normalize is idempotent, bounded and strips Accept lines") {
  tacticforge::Rng rng(3);
  for (int i = 0; i < 5000; ++i) {
    const std::string x = random_payload(rng);
    const std::string once = normalize(x);
    CAPTURE(x);
    CHECK(normalize(once) == once);
    const std::size_t replacements = count_of(once, "IP") + count_of(once, "VERSION");
    CHECK(once.size() <= x.size() + 7 * replacements);
    for (const auto& line : tacticforge::io::split_lines(once)) {
      std::string lower = line;
      std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
      CHECK_FALSE(lower.starts_with("accept:"));
      CHECK_FALSE(lower.starts_with("accept-encoding:"));
    }
  }
}

TEST_CASE("dedup collapses duplicates and preserves mass") {
  const auto out = dedup({{"a", 2}, {"a", 1}, {"b", 3}});
  REQUIRE(out.size() == 2);
  CHECK(out[0].text == "a");
  CHECK(out[0].multiplicity() == 2);
  CHECK(out[0].origin_timestamps == std::vector<std::int64_t>{1, 2});
  CHECK(out[1].origin_timestamps == std::vector<std::int64_t>{3});
  CHECK(dedup({}).empty());

  tacticforge::Rng rng(8);
  std::vector<std::pair<std::string, std::int64_t>> stream;
  for (int i = 0; i < 3000; ++i) {
    stream.emplace_back(std::string(1, static_cast<char>('a' + rng.index(20))), static_cast<std::int64_t>(rng.index(1000)));
  }
  std::size_t mass = 0;
  for (const auto& p : dedup(stream)) {
    mass += p.multiplicity();
    CHECK(std::is_sorted(p.origin_timestamps.begin(), p.origin_timestamps.end()));
  }
  CHECK(mass == stream.size());
}

TEST_CASE("sharded dedup merged equals sequential dedup") {
  tacticforge::Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<std::string, std::int64_t>> stream;
    const std::size_t n = rng.index(200);
    for (std::size_t i = 0; i < n; ++i) {
      stream.emplace_back(std::to_string(rng.index(15)), static_cast<std::int64_t>(rng.index(50)));
    }
    std::vector<Deduplicator> shards(1 + rng.index(4));
    for (const auto& [text, ts] : stream) shards[rng.index(shards.size())].add(text, ts);
    Deduplicator merged;
    for (const auto& s : shards) merged.merge(s);
    CHECK(merged.total() == stream.size());
    CHECK(merged.finish() == dedup(stream));
  }
}

TEST_CASE("payload JSONL round-trips") {
  const auto payloads = dedup({{"GET /\r\n\"x\"", 5}, {"b", 1}, {"b", 1}});
  const std::string text = payloads_to_jsonl(payloads);
  CHECK(text.find("\"mult\":2") != std::string::npos);
  CHECK(payloads_from_jsonl(text) == payloads);
}
