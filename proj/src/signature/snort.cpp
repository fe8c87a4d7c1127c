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
#include <stdexcept>

#include "tacticforge/common/error.hpp"
#include "tacticforge/common/io.hpp"
#include "tacticforge/signature/signature.hpp"

namespace tacticforge::signature {

namespace {

constexpr std::string_view kRulePrefix = "alert tcp any any -> any ";
constexpr std::string_view kMsgTag = "PELAT";

bool needs_escape(unsigned char c) {
  return c == '|' || c == '"' || c == ';' || c == '\\' || c < 0x20 || c > 0x7E;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

template <typename T>
T parse_number(std::string_view s, std::string_view what) {
  T value{};
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw Error("snort rule: bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

std::string escape_content(std::string_view raw) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(raw.size());
  for (char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (needs_escape(c)) {
      out.push_back('|');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
      out.push_back('|');
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

std::string unescape_content(std::string_view escaped) {
  std::string out;
  std::size_t i = 0;
  while (i < escaped.size()) {
    if (escaped[i] != '|') {
      out.push_back(escaped[i++]);
      continue;
    }
    const auto close = escaped.find('|', i + 1);
    if (close == std::string_view::npos) throw Error("snort content: unterminated hex block");
    std::string_view block = escaped.substr(i + 1, close - i - 1);
    int pending = -1;
    for (char c : block) {
      if (c == ' ') continue;
      const int v = hex_value(c);
      if (v < 0) throw Error("snort content: bad hex digit in |" + std::string(block) + "|");
      if (pending < 0) {
        pending = v;
      } else {
        out.push_back(static_cast<char>((pending << 4) | v));
        pending = -1;
      }
    }
    if (pending >= 0) throw Error("snort content: odd hex digit count");
    i = close + 1;
  }
  return out;
}

std::string SnortRule::msg() const {
  return std::string(kMsgTag) + " c" + std::to_string(cluster_id) + " " + tactic;
}

std::string SnortRule::to_line() const {
  std::string line(kRulePrefix);
  line += std::to_string(port);
  line += " (msg:\"" + msg() + "\";";
  for (const auto& c : contents) line += " content:\"" + escape_content(c) + "\";";
  line += " sid:" + std::to_string(sid) + "; rev:1;)";
  return line;
}

SnortRule SnortRule::parse(std::string_view line) {
  if (!line.starts_with(kRulePrefix)) throw Error("snort rule: unexpected header");
  std::string_view rest = line.substr(kRulePrefix.size());
  const auto open = rest.find(" (");
  if (open == std::string_view::npos || !rest.ends_with(")")) {
    throw Error("snort rule: missing option block");
  }
  SnortRule rule;
  rule.port = parse_number<std::uint16_t>(rest.substr(0, open), "port");
  std::string_view body = rest.substr(open + 2, rest.size() - open - 3);

  bool have_msg = false, have_sid = false;
  while (!body.empty()) {
    while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
    if (body.empty()) break;
    const auto colon = body.find(':');
    if (colon == std::string_view::npos) throw Error("snort rule: option without value");
    const std::string_view key = body.substr(0, colon);
    body.remove_prefix(colon + 1);
    std::string_view value;
    if (!body.empty() && body.front() == '"') {
      const auto q = body.find('"', 1);
      if (q == std::string_view::npos) throw Error("snort rule: unterminated string");
      value = body.substr(1, q - 1);
      body.remove_prefix(q + 1);
    } else {
      value = body.substr(0, body.find(';'));
      body.remove_prefix(value.size());
    }
    if (body.empty() || body.front() != ';') throw Error("snort rule: missing ';'");
    body.remove_prefix(1);

    if (key == "msg") {
      // "PELAT c<cluster> <tactic>"
      const std::string prefix = std::string(kMsgTag) + " c";
      if (!value.starts_with(prefix)) throw Error("snort rule: unexpected msg");
      const auto space = value.find(' ', prefix.size());
      if (space == std::string_view::npos) throw Error("snort rule: msg lacks tactic");
      rule.cluster_id =
          parse_number<std::size_t>(value.substr(prefix.size(), space - prefix.size()), "cluster");
      rule.tactic = std::string(value.substr(space + 1));
      have_msg = true;
    } else if (key == "content") {
      rule.contents.push_back(unescape_content(value));
    } else if (key == "sid") {
      rule.sid = parse_number<std::uint32_t>(value, "sid");
      have_sid = true;
    } else if (key != "rev") {
      throw Error("snort rule: unsupported option '" + std::string(key) + "'");
    }
  }
  if (!have_msg || !have_sid || rule.contents.empty()) {
    throw Error("snort rule: msg, sid and at least one content are required");
  }
  return rule;
}

std::vector<SnortRule> make_rules(const std::vector<ByteSignature>& signatures,
                                  const std::map<std::size_t, std::string>& tactic_map,
                                  const RuleOptions& options) {
  if (options.contents_per_rule == 0) throw std::invalid_argument("contents_per_rule must be positive");
  std::vector<SnortRule> rules;
  rules.reserve(signatures.size());
  for (std::size_t i = 0; i < signatures.size(); ++i) {
    const auto& sig = signatures[i];
    const auto it = tactic_map.find(sig.cluster_id);
    if (it == tactic_map.end()) {
      throw std::invalid_argument("no tactic mapping for cluster " + std::to_string(sig.cluster_id));
    }
    if (sig.tokens.empty()) {
      throw std::invalid_argument("signature for cluster " + std::to_string(sig.cluster_id) +
                                  " has no tokens");
    }
    SnortRule rule;
    rule.sid = options.base_sid + static_cast<std::uint32_t>(i);
    rule.cluster_id = sig.cluster_id;
    rule.tactic = it->second;
    rule.port = options.port;
    const std::size_t n = std::min(options.contents_per_rule, sig.tokens.size());
    rule.contents.assign(sig.tokens.begin(), sig.tokens.begin() + static_cast<std::ptrdiff_t>(n));
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::string rules_to_text(const std::vector<SnortRule>& rules) {
  std::string out;
  for (const auto& r : rules) {
    out += r.to_line();
    out.push_back('\n');
  }
  return out;
}

std::string emit_snort_rules(const std::vector<ByteSignature>& signatures,
                             const std::map<std::size_t, std::string>& tactic_map,
                             const RuleOptions& options) {
  return rules_to_text(make_rules(signatures, tactic_map, options));
}

std::vector<SnortRule> parse_rules(std::string_view text) {
  std::vector<SnortRule> rules;
  for (const auto& line : io::split_lines(text)) {
    if (line.empty() || line.front() == '#') continue;
    rules.push_back(SnortRule::parse(line));
  }
  return rules;
}

std::string fold_case(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

namespace {

bool rule_matches(const SnortRule& rule, std::string_view folded) {
  return std::all_of(rule.contents.begin(), rule.contents.end(),
                     [&](const auto& c) { return folded.find(c) != std::string_view::npos; });
}

}  // namespace

std::vector<const SnortRule*> match_payload(std::span<const SnortRule> rules,
                                            std::string_view payload) {
  const std::string folded = fold_case(payload);
  std::vector<const SnortRule*> hits;
  for (const auto& rule : rules) {
    if (rule_matches(rule, folded)) hits.push_back(&rule);
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const auto* a, const auto* b) { return a->sid < b->sid; });
  return hits;
}

std::vector<CoveragePoint> coverage_curve(
    std::span<const SnortRule> rules,
    const std::vector<std::pair<std::string, std::size_t>>& payloads) {
  // Mass first matched by rule r (in list order).
  std::vector<std::size_t> first_hit(rules.size(), 0);
  std::size_t total = 0;
  for (const auto& [text, mult] : payloads) {
    total += mult;
    const std::string folded = fold_case(text);
    for (std::size_t r = 0; r < rules.size(); ++r) {
      if (rule_matches(rules[r], folded)) {
        first_hit[r] += mult;
        break;
      }
    }
  }
  std::vector<CoveragePoint> curve;
  curve.reserve(rules.size());
  std::size_t covered = 0;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    covered += first_hit[r];
    const double frac = total == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(total);
    curve.push_back({r + 1, frac});
  }
  return curve;
}

}  // namespace tacticforge::signature
