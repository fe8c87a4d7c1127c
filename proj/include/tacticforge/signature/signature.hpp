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

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tacticforge/cluster/cluster.hpp"
#include "tacticforge/common/matrix.hpp"

namespace tacticforge::signature {

// Top TF-IDF tokens of one cluster, heaviest first.
struct ByteSignature {
  std::size_t cluster_id = 0;
  std::vector<std::string> tokens;
  std::vector<double> weights;
};

// Lowercase, then split on every byte outside [a-z0-9_].
std::vector<std::string> tokenize(std::string_view text);

// Each cluster is one document (its payloads concatenated).
// tf = count / tokens in cluster, idf = ln(C / df). Tokens are ranked by
// tf * idf, ties broken lexicographically; zero-weight tokens are never
// selected, so a cluster whose every token also appears everywhere else
// gets no signature. Throws std::invalid_argument for fewer than two
// clusters.
std::map<std::size_t, ByteSignature> tfidf_rank(
    const std::map<std::size_t, std::vector<std::string>>& cluster_texts, std::size_t top_n = 8);

struct VectorSignature {
  std::size_t cluster_id = 0;
  std::vector<double> centroid;
  double radius = 0.0;
  std::string tactic;
};

// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value.
double percentile_nearest_rank(std::vector<double> values, double percentile);

// Centroid plus the given percentile of member-to-centroid distances.
VectorSignature make_vector_signature(const cluster::ClusterModel& model, const Matrix& points,
                                      std::size_t cluster_id, double percentile = 95.0);

nlohmann::json to_json(const VectorSignature& sig);
VectorSignature vector_signature_from_json(const nlohmann::json& j);

// Snort content escaping: '|', '"', ';', '\\' and non-printable bytes become
// |XX| with uppercase hex.
std::string escape_content(std::string_view raw);
// Inverse of escape_content; also accepts multi-byte blocks like |22 3B|.
std::string unescape_content(std::string_view escaped);

struct SnortRule {
  std::uint32_t sid = 0;
  std::size_t cluster_id = 0;
  std::string tactic;
  std::uint16_t port = 80;
  std::vector<std::string> contents;  // raw (unescaped) match strings

  std::string msg() const;
  std::string to_line() const;
  // Accepts exactly the shape produced by to_line().
  static SnortRule parse(std::string_view line);
};

struct RuleOptions {
  std::uint32_t base_sid = 1000000;
  std::uint16_t port = 80;
  std::size_t contents_per_rule = 4;
};

// One rule per signature, sid = base_sid + position. Throws
// std::invalid_argument naming the first cluster without a tactic.
std::vector<SnortRule> make_rules(const std::vector<ByteSignature>& signatures,
                                  const std::map<std::size_t, std::string>& tactic_map,
                                  const RuleOptions& options = {});

std::string emit_snort_rules(const std::vector<ByteSignature>& signatures,
                             const std::map<std::size_t, std::string>& tactic_map,
                             const RuleOptions& options = {});

std::string rules_to_text(const std::vector<SnortRule>& rules);
std::vector<SnortRule> parse_rules(std::string_view text);

// ASCII lowercase, the same case normalization tokenize() applies.
std::string fold_case(std::string_view text);

// A rule matches when every content string occurs in the case-folded
// payload; the comparison itself is case-sensitive, so contents are
// expected in lowercase as emitted. Returned rules are ordered by sid.
std::vector<const SnortRule*> match_payload(std::span<const SnortRule> rules,
                                            std::string_view payload);

// A vector signature matches when distance(point, centroid) <= radius.
// Returned signatures are ordered by cluster id.
std::vector<const VectorSignature*> match_vector(std::span<const VectorSignature> signatures,
                                                 std::span<const double> point);

struct CoveragePoint {
  std::size_t rule_count = 0;
  double fraction = 0.0;
  friend bool operator==(const CoveragePoint&, const CoveragePoint&) = default;
};

// Share of total packet mass matched by at least one of the first r rules,
// for r = 1..rules.size(). `payloads` pairs text with multiplicity.
std::vector<CoveragePoint> coverage_curve(
    std::span<const SnortRule> rules,
    const std::vector<std::pair<std::string, std::size_t>>& payloads);

}  // namespace tacticforge::signature
