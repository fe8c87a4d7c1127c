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
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "tacticforge/signature/signature.hpp"

namespace tacticforge::signature {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char raw : text) {
    char c = raw;
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    const bool keep = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (keep) {
      current.push_back(c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::map<std::size_t, ByteSignature> tfidf_rank(
    const std::map<std::size_t, std::vector<std::string>>& cluster_texts, std::size_t top_n) {
  if (cluster_texts.size() < 2) {
    throw std::invalid_argument("tfidf_rank: need at least two clusters, got " +
                                std::to_string(cluster_texts.size()));
  }
  if (top_n == 0) throw std::invalid_argument("tfidf_rank: top_n must be positive");

  struct Doc {
    std::size_t cluster_id;
    std::unordered_map<std::string, std::size_t> counts;
    std::size_t total = 0;
  };
  std::vector<Doc> docs;
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& [cluster_id, texts] : cluster_texts) {
    Doc doc{cluster_id, {}, 0};
    for (const auto& text : texts) {
      for (auto& tok : tokenize(text)) {
        ++doc.counts[std::move(tok)];
        ++doc.total;
      }
    }
    for (const auto& [tok, n] : doc.counts) ++df[tok];
    docs.push_back(std::move(doc));
  }

  const double clusters = static_cast<double>(cluster_texts.size());
  std::map<std::size_t, ByteSignature> out;
  for (const auto& doc : docs) {
    std::vector<std::pair<std::string, double>> scored;
    for (const auto& [tok, n] : doc.counts) {
      const double tf = static_cast<double>(n) / static_cast<double>(doc.total);
      const double idf = std::log(clusters / static_cast<double>(df.at(tok)));
      const double w = tf * idf;
      if (w > 0.0) scored.emplace_back(tok, w);
    }
    if (scored.empty()) continue;
    const std::size_t keep = std::min(top_n, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                      scored.end(), [](const auto& a, const auto& b) {
                        if (a.second != b.second) return a.second > b.second;
                        return a.first < b.first;
                      });
    ByteSignature sig;
    sig.cluster_id = doc.cluster_id;
    for (std::size_t i = 0; i < keep; ++i) {
      sig.tokens.push_back(scored[i].first);
      sig.weights.push_back(scored[i].second);
    }
    out.emplace(doc.cluster_id, std::move(sig));
  }
  return out;
}

}  // namespace tacticforge::signature
