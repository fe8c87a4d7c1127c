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
#include <cctype>
#include <stdexcept>

#include "tacticforge/label/label.hpp"

namespace tacticforge::label {

namespace {

constexpr std::array<std::string_view, kTacticCount> kTacticNames = {
    "Reconnaissance",  "ResourceDevelopment", "InitialAccess",     "Execution",
    "Persistence",     "PrivilegeEscalation", "DefenseEvasion",    "CredentialAccess",
    "Discovery",       "LateralMovement",     "Collection",        "CommandAndControl",
    "Exfiltration",    "Impact",
};

constexpr std::array<std::string_view, kPacketLabelCount> kLabelNames = {
    "Reconnaissance", "InitialAccess", "Execution", "Persistence",
    "CredentialAccess", "Discovery", "Non-attack", "Unknown",
};

std::string squash(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

}  // namespace

std::string_view tactic_name(Tactic t) { return kTacticNames[static_cast<std::size_t>(t)]; }

std::optional<Tactic> parse_tactic(std::string_view text) {
  const std::string key = squash(text);
  for (std::size_t i = 0; i < kTacticNames.size(); ++i) {
    if (squash(kTacticNames[i]) == key) return static_cast<Tactic>(i);
  }
  return std::nullopt;
}

std::string_view label_name(PacketLabel l) { return kLabelNames[static_cast<std::size_t>(l)]; }

std::optional<PacketLabel> parse_label(std::string_view text) {
  const std::string key = squash(text);
  for (std::size_t i = 0; i < kLabelNames.size(); ++i) {
    if (squash(kLabelNames[i]) == key) return static_cast<PacketLabel>(i);
  }
  if (key == "non" || key == "nonattack") return PacketLabel::kNonAttack;
  if (key == "unk") return PacketLabel::kUnknown;
  return std::nullopt;
}

bool is_tactic(PacketLabel l) {
  return l != PacketLabel::kNonAttack && l != PacketLabel::kUnknown;
}

bool PacketClass::valid(const std::vector<PacketLabel>& labels) {
  if (labels.empty()) return false;
  std::vector<PacketLabel> sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  const bool singleton_only = std::any_of(sorted.begin(), sorted.end(),
                                          [](PacketLabel l) { return !is_tactic(l); });
  if (singleton_only) return sorted.size() == 1;
  return sorted.size() <= 2;
}

PacketClass PacketClass::of(std::vector<PacketLabel> labels) {
  if (!valid(labels)) throw std::invalid_argument("invalid packet class label set");
  std::sort(labels.begin(), labels.end());
  PacketClass pc;
  pc.labels_ = std::move(labels);
  return pc;
}

std::vector<std::string> PacketClass::names() const {
  std::vector<std::string> out;
  for (auto l : labels_) out.emplace_back(label_name(l));
  return out;
}

std::string PacketClass::key() const {
  std::string out;
  for (auto l : labels_) {
    if (!out.empty()) out.push_back('|');
    out += label_name(l);
  }
  return out;
}

void LabelDecisionConfig::validate() const {
  if (!(unknown_threshold > 0.0 && unknown_threshold < 1.0)) {
    throw std::invalid_argument("unknown_threshold must lie in (0, 1)");
  }
  if (nonattack_topk < 1) throw std::invalid_argument("nonattack_topk must be at least 1");
  if (!(dual_gap > 0.0 && dual_gap < 1.0)) throw std::invalid_argument("dual_gap must lie in (0, 1)");
}

Decision decide(std::span<const double> probs, const LabelDecisionConfig& config) {
  if (probs.size() != kDecisionSlots) {
    throw std::invalid_argument("decide_label: expected " + std::to_string(kDecisionSlots) +
                                " probabilities, got " + std::to_string(probs.size()));
  }
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("decide_label: probability outside [0,1]");
  }

  if (std::all_of(probs.begin(), probs.end(), [&](double p) { return p < config.unknown_threshold; })) {
    return {DecisionBranch::kUnknown, PacketClass::of({PacketLabel::kUnknown})};
  }

  const double non_attack = probs[kDecisionSlots - 1];
  const auto above = static_cast<std::size_t>(
      std::count_if(probs.begin(), probs.end() - 1, [&](double p) { return p > non_attack; }));
  if (above < config.nonattack_topk) {
    return {DecisionBranch::kNonAttack, PacketClass::of({PacketLabel::kNonAttack})};
  }

  std::size_t best = 0, second = 1;
  if (probs[second] > probs[best]) std::swap(best, second);
  for (std::size_t i = 2; i + 1 < kDecisionSlots; ++i) {
    if (probs[i] > probs[best]) {
      second = best;
      best = i;
    } else if (probs[i] > probs[second]) {
      second = i;
    }
  }
  const auto best_label = static_cast<PacketLabel>(best);
  if (probs[best] - probs[second] < config.dual_gap) {
    return {DecisionBranch::kDualTactic,
            PacketClass::of({best_label, static_cast<PacketLabel>(second)})};
  }
  return {DecisionBranch::kSingleTactic, PacketClass::of({best_label})};
}

PacketClass decide_label(std::span<const double> probs, const LabelDecisionConfig& config) {
  return decide(probs, config).decided;
}

}  // namespace tacticforge::label
