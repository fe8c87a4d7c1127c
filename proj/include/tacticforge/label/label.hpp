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
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tacticforge/classifier/classifier.hpp"
#include "tacticforge/common/matrix.hpp"
#include "tacticforge/embed/embedding.hpp"
#include "tacticforge/ingest/payload.hpp"

namespace tacticforge::label {

// The enterprise ATT&CK tactics.
enum class Tactic : std::uint8_t {
  kReconnaissance,
  kResourceDevelopment,
  kInitialAccess,
  kExecution,
  kPersistence,
  kPrivilegeEscalation,
  kDefenseEvasion,
  kCredentialAccess,
  kDiscovery,
  kLateralMovement,
  kCollection,
  kCommandAndControl,
  kExfiltration,
  kImpact,
};
inline constexpr std::size_t kTacticCount = 14;

std::string_view tactic_name(Tactic t);
// Accepts "InitialAccess", "Initial Access", "initial-access", any case.
std::optional<Tactic> parse_tactic(std::string_view text);

// Labels a packet can carry: the six tactics seen in HTTP honeypot
// traffic plus Non-attack and Unknown.
enum class PacketLabel : std::uint8_t {
  kReconnaissance,
  kInitialAccess,
  kExecution,
  kPersistence,
  kCredentialAccess,
  kDiscovery,
  kNonAttack,
  kUnknown,
};
inline constexpr std::size_t kPacketLabelCount = 8;
// Slots of a decision vector: the six tactics, then Non-attack.
inline constexpr std::size_t kDecisionSlots = 7;

std::string_view label_name(PacketLabel l);
std::optional<PacketLabel> parse_label(std::string_view text);
bool is_tactic(PacketLabel l);

// A non-empty label set: either {Unknown}, {Non-attack}, or one or two
// tactics. Stored in canonical enum order.
class PacketClass {
 public:
  // Throws std::invalid_argument when the set breaks the rules above.
  static PacketClass of(std::vector<PacketLabel> labels);
  static bool valid(const std::vector<PacketLabel>& labels);

  const std::vector<PacketLabel>& labels() const { return labels_; }
  std::vector<std::string> names() const;
  // Names joined with '|', used as a stratum / purity class key.
  std::string key() const;
  friend bool operator==(const PacketClass&, const PacketClass&) = default;

 private:
  std::vector<PacketLabel> labels_;
};

struct LabelDecisionConfig {
  double unknown_threshold = 0.20;
  std::size_t nonattack_topk = 2;
  double dual_gap = 0.10;

  void validate() const;
};

enum class DecisionBranch : std::uint8_t { kUnknown, kNonAttack, kDualTactic, kSingleTactic };

struct Decision {
  DecisionBranch branch;
  PacketClass decided;
};

// Probabilities in decision-slot order. Rules apply in order:
//  1. every probability < unknown_threshold            -> {Unknown}
//  2. Non-attack within the top nonattack_topk (ties
//     count in its favour)                             -> {Non-attack}
//  3. best tactic - second tactic < dual_gap           -> both tactics
//  4. otherwise                                        -> best tactic
// Equal tactic probabilities rank by slot order.
Decision decide(std::span<const double> probs, const LabelDecisionConfig& config = {});
PacketClass decide_label(std::span<const double> probs, const LabelDecisionConfig& config = {});

enum class Provenance : std::uint8_t { kSnort, kInferred };

struct LabeledExample {
  ingest::NormalizedPayload payload;
  std::optional<std::vector<double>> probs;  // decision slots; only when inferred
  PacketClass decided;
  Provenance provenance = Provenance::kSnort;
};

nlohmann::json to_json(const LabeledExample& ex);
LabeledExample labeled_from_json(const nlohmann::json& j);
std::string labeled_to_jsonl(const std::vector<LabeledExample>& examples);
std::vector<LabeledExample> labeled_from_jsonl(std::string_view text);

struct LogEntry {
  std::int64_t timestamp_us = 0;
  std::uint32_t sid = 0;
  friend auto operator<=>(const LogEntry&, const LogEntry&) = default;
};

// "ts_us,sid" lines; an optional header line is skipped.
std::vector<LogEntry> parse_snort_log(std::string_view csv);
std::string snort_log_to_csv(const std::vector<LogEntry>& entries);

struct FlaggedPayload {
  ingest::NormalizedPayload payload;
  std::vector<PacketLabel> labels;
  std::string reason;
};

struct JoinResult {
  std::vector<LabeledExample> labeled;
  std::vector<ingest::NormalizedPayload> unlabeled;
  std::vector<FlaggedPayload> flagged;  // excluded from training
};

// Labels each payload with the union of tactics whose rules fired at one of
// its timestamps. Payloads matching three or more tactics, or Non-attack
// together with a tactic, are flagged for review. Throws
// std::invalid_argument for a logged sid missing from sid_to_label.
JoinResult join_snort_log(const std::vector<LogEntry>& log,
                          const std::vector<ingest::NormalizedPayload>& payloads,
                          const std::map<std::uint32_t, PacketLabel>& sid_to_label);

// Maps model outputs onto decision slots; classes the model lacks read 0.
std::array<double, kDecisionSlots> to_decision_slots(const classifier::HeadModel& model,
                                                     std::span<const double> probs);

// Classifies payloads whose vectors are already known (row-aligned).
std::vector<LabeledExample> pseudo_label(const std::vector<ingest::NormalizedPayload>& payloads,
                                         const Matrix& vectors,
                                         const classifier::HeadModel& model,
                                         const LabelDecisionConfig& config = {});

// Embeds with `backend` first; backend failures propagate.
std::vector<LabeledExample> pseudo_label(const std::vector<ingest::NormalizedPayload>& payloads,
                                         embed::EmbeddingBackend& backend,
                                         const classifier::HeadModel& model,
                                         const LabelDecisionConfig& config = {});

}  // namespace tacticforge::label
