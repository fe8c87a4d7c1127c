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

#include <stdexcept>

#include "tacticforge/common/io.hpp"
#include "tacticforge/label/label.hpp"

namespace tacticforge::label {

nlohmann::json to_json(const LabeledExample& ex) {
  nlohmann::json j;
  j["text"] = ex.payload.text;
  j["ts_us"] = ex.payload.origin_timestamps;
  j["classes"] = ex.decided.names();
  j["probs"] = ex.probs ? nlohmann::json(*ex.probs) : nlohmann::json(nullptr);
  j["provenance"] = ex.provenance == Provenance::kSnort ? "snort" : "inferred";
  return j;
}

LabeledExample labeled_from_json(const nlohmann::json& j) {
  LabeledExample ex;
  ex.payload.text = j.at("text").get<std::string>();
  if (j.contains("ts_us")) ex.payload.origin_timestamps = j.at("ts_us").get<std::vector<std::int64_t>>();
  std::vector<PacketLabel> labels;
  for (const auto& name : j.at("classes")) {
    auto l = parse_label(name.get<std::string>());
    if (!l) throw std::invalid_argument("unknown class '" + name.get<std::string>() + "'");
    labels.push_back(*l);
  }
  ex.decided = PacketClass::of(std::move(labels));
  if (j.contains("probs") && !j.at("probs").is_null()) {
    ex.probs = j.at("probs").get<std::vector<double>>();
  }
  const auto prov = j.value("provenance", std::string("snort"));
  if (prov == "snort") {
    ex.provenance = Provenance::kSnort;
  } else if (prov == "inferred") {
    ex.provenance = Provenance::kInferred;
  } else {
    throw std::invalid_argument("unknown provenance '" + prov + "'");
  }
  return ex;
}

std::string labeled_to_jsonl(const std::vector<LabeledExample>& examples) {
  std::string out;
  for (const auto& ex : examples) {
    out += to_json(ex).dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<LabeledExample> labeled_from_jsonl(std::string_view text) {
  std::vector<LabeledExample> out;
  for (const auto& line : io::split_lines(text)) {
    if (line.empty()) continue;
    out.push_back(labeled_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

std::array<double, kDecisionSlots> to_decision_slots(const classifier::HeadModel& model,
                                                     std::span<const double> probs) {
  if (probs.size() != model.num_classes()) {
    throw std::invalid_argument("to_decision_slots: probability count does not match model");
  }
  std::array<double, kDecisionSlots> slots{};
  for (std::size_t c = 0; c < probs.size(); ++c) {
    auto l = parse_label(model.class_names[c]);
    if (l && *l != PacketLabel::kUnknown) slots[static_cast<std::size_t>(*l)] = probs[c];
  }
  return slots;
}

std::vector<LabeledExample> pseudo_label(const std::vector<ingest::NormalizedPayload>& payloads,
                                         const Matrix& vectors,
                                         const classifier::HeadModel& model,
                                         const LabelDecisionConfig& config) {
  if (vectors.rows() != payloads.size()) {
    throw std::invalid_argument("pseudo_label: payload and vector counts differ");
  }
  config.validate();
  std::vector<LabeledExample> out;
  out.reserve(payloads.size());
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    const auto probs = classifier::predict(model, vectors.row(i));
    const auto slots = to_decision_slots(model, probs);
    out.push_back({payloads[i], std::vector<double>(slots.begin(), slots.end()),
                   decide_label(slots, config), Provenance::kInferred});
  }
  return out;
}

std::vector<LabeledExample> pseudo_label(const std::vector<ingest::NormalizedPayload>& payloads,
                                         embed::EmbeddingBackend& backend,
                                         const classifier::HeadModel& model,
                                         const LabelDecisionConfig& config) {
  std::vector<std::string> texts;
  texts.reserve(payloads.size());
  for (const auto& p : payloads) texts.push_back(p.text);
  const auto table = embed::embed_all(backend, texts);
  return pseudo_label(payloads, table.vectors, model, config);
}

}  // namespace tacticforge::label
