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
#include <set>

#include "tacticforge/common/io.hpp"
#include "tacticforge/embed/embedding.hpp"
#include "tacticforge/ingest/address.hpp"
#include "tacticforge/pipeline/pipeline.hpp"

namespace tacticforge::pipeline {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::string_view where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void take(const json& j, const char* key, T& out, std::string_view where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(where) + "." + key + ": " + e.what());
  }
}

label::PacketLabel rule_label(const std::string& text, std::string_view where) {
  const auto l = label::parse_label(text);
  if (!l || *l == label::PacketLabel::kUnknown) {
    throw ConfigError(std::string(where) + ": '" + text +
                      "' is not one of the six packet tactics or Non-attack");
  }
  return *l;
}

}  // namespace

std::filesystem::path PipelineConfig::resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  return p.is_absolute() ? p : config_dir / p;
}

void PipelineConfig::validate() const {
  for (const auto& c : captures) {
    if (!std::filesystem::is_regular_file(resolve(c))) {
      throw ConfigError("capture file not found: " + resolve(c).string());
    }
  }
  if (snort_log && !std::filesystem::is_regular_file(resolve(*snort_log))) {
    throw ConfigError("snort_log not found: " + resolve(*snort_log).string());
  }
  if (workdir.empty()) throw ConfigError("workdir must be set");
  try {
    ingest::PrefixSet::parse(honeypot_prefixes);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("honeypot_prefixes: ") + e.what());
  }
  if (ports.empty()) throw ConfigError("ports must not be empty");
  if (backend != "reference" && !backend.starts_with("remote:")) {
    throw ConfigError("backend must be 'reference' or 'remote:<url>'");
  }
  if (cluster.algorithm != "kmeans" && cluster.algorithm != "som") {
    throw ConfigError("cluster.algorithm must be 'kmeans' or 'som'");
  }
  if (cluster.k == 0) throw ConfigError("cluster.k must be positive");
  if (cluster.grid_rows == 0 || cluster.grid_cols == 0) throw ConfigError("cluster.grid must be positive");
  if (cluster.max_iters == 0 || cluster.restarts == 0 || cluster.som_epochs == 0) throw ConfigError("cluster iteration counts must be positive");
  if (cluster.threads == 0) throw ConfigError("cluster.threads must be positive");
  if (signature.top_n == 0) throw ConfigError("signature.top_n must be positive");
  if (signature.contents_per_rule == 0) throw ConfigError("signature.contents_per_rule must be positive");
  if (signature.max_rules == 0) throw ConfigError("signature.max_rules must be positive");
  if (!(signature.radius_percentile >= 0.0 && signature.radius_percentile <= 100.0)) {
    throw ConfigError("signature.radius_percentile must lie in [0, 100]");
  }
  try {
    decision.validate();
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

PipelineConfig config_from_json(const json& j, const std::filesystem::path& config_dir) {
  reject_unknown(j, "config",
                 {"captures", "workdir", "rules_out", "model_out", "honeypot_prefixes", "ports",
                  "backend", "seed", "cluster", "signature", "label", "train"});
  PipelineConfig c;
  c.config_dir = config_dir;
  if (!j.contains("seed")) throw ConfigError("config: seed must be given explicitly");
  take(j, "seed", c.seed, "config");
  take(j, "captures", c.captures, "config");
  std::string workdir;
  take(j, "workdir", workdir, "config");
  if (workdir.empty()) throw ConfigError("config: workdir must be set");
  c.workdir = c.resolve(workdir);
  if (j.contains("rules_out")) c.rules_out = c.resolve(j.at("rules_out").get<std::string>());
  if (j.contains("model_out")) c.model_out = c.resolve(j.at("model_out").get<std::string>());
  take(j, "honeypot_prefixes", c.honeypot_prefixes, "config");
  take(j, "ports", c.ports, "config");
  take(j, "backend", c.backend, "config");

  if (j.contains("cluster")) {
    const auto& s = j.at("cluster");
    reject_unknown(s, "cluster", {"algorithm", "k", "grid", "max_iters", "restarts", "som_epochs", "threads"});
    take(s, "algorithm", c.cluster.algorithm, "cluster");
    take(s, "k", c.cluster.k, "cluster");
    if (s.contains("grid")) {
      const auto grid = s.at("grid").get<std::vector<std::size_t>>();
      if (grid.size() != 2) throw ConfigError("cluster.grid must be [rows, cols]");
      c.cluster.grid_rows = grid[0];
      c.cluster.grid_cols = grid[1];
    }
    take(s, "max_iters", c.cluster.max_iters, "cluster");
    take(s, "restarts", c.cluster.restarts, "cluster");
    take(s, "som_epochs", c.cluster.som_epochs, "cluster");
    take(s, "threads", c.cluster.threads, "cluster");
  }

  if (j.contains("signature")) {
    const auto& s = j.at("signature");
    reject_unknown(s, "signature",
                   {"top_n", "contents_per_rule", "base_sid", "max_rules", "port", "radius_percentile",
                    "tactic_map", "tactic_keywords", "default_tactic"});
    take(s, "top_n", c.signature.top_n, "signature");
    take(s, "contents_per_rule", c.signature.contents_per_rule, "signature");
    take(s, "base_sid", c.signature.base_sid, "signature");
    take(s, "max_rules", c.signature.max_rules, "signature");
    take(s, "port", c.signature.port, "signature");
    take(s, "radius_percentile", c.signature.radius_percentile, "signature");
    if (s.contains("tactic_map")) {
      for (const auto& [key, value] : s.at("tactic_map").items()) {
        std::size_t id = 0;
        try {
          std::size_t used = 0;
          id = std::stoul(key, &used);
          if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
          throw ConfigError("signature.tactic_map: cluster id '" + key + "' is not a number");
        }
        c.signature.tactic_map[id] = rule_label(value.get<std::string>(), "signature.tactic_map");
      }
    }
    if (s.contains("tactic_keywords")) {
      for (const auto& [key, value] : s.at("tactic_keywords").items()) {
        auto words = value.get<std::vector<std::string>>();
        for (auto& w : words) {
          std::transform(w.begin(), w.end(), w.begin(),
                         [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        }
        c.signature.tactic_keywords[rule_label(key, "signature.tactic_keywords")] = std::move(words);
      }
    }
    if (s.contains("default_tactic")) {
      c.signature.default_tactic =
          rule_label(s.at("default_tactic").get<std::string>(), "signature.default_tactic");
    }
  }

  if (j.contains("label")) {
    const auto& s = j.at("label");
    reject_unknown(s, "label", {"unknown_threshold", "nonattack_topk", "dual_gap", "snort_log"});
    take(s, "unknown_threshold", c.decision.unknown_threshold, "label");
    take(s, "nonattack_topk", c.decision.nonattack_topk, "label");
    take(s, "dual_gap", c.decision.dual_gap, "label");
    if (s.contains("snort_log")) c.snort_log = s.at("snort_log").get<std::string>();
  }

  if (j.contains("train")) {
    const auto& s = j.at("train");
    reject_unknown(s, "train",
                   {"learning_rate", "batch_size", "epochs", "beta1", "beta2", "epsilon", "ratios"});
    take(s, "learning_rate", c.train.learning_rate, "train");
    take(s, "batch_size", c.train.batch_size, "train");
    take(s, "epochs", c.train.epochs, "train");
    take(s, "beta1", c.train.beta1, "train");
    take(s, "beta2", c.train.beta2, "train");
    take(s, "epsilon", c.train.epsilon, "train");
    if (s.contains("ratios")) {
      const auto& r = s.at("ratios");
      reject_unknown(r, "train.ratios", {"train", "test", "validation"});
      take(r, "train", c.train.ratios.train, "train.ratios");
      take(r, "test", c.train.ratios.test, "train.ratios");
      take(r, "validation", c.train.ratios.validation, "train.ratios");
    }
  }
  c.train.seed = c.seed;
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config " + path.string() + ": " + e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  auto dir = std::filesystem::absolute(path).parent_path();
  return config_from_json(j, dir);
}

}  // namespace tacticforge::pipeline
