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

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <iostream>

#include "stages.hpp"
#include "tacticforge/common/io.hpp"
#include "tacticforge/pipeline/pipeline.hpp"

namespace tacticforge::pipeline {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kStageCount> kStageNames = {
    "ingest", "embed", "cluster", "signature", "label", "train", "infer", "eval"};

constexpr std::string_view kManifestFile = "manifests.jsonl";
constexpr std::string_view kStampDir = "stamps";
constexpr std::string_view kLockFile = ".lock";

json label_map_json(const std::map<std::size_t, label::PacketLabel>& m) {
  json out = json::object();
  for (const auto& [id, l] : m) out[std::to_string(id)] = label::label_name(l);
  return out;
}

json slice(const PipelineConfig& c, Stage s) {
  switch (s) {
    case Stage::kIngest:
      return {{"captures", c.captures}, {"prefixes", c.honeypot_prefixes}, {"ports", c.ports}};
    case Stage::kEmbed:
      return {{"backend", c.backend}};
    case Stage::kCluster:
      return {{"seed", c.seed},
              {"algorithm", c.cluster.algorithm},
              {"k", c.cluster.k},
              {"grid", {c.cluster.grid_rows, c.cluster.grid_cols}},
              {"max_iters", c.cluster.max_iters},
              {"restarts", c.cluster.restarts},
              {"som_epochs", c.cluster.som_epochs}};
    case Stage::kSignature: {
      json keywords = json::object();
      for (const auto& [l, words] : c.signature.tactic_keywords) keywords[label::label_name(l)] = words;
      return {{"top_n", c.signature.top_n},
              {"contents_per_rule", c.signature.contents_per_rule},
              {"base_sid", c.signature.base_sid},
              {"max_rules", c.signature.max_rules},
              {"port", c.signature.port},
              {"radius_percentile", c.signature.radius_percentile},
              {"tactic_map", label_map_json(c.signature.tactic_map)},
              {"tactic_keywords", keywords},
              {"default_tactic", c.signature.default_tactic
                                     ? json(label::label_name(*c.signature.default_tactic))
                                     : json(nullptr)}};
    }
    case Stage::kLabel:
      return {{"snort_log", c.snort_log ? json(*c.snort_log) : json(nullptr)}};
    case Stage::kTrain:
    case Stage::kEval:
      return {{"seed", c.seed},
              {"learning_rate", c.train.learning_rate},
              {"batch_size", c.train.batch_size},
              {"epochs", c.train.epochs},
              {"beta1", c.train.beta1},
              {"beta2", c.train.beta2},
              {"epsilon", c.train.epsilon},
              {"ratios", {c.train.ratios.train, c.train.ratios.test, c.train.ratios.validation}}};
    case Stage::kInfer:
      return {{"unknown_threshold", c.decision.unknown_threshold},
              {"nonattack_topk", c.decision.nonattack_topk},
              {"dual_gap", c.decision.dual_gap}};
  }
  return nullptr;
}

std::filesystem::path stamp_path(const PipelineConfig& c, Stage s) {
  return c.workdir / kStampDir / (std::string(stage_name(s)) + ".json");
}

// Holds workdir/.lock for the lifetime of a run. A lock left behind by a
// process that no longer exists is taken over.
class WorkdirLock {
 public:
  explicit WorkdirLock(const std::filesystem::path& workdir) : path_(workdir / kLockFile) {
    std::filesystem::create_directories(workdir);
    for (int attempt = 0; attempt < 2; ++attempt) {
      const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0644);
      if (fd >= 0) {
        const std::string pid = std::to_string(::getpid()) + "\n";
        [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
        ::close(fd);
        return;
      }
      if (errno != EEXIST) {
        throw LockError("cannot create lock " + path_.string() + ": " + std::strerror(errno));
      }
      if (!holder_is_gone()) break;
      std::filesystem::remove(path_);
    }
    throw LockError("workdir " + path_.parent_path().string() + " is locked by another run (" +
                    path_.string() + ")");
  }
  ~WorkdirLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  WorkdirLock(const WorkdirLock&) = delete;
  WorkdirLock& operator=(const WorkdirLock&) = delete;

 private:
  bool holder_is_gone() const {
    std::ifstream in(path_);
    long pid = 0;
    if (!(in >> pid) || pid <= 0) return false;
    return ::kill(static_cast<pid_t>(pid), 0) != 0 && errno == ESRCH;
  }

  std::filesystem::path path_;
};

void append_manifest(const PipelineConfig& c, const RunManifest& m) {
  std::ofstream out(c.workdir / kManifestFile, std::ios::app | std::ios::binary);
  out << to_json(m).dump() << '\n';
  if (!out) throw Error("cannot append to " + (c.workdir / kManifestFile).string());
}

void check_inputs(const PipelineConfig& config, Stage stage, const RunOptions& options) {
  const StageSpec spec = stage_spec(stage);
  std::vector<std::string> missing;
  for (const auto& name : spec.inputs) {
    if (!std::filesystem::is_regular_file(config.workdir / name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw MissingInputError("stage " + std::string(stage_name(stage)) + " is missing inputs: " + list +
                            " (in " + config.workdir.string() + ")");
  }

  std::set<Stage> upstream;
  for (const auto& name : spec.inputs) {
    if (auto p = producer_of(name)) upstream.insert(*p);
  }
  for (Stage up : upstream) {
    const auto path = stamp_path(config, up);
    std::string recorded;
    if (std::filesystem::is_regular_file(path)) {
      recorded = json::parse(io::read_file(path)).value("config_hash", "");
    }
    if (recorded == config_hash(config, up)) continue;
    const std::string msg = "inputs from stage " + std::string(stage_name(up)) +
                            " were built under a different configuration";
    if (!options.force) throw StaleInputError(msg + "; rerun upstream stages or pass --force");
    std::cerr << "warning: " << msg << " (continuing because of --force)\n";
  }
}

RunManifest run_locked(Stage stage, const PipelineConfig& config, const RunOptions& options) {
  check_inputs(config, stage, options);
  const auto start = std::chrono::steady_clock::now();
  StageContext ctx(config, stage);
  detail::execute(stage, ctx);
  const auto unwritten = ctx.unwritten();
  if (!unwritten.empty()) {
    throw std::logic_error("stage " + std::string(stage_name(stage)) + " did not write " + unwritten.front());
  }

  RunManifest m;
  m.stage = std::string(stage_name(stage));
  m.config_hash = config_hash(config, stage);
  m.inputs = ctx.input_hashes();
  m.outputs = ctx.output_hashes();
  m.counts = ctx.counts();
  m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::filesystem::create_directories(config.workdir / kStampDir);
  io::write_file_atomic(stamp_path(config, stage),
                        json{{"config_hash", m.config_hash}, {"outputs", m.outputs}}.dump(2) + "\n");
  append_manifest(config, m);
  return m;
}

}  // namespace

std::string_view stage_name(Stage s) { return kStageNames[static_cast<std::size_t>(s)]; }

std::optional<Stage> parse_stage(std::string_view name) {
  for (std::size_t i = 0; i < kStageNames.size(); ++i) {
    if (kStageNames[i] == name) return static_cast<Stage>(i);
  }
  return std::nullopt;
}

std::vector<Stage> all_stages() {
  std::vector<Stage> out;
  for (std::size_t i = 0; i < kStageCount; ++i) out.push_back(static_cast<Stage>(i));
  return out;
}

StageSpec stage_spec(Stage s) {
  switch (s) {
    case Stage::kIngest:
      return {{}, {"payloads.jsonl"}};
    case Stage::kEmbed:
      return {{"payloads.jsonl"}, {"embeddings.bin"}};
    case Stage::kCluster:
      return {{"embeddings.bin"}, {"cluster_model.json", "assignments.csv"}};
    case Stage::kSignature:
      return {{"payloads.jsonl", "embeddings.bin", "cluster_model.json", "assignments.csv"},
              {"signatures.json", "vector_signatures.json", "snort.rules", "coverage.csv"}};
    case Stage::kLabel:
      return {{"payloads.jsonl", "snort.rules"},
              {"snort_log.csv", "labeled.jsonl", "unlabeled.jsonl", "flagged.jsonl"}};
    case Stage::kTrain:
      return {{"payloads.jsonl", "embeddings.bin", "labeled.jsonl"},
              {"head_model.json", "train_metrics.json"}};
    case Stage::kInfer:
      return {{"payloads.jsonl", "embeddings.bin", "labeled.jsonl", "unlabeled.jsonl", "head_model.json"},
              {"inferred.jsonl", "dataset.jsonl"}};
    case Stage::kEval:
      return {{"payloads.jsonl", "embeddings.bin", "assignments.csv", "dataset.jsonl"},
              {"model_plus.json", "metrics.json", "metrics.txt", "purity.json", "embeddings_export.csv"}};
  }
  return {};
}

std::optional<Stage> producer_of(std::string_view artifact) {
  for (Stage s : all_stages()) {
    const auto outs = stage_spec(s).outputs;
    if (std::find(outs.begin(), outs.end(), artifact) != outs.end()) return s;
  }
  return std::nullopt;
}

std::string config_hash(const PipelineConfig& config, Stage s) {
  // Stages form a chain, so the upstream set is every earlier stage.
  json chain = json::array();
  for (Stage t : all_stages()) {
    chain.push_back({{"stage", stage_name(t)}, {"config", slice(config, t)}});
    if (t == s) break;
  }
  return io::sha256_hex(chain.dump());
}

json to_json(const RunManifest& m) {
  return {{"stage", m.stage},       {"config_hash", m.config_hash}, {"inputs", m.inputs},
          {"outputs", m.outputs},   {"counts", m.counts},           {"wall_time_s", m.wall_time_s}};
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  m.stage = j.at("stage").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
  m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
  m.counts = j.at("counts").get<std::map<std::string, std::int64_t>>();
  m.wall_time_s = j.at("wall_time_s").get<double>();
  return m;
}

std::vector<RunManifest> read_manifests(const std::filesystem::path& workdir) {
  std::vector<RunManifest> out;
  const auto path = workdir / kManifestFile;
  if (!std::filesystem::is_regular_file(path)) return out;
  for (const auto& line : io::split_lines(io::read_file(path))) {
    if (!line.empty()) out.push_back(manifest_from_json(json::parse(line)));
  }
  return out;
}

StageContext::StageContext(const PipelineConfig& config, Stage stage)
    : config_(config), stage_(stage), spec_(stage_spec(stage)) {}

std::string StageContext::read(std::string_view artifact) {
  if (std::find(spec_.inputs.begin(), spec_.inputs.end(), artifact) == spec_.inputs.end()) {
    throw std::logic_error("stage " + std::string(stage_name(stage_)) + " read undeclared artifact " +
                           std::string(artifact));
  }
  const auto path = config_.workdir / artifact;
  if (!std::filesystem::is_regular_file(path)) {
    throw MissingInputError("missing input " + path.string());
  }
  std::string contents = io::read_file(path);
  input_hashes_[std::string(artifact)] = io::sha256_hex(contents);
  return contents;
}

std::filesystem::path StageContext::external_path(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw MissingInputError("missing input " + path.string());
  input_hashes_[path.string()] = io::sha256_file(path);
  return path;
}

std::string StageContext::read_external(const std::filesystem::path& path) {
  external_path(path);
  return io::read_file(path);
}

void StageContext::write(std::string_view artifact, std::string_view contents) {
  if (std::find(spec_.outputs.begin(), spec_.outputs.end(), artifact) == spec_.outputs.end()) {
    throw std::logic_error("stage " + std::string(stage_name(stage_)) + " wrote undeclared artifact " +
                           std::string(artifact));
  }
  io::write_file_atomic(config_.workdir / artifact, contents);
  output_hashes_[std::string(artifact)] = io::sha256_hex(contents);
}

std::vector<std::string> StageContext::unwritten() const {
  std::vector<std::string> out;
  for (const auto& name : spec_.outputs) {
    if (!output_hashes_.count(name)) out.push_back(name);
  }
  return out;
}

RunManifest run_stage(Stage stage, const PipelineConfig& config, const RunOptions& options) {
  config.validate();
  WorkdirLock lock(config.workdir);
  return run_locked(stage, config, options);
}

std::vector<RunManifest> run_all(const PipelineConfig& config, const RunOptions& options) {
  config.validate();
  WorkdirLock lock(config.workdir);
  std::vector<RunManifest> out;
  for (Stage s : all_stages()) out.push_back(run_locked(s, config, options));
  return out;
}

std::vector<std::string> head_classes() {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < label::kDecisionSlots; ++i) {
    out.emplace_back(label::label_name(static_cast<label::PacketLabel>(i)));
  }
  return out;
}

}  // namespace tacticforge::pipeline
