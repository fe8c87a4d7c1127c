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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tacticforge/classifier/classifier.hpp"
#include "tacticforge/common/error.hpp"
#include "tacticforge/label/label.hpp"

namespace tacticforge::pipeline {

struct ClusterSettings {
  std::string algorithm = "kmeans";  // kmeans | som
  std::size_t k = 30;
  std::size_t grid_rows = 6;
  std::size_t grid_cols = 6;
  std::size_t max_iters = 300;
  std::size_t restarts = 10;
  std::size_t som_epochs = 10;
  std::size_t threads = 1;
};

struct SignatureSettings {
  std::size_t top_n = 8;
  std::size_t contents_per_rule = 4;
  std::uint32_t base_sid = 1000000;
  std::size_t max_rules = 30;
  std::uint16_t port = 80;
  double radius_percentile = 95.0;
  // Explicit cluster -> label assignments win over keyword voting.
  std::map<std::size_t, label::PacketLabel> tactic_map;
  // A cluster takes the label whose keywords hit the most signature tokens.
  std::map<label::PacketLabel, std::vector<std::string>> tactic_keywords;
  std::optional<label::PacketLabel> default_tactic;
};

struct PipelineConfig {
  std::filesystem::path config_dir;  // base for relative paths
  std::vector<std::string> captures;  // as written in the file
  std::filesystem::path workdir;
  std::optional<std::filesystem::path> rules_out;
  std::optional<std::filesystem::path> model_out;
  std::vector<std::string> honeypot_prefixes;
  std::vector<std::uint16_t> ports{80, 8080};
  std::string backend = "reference";
  std::uint64_t seed = 0;
  ClusterSettings cluster;
  SignatureSettings signature;
  label::LabelDecisionConfig decision;
  std::optional<std::string> snort_log;  // external Snort alert log
  classifier::TrainConfig train;

  std::filesystem::path resolve(const std::string& path) const;
  // Throws ConfigError when a value is out of range or a referenced input
  // file does not exist.
  void validate() const;
};

// Parses the declarative JSON config. Unknown keys are rejected. Throws
// ConfigError.
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& config_dir);
PipelineConfig load_config(const std::filesystem::path& path);

enum class Stage : std::uint8_t { kIngest, kEmbed, kCluster, kSignature, kLabel, kTrain, kInfer, kEval };
inline constexpr std::size_t kStageCount = 8;

std::string_view stage_name(Stage s);
std::optional<Stage> parse_stage(std::string_view name);
std::vector<Stage> all_stages();

// Workdir artifacts a stage reads and writes.
struct StageSpec {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};
StageSpec stage_spec(Stage s);
// Stage that writes `artifact`, if any.
std::optional<Stage> producer_of(std::string_view artifact);

// Hash over the config values that can influence this stage's outputs,
// including those of every upstream stage.
std::string config_hash(const PipelineConfig& config, Stage s);

struct RunManifest {
  std::string stage;
  std::string config_hash;
  std::map<std::string, std::string> inputs;   // artifact -> sha256
  std::map<std::string, std::string> outputs;  // artifact -> sha256
  std::map<std::string, std::int64_t> counts;
  double wall_time_s = 0.0;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
std::vector<RunManifest> read_manifests(const std::filesystem::path& workdir);

// An upstream artifact was produced under a different configuration.
class StaleInputError : public Error {
 public:
  using Error::Error;
};

// Another run holds the workdir.
class LockError : public Error {
 public:
  using Error::Error;
};

struct RunOptions {
  bool force = false;  // accept upstream artifacts built under another config
};

// Gives a stage access to exactly the artifacts it declared and records
// what it wrote.
class StageContext {
 public:
  StageContext(const PipelineConfig& config, Stage stage);

  const PipelineConfig& config() const { return config_; }
  Stage stage() const { return stage_; }

  // Contents of a declared workdir input. Throws std::logic_error for an
  // undeclared name.
  std::string read(std::string_view artifact);
  // Contents of a file named by the config (captures, external logs).
  std::string read_external(const std::filesystem::path& path);
  std::filesystem::path external_path(const std::filesystem::path& path);
  // Atomically writes a declared output.
  void write(std::string_view artifact, std::string_view contents);
  void count(const std::string& key, std::int64_t value) { counts_[key] = value; }

  const std::map<std::string, std::string>& input_hashes() const { return input_hashes_; }
  const std::map<std::string, std::string>& output_hashes() const { return output_hashes_; }
  const std::map<std::string, std::int64_t>& counts() const { return counts_; }
  // Declared outputs the stage never wrote.
  std::vector<std::string> unwritten() const;

 private:
  const PipelineConfig& config_;
  Stage stage_;
  StageSpec spec_;
  std::map<std::string, std::string> input_hashes_;
  std::map<std::string, std::string> output_hashes_;
  std::map<std::string, std::int64_t> counts_;
};

// Executes one stage: checks inputs exist (MissingInputError listing all
// absent ones), checks upstream config hashes (StaleInputError unless
// forced), runs, writes outputs atomically and appends the manifest to
// workdir/manifests.jsonl. Holds the workdir lock while running.
RunManifest run_stage(Stage stage, const PipelineConfig& config, const RunOptions& options = {});
std::vector<RunManifest> run_all(const PipelineConfig& config, const RunOptions& options = {});

// Class list of the packet head: the six tactics and Non-attack.
std::vector<std::string> head_classes();

}  // namespace tacticforge::pipeline
