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

#include <unistd.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "support.hpp"
#include "tacticforge/common/io.hpp"
#include "tacticforge/ingest/payload.hpp"
#include "tacticforge/pipeline/pipeline.hpp"
#include "tacticforge/signature/signature.hpp"

using namespace tacticforge;
using namespace tacticforge::pipeline;
namespace fs = std::filesystem;

namespace {

// Output hashes for the bundled fixture under sample_config.json.
const std::string kGoldenPayloads = "ef003ad5a0816702369a6b5e1aaac27bd698d354909a2c3e21326b5e69727d79";
const std::string kGoldenRules = "05f23c45f95201510f8ca66b95c34134b4e87da600f3a8fd6dda3cf1da815164";

PipelineConfig fixture_config(const fs::path& workdir) {
  auto c = load_config(tftest::fixture_dir() / "sample_config.json");
  c.workdir = workdir;
  return c;
}

std::map<std::string, std::string> outputs_of(const std::vector<RunManifest>& ms) {
  std::map<std::string, std::string> out;
  for (const auto& m : ms) out.insert(m.outputs.begin(), m.outputs.end());
  return out;
}

void write_config(const fs::path& path, const nlohmann::json& j) {
  io::write_file_atomic(path, j.dump(2));
}

nlohmann::json fixture_json() {
  auto j = nlohmann::json::parse(io::read_file(tftest::fixture_dir() / "sample_config.json"));
  j["captures"] = {(tftest::fixture_dir() / "sample.pcap").string()};
  return j;
}

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

}  // namespace

TEST_CASE("full run on the fixture is reproducible") {
  tftest::TempDir a("pipe-a"), b("pipe-b");
  const auto first = run_all(fixture_config(a.path()));
  REQUIRE(first.size() == kStageCount);
  const auto& ingest = first[0];
  CHECK(ingest.stage == "ingest");
  CHECK(ingest.counts.at("packets_in") >= ingest.counts.at("packets_out"));
  CHECK(ingest.counts.at("packets_in") == 200);
  CHECK(ingest.counts.at("skipped_malformed") == 1);
  CHECK(ingest.counts.at("packets_out") == 174);
  CHECK(ingest.counts.at("unique_payloads") == 86);
  CHECK(ingest.inputs.size() == 1);  // the capture file

  for (const auto& m : first) {
    CHECK(m.outputs.size() == stage_spec(*parse_stage(m.stage)).outputs.size());
    CHECK(m.wall_time_s >= 0.0);
  }
  CHECK(read_manifests(a.path()).size() == kStageCount);

  // Every artifact of an independent run in another directory is identical.
  const auto second = run_all(fixture_config(b.path()));
  CHECK(outputs_of(first) == outputs_of(second));
  // Rerunning in place appends new manifests with the same hashes.
  const auto third = run_all(fixture_config(a.path()));
  CHECK(outputs_of(first) == outputs_of(third));
  CHECK(read_manifests(a.path()).size() == 2 * kStageCount);

  CHECK(ingest.outputs.at("payloads.jsonl") == kGoldenPayloads);
  CHECK(first[3].outputs.at("snort.rules") == kGoldenRules);

  // The emitted rules file parses back and every rule is well formed.
  const auto rules = signature::parse_rules(io::read_file(a.path() / "snort.rules"));
  CHECK_FALSE(rules.empty());
  CHECK(rules.size() <= 4);

  const auto dataset = io::read_file(a.path() / "dataset.jsonl");
  CHECK(dataset.find("\"Unknown\"") == std::string::npos);
  const auto metrics = nlohmann::json::parse(io::read_file(a.path() / "metrics.json"));
  CHECK(metrics.at("trained") == true);
  CHECK(metrics.at("test").contains("micro"));
  const auto purity = nlohmann::json::parse(io::read_file(a.path() / "purity.json"));
  CHECK(purity.at("purity").get<double>() > 0.0);
  CHECK(purity.at("purity").get<double>() <= 1.0);
}

TEST_CASE("the JSONL capture twin yields the same payloads") {
  tftest::TempDir dir("pipe-jsonl");
  auto c = fixture_config(dir.path());
  c.captures = {"sample.jsonl"};
  const auto m = run_stage(Stage::kIngest, c);
  CHECK(m.outputs.at("payloads.jsonl") == kGoldenPayloads);
}

TEST_CASE("a stage without its inputs reports every missing one") {
  tftest::TempDir dir("pipe-missing");
  const auto c = fixture_config(dir.path());
  try {
    run_stage(Stage::kTrain, c);
    FAIL("expected MissingInputError");
  } catch (const MissingInputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("payloads.jsonl") != std::string::npos);
    CHECK(msg.find("embeddings.bin") != std::string::npos);
    CHECK(msg.find("labeled.jsonl") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(dir.path() / ".lock"));
}

TEST_CASE("an empty capture flows through every stage") {
  tftest::TempDir dir("pipe-empty");
  tftest::PcapBuilder().write(dir.path() / "empty.pcap");
  auto c = fixture_config(dir.path() / "work");
  c.captures = {(dir.path() / "empty.pcap").string()};
  const auto ms = run_all(c);
  REQUIRE(ms.size() == kStageCount);
  CHECK(ms[0].counts.at("unique_payloads") == 0);
  CHECK(io::read_file(dir.path() / "work" / "payloads.jsonl").empty());
  CHECK(io::read_file(dir.path() / "work" / "dataset.jsonl").empty());
}

TEST_CASE("upstream artifacts from another config are refused unless forced") {
  tftest::TempDir dir("pipe-stale");
  auto c = fixture_config(dir.path());
  run_stage(Stage::kIngest, c);
  run_stage(Stage::kEmbed, c);
  // A different seed changes the clustering, so downstream of cluster is
  // stale but embed is not.
  run_stage(Stage::kCluster, c);
  auto changed = c;
  changed.seed = 8;
  changed.train.seed = 8;
  CHECK_NOTHROW(run_stage(Stage::kCluster, changed));
  CHECK_THROWS_AS(run_stage(Stage::kSignature, c), StaleInputError);
  CHECK_NOTHROW(run_stage(Stage::kSignature, c, RunOptions{true}));

  auto other_capture = c;
  other_capture.captures = {"sample.jsonl"};
  CHECK_THROWS_AS(run_stage(Stage::kEmbed, other_capture), StaleInputError);
}

TEST_CASE("the workdir lock excludes concurrent runs") {
  tftest::TempDir dir("pipe-lock");
  const auto c = fixture_config(dir.path());
  {
    std::ofstream lock(dir.path() / ".lock");
    lock << ::getpid() << "\n";
  }
  CHECK_THROWS_AS(run_stage(Stage::kIngest, c), LockError);
  CHECK(fs::exists(dir.path() / ".lock"));

  // A lock left by a process that no longer exists is reclaimed.
  {
    std::ofstream lock(dir.path() / ".lock");
    lock << 2147483000 << "\n";
  }
  CHECK_NOTHROW(run_stage(Stage::kIngest, c));
  CHECK_FALSE(fs::exists(dir.path() / ".lock"));
}

TEST_CASE("stage contexts only touch declared artifacts") {
  tftest::TempDir dir("pipe-ctx");
  const auto c = fixture_config(dir.path());
  StageContext ctx(c, Stage::kEmbed);
  CHECK_THROWS_AS(ctx.read("labeled.jsonl"), std::logic_error);
  CHECK_THROWS_AS(ctx.write("snort.rules", "x"), std::logic_error);
  CHECK_THROWS_AS(ctx.read("payloads.jsonl"), MissingInputError);
  ctx.write("embeddings.bin", "x");
  CHECK(ctx.unwritten().empty());
  CHECK(ctx.output_hashes().at("embeddings.bin") == io::sha256_hex("x"));
}

TEST_CASE("config parsing") {
  const fs::path base = "/cfg";
  auto j = fixture_json();
  const auto c = config_from_json(j, base);
  CHECK(c.workdir == base / "work");
  CHECK(c.seed == 7);
  CHECK(c.train.seed == 7);
  CHECK(c.signature.tactic_keywords.at(label::PacketLabel::kExecution).front() == "wget");

  auto bad = j;
  bad["clusterr"] = nlohmann::json::object();
  CHECK_THROWS_AS(config_from_json(bad, base), ConfigError);
  bad = j;
  bad.erase("seed");
  CHECK_THROWS_AS(config_from_json(bad, base), ConfigError);
  bad = j;
  bad["signature"]["tactic_map"] = {{"0", "Impact"}};
  CHECK_THROWS_AS(config_from_json(bad, base), ConfigError);
  bad = j;
  bad["signature"]["tactic_map"] = {{"zero", "Execution"}};
  CHECK_THROWS_AS(config_from_json(bad, base), ConfigError);
  bad = j;
  bad["train"]["ratios"] = {{"train", 0.5}, {"test", 0.1}, {"validation", 0.1}};
  CHECK_THROWS_AS(config_from_json(bad, base).validate(), ConfigError);
  bad = j;
  bad["cluster"]["algorithm"] = "dbscan";
  CHECK_THROWS_AS(config_from_json(bad, base).validate(), ConfigError);
  bad = j;
  bad["captures"] = {"/nonexistent.pcap"};
  CHECK_THROWS_AS(config_from_json(bad, base).validate(), ConfigError);

  // Only values a stage depends on move its hash.
  auto tweaked = c;
  tweaked.train.epochs = 99;
  CHECK(config_hash(tweaked, Stage::kSignature) == config_hash(c, Stage::kSignature));
  CHECK(config_hash(tweaked, Stage::kTrain) != config_hash(c, Stage::kTrain));
  tweaked = c;
  tweaked.backend = "remote:http://x";
  CHECK(config_hash(tweaked, Stage::kIngest) == config_hash(c, Stage::kIngest));
  CHECK(config_hash(tweaked, Stage::kEval) != config_hash(c, Stage::kEval));
}

TEST_CASE("stage names and artifact producers") {
  for (Stage s : all_stages()) CHECK(parse_stage(stage_name(s)) == s);
  CHECK_FALSE(parse_stage("all"));
  CHECK(producer_of("snort.rules") == Stage::kSignature);
  CHECK_FALSE(producer_of("nothing"));
  // Every declared input is produced by an earlier stage.
  for (Stage s : all_stages()) {
    for (const auto& in : stage_spec(s).inputs) {
      const auto p = producer_of(in);
      REQUIRE(p);
      CHECK(static_cast<int>(*p) < static_cast<int>(s));
    }
  }
  CHECK(head_classes().size() == 7);
  CHECK(head_classes().back() == "Non-attack");
}

TEST_CASE("command line exit codes") {
  tftest::TempDir dir("pipe-cli");
  const auto config = dir.path() / "config.json";
  write_config(config, fixture_json());
  const std::string cli = shell_quote(tftest::cli_path().string());
  const std::string env = "TACTICFORGE_WORKDIR=" + shell_quote((dir.path() / "work").string()) + " ";
  const std::string quiet = " >/dev/null 2>&1";
  const std::string cfg = " --config " + shell_quote(config.string());

  CHECK(tftest::run_command(env + cli + " train" + cfg + quiet) == 3);
  CHECK(tftest::run_command(env + cli + " all" + cfg + quiet) == 0);
  CHECK(fs::exists(dir.path() / "work" / "metrics.txt"));
  CHECK(tftest::run_command(env + cli + " eval" + cfg + quiet) == 0);
  CHECK(tftest::run_command(env + cli + " bogus" + cfg + quiet) == 2);
  CHECK(tftest::run_command(env + cli + " all" + quiet) == 2);
  CHECK(tftest::run_command(env + cli + " all --config /nonexistent.json" + quiet) == 2);
  // A different seed leaves cluster outputs stale for signature.
  CHECK(tftest::run_command(env + cli + " signature --seed 9" + cfg + quiet) == 2);
  CHECK(tftest::run_command(env + cli + " signature --seed 9 --force" + cfg + quiet) == 0);

  auto bad = fixture_json();
  bad["cluster"]["k"] = 0;
  write_config(config, bad);
  CHECK(tftest::run_command(env + cli + " all" + cfg + quiet) == 2);
}
