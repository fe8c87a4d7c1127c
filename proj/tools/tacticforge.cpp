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

// Command-line driver: tacticforge <stage|all> --config <file> [--force]
// [--seed N] [--backend reference|remote:<url>]

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tacticforge/common/error.hpp"
#include "tacticforge/pipeline/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitMissingInput = 3;
constexpr int kExitStageFailure = 4;

void print_manifest(const tacticforge::pipeline::RunManifest& m) {
  std::cout << m.stage << ": " << m.outputs.size() << " outputs";
  for (const auto& [key, value] : m.counts) std::cout << ' ' << key << '=' << value;
  std::cout << " (" << m.wall_time_s << " s)\n";
}

}  // namespace

int main(int argc, char** argv) {
  namespace tp = tacticforge::pipeline;

  CLI::App app{"Label HTTP honeypot traffic with ATT&CK tactics"};
  std::string target;
  std::string config_path;
  bool force = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> backend;
  app.add_option("stage", target, "ingest, embed, cluster, signature, label, train, infer, eval or all")
      ->required();
  app.add_option("--config", config_path, "pipeline config (JSON)")->required();
  app.add_flag("--force", force, "accept upstream artifacts built under another configuration");
  app.add_option("--seed", seed, "override the configured seed");
  app.add_option("--backend", backend, "reference or remote:<url>");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  const auto stage = tp::parse_stage(target);
  if (target != "all" && !stage) {
    std::cerr << "error: unknown stage '" << target << "'\n";
    return kExitConfig;
  }

  tp::PipelineConfig config;
  try {
    config = tp::load_config(config_path);
    if (seed) config.seed = *seed;
    if (backend) config.backend = *backend;
    if (const char* workdir = std::getenv("TACTICFORGE_WORKDIR"); workdir && *workdir) {
      config.workdir = std::filesystem::absolute(workdir);
    }
    config.validate();
  } catch (const tacticforge::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const tp::RunOptions options{force};
  try {
    if (stage) {
      print_manifest(tp::run_stage(*stage, config, options));
    } else {
      for (const auto& m : tp::run_all(config, options)) print_manifest(m);
    }
  } catch (const tacticforge::MissingInputError& e) {
    std::cerr << "missing input: " << e.what() << '\n';
    return kExitMissingInput;
  } catch (const tacticforge::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const tp::StaleInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "stage failed: " << e.what() << '\n';
    return kExitStageFailure;
  }
  return kExitOk;
}
