// Copyright 2026 The cpcsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cpcsim command-line driver. Talks to the simulator only through the C API.
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cpc_c.h"
#include "json.hpp"

namespace {

// Prints the machine-readable failure summary on stdout, a short message on
// stderr, and returns the process exit code.
int Failure(const std::string& command, cpc_status status, const char* payload = nullptr) {
  nlohmann::json doc = {{"status", "error"},
                        {"command", command},
                        {"code", cpc_status_name(status)},
                        {"exit_code", static_cast<int>(status)},
                        {"message", cpc_last_error()}};
  if (payload != nullptr) doc["result"] = nlohmann::json::parse(payload, nullptr, false);
  std::cout << doc.dump() << std::endl;
  std::cerr << "cpcsim " << command << ": " << cpc_status_name(status);
  if (*cpc_last_error() != '\0') std::cerr << ": " << cpc_last_error();
  std::cerr << "\n";
  return static_cast<int>(status);
}

int Emit(const std::string& command, cpc_status status, char* payload) {
  int code = 0;
  if (status == CPC_OK) {
    std::cout << payload << std::endl;
  } else {
    code = Failure(command, status, payload);
  }
  cpc_string_free(payload);
  return code;
}

int RunCommand(const std::string& config_path, const std::string& out_dir,
               const std::vector<std::uint64_t>& seeds) {
  cpc_config* config = nullptr;
  cpc_status st = cpc_config_load(config_path.c_str(), &config);
  if (st != CPC_OK) return Failure("run", st);
  if (!out_dir.empty()) st = cpc_config_set_output_dir(config, out_dir.c_str());
  if (st == CPC_OK && !seeds.empty()) st = cpc_config_set_seeds(config, seeds.data(), seeds.size());
  if (st != CPC_OK) {
    cpc_config_free(config);
    return Failure("run", st);
  }
  char* summary = nullptr;
  st = cpc_run_experiment(config, &summary);
  cpc_config_free(config);
  return Emit("run", st, summary);
}

std::vector<std::uint64_t> ParseSeeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? comma : comma - start);
    std::size_t used = 0;
    if (item.empty() || item.find('-') != std::string::npos) throw CLI::ValidationError("--seeds", "bad seed '" + item + "'");
    const unsigned long long v = std::stoull(item, &used);
    if (used != item.size()) throw CLI::ValidationError("--seeds", "bad seed '" + item + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cpcsim: decentralized naming-game simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cpc_version()));

  std::string config_path, out_dir, seeds_text;
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--seeds", seeds_text, "Comma-separated seeds (overrides the config)");

  std::string suite_name, suite_out;
  auto* suite = app.add_subcommand("suite", "Run a named validation suite");
  suite->add_option("name", suite_name, "Suite name")
      ->required()
      ->check(CLI::IsMember({"oracle-validation", "baseline-comparison", "plasticity"}));
  suite->add_option("--out", suite_out, "Output directory");

  std::string transcript, checkpoint;
  auto* replay = app.add_subcommand("replay", "Rebuild final signs from a transcript");
  replay->add_option("--transcript", transcript, "Transcript file")->required();
  replay->add_option("--checkpoint", checkpoint, "Checkpoint to compare against");

  std::string resume_cp, resume_out;
  std::int64_t resume_rounds = 0;
  auto* resume = app.add_subcommand("resume", "Continue a run from its checkpoint");
  resume->add_option("--checkpoint", resume_cp, "Checkpoint file")->required();
  resume->add_option("--out", resume_out, "Output directory")->required();
  resume->add_option("--rounds", resume_rounds, "Total rounds (default: configured)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    nlohmann::json doc = {{"status", "error"},
                          {"command", "parse"},
                          {"code", "invalid_argument"},
                          {"exit_code", static_cast<int>(CPC_ERR_INVALID_ARGUMENT)},
                          {"message", e.what()}};
    std::cout << doc.dump() << std::endl;
    std::cerr << "cpcsim: " << e.what() << "\n";
    return CPC_ERR_INVALID_ARGUMENT;
  }

  if (*run) {
    std::vector<std::uint64_t> seeds;
    if (!seeds_text.empty()) {
      try {
        seeds = ParseSeeds(seeds_text);
      } catch (const std::exception& e) {
        nlohmann::json doc = {{"status", "error"}, {"command", "run"},
                              {"code", "invalid_argument"},
                              {"exit_code", static_cast<int>(CPC_ERR_INVALID_ARGUMENT)},
                              {"message", std::string("invalid --seeds: ") + e.what()}};
        std::cout << doc.dump() << std::endl;
        return CPC_ERR_INVALID_ARGUMENT;
      }
    }
    return RunCommand(config_path, out_dir, seeds);
  }
  if (*suite) {
    if (suite_out.empty()) suite_out = "runs/suite-" + suite_name;
    char* report = nullptr;
    const cpc_status st = cpc_run_suite(suite_name.c_str(), suite_out.c_str(), &report);
    return Emit("suite", st, report);
  }
  if (*replay) {
    char* result = nullptr;
    const cpc_status st = cpc_replay_transcript(
        transcript.c_str(), checkpoint.empty() ? nullptr : checkpoint.c_str(), &result);
    return Emit("replay", st, result);
  }
  char* result = nullptr;
  const cpc_status st =
      cpc_resume(resume_cp.c_str(), resume_out.c_str(), resume_rounds, &result);
  return Emit("resume", st, result);
}
