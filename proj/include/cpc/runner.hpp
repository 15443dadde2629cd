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

#ifndef CPC_RUNNER_HPP_
#define CPC_RUNNER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cpc/metrics.hpp"
#include "cpc/probkernels.hpp"
#include "cpc/protocol.hpp"
#include "cpc/world.hpp"
#include "json.hpp"

namespace cpc {

inline constexpr int kFormatVersion = 1;

struct ExperimentConfig {
  WorldConfig world;
  int num_signs = 0;        // 0 until defaulted to world.num_true_categories
  int num_categories = 0;
  GaussCatHyper hyper;
  ProtocolVariant protocol_variant = ProtocolVariant::kMh;
  ProposalMode mode = ProposalMode::kSampled;
  std::int64_t rounds = 1;
  std::optional<std::int64_t> freeze_after;
  std::optional<std::int64_t> shift_at;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir = "runs";
  // Optional observation file; replaces world generation when set.
  std::optional<std::filesystem::path> observations;

  void Validate() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Strict parse: unknown keys and invariant violations throw, naming the
// offending key or field. Absent optional fields get documented defaults.
ExperimentConfig ParseConfigJson(const nlohmann::json& doc);
ExperimentConfig ParseConfigText(const std::string& text);
ExperimentConfig ParseConfig(const std::filesystem::path& path);
nlohmann::json EmitConfig(const ExperimentConfig& config);

// Per-seed world: config.world with a derived seed and the shift round.
WorldConfig SeedWorld(const ExperimentConfig& config, std::uint64_t seed);
TrainingSchedule MakeSchedule(const ExperimentConfig& config, std::uint64_t seed);
TrainingState InitTraining(const ExperimentConfig& config, std::uint64_t seed);

MetricRecord ComputeMetrics(const TrainingState& state, const FreeEnergyReport& report,
                            ProposalMode mode);

// Line-delimited JSON encodings of the public streams.
nlohmann::json TranscriptHeaderJson(std::uint64_t rng_seed,
                                    const SignAssignment& initial);
nlohmann::json TranscriptEventJson(const TranscriptEvent& event);
nlohmann::json FreeEnergyJson(const FreeEnergyReport& report);
nlohmann::json MetricJson(const MetricRecord& record);

GameTranscript LoadTranscript(const std::filesystem::path& path);

struct Checkpoint {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  TrainingState state;
};

nlohmann::json CheckpointJson(const ExperimentConfig& config, std::uint64_t seed,
                              const TrainingState& state);
std::string SerializeCheckpoint(const ExperimentConfig& config, std::uint64_t seed,
                                const TrainingState& state);
// kCorrupt on unreadable content, kIncompatible on a format version mismatch.
Checkpoint ParseCheckpoint(const std::string& text);
Checkpoint LoadCheckpointFile(const std::filesystem::path& path);

struct RunArtifact {
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  std::filesystem::path config;
  std::filesystem::path transcript;
  std::filesystem::path metrics;
  std::filesystem::path checkpoint;
  std::filesystem::path manifest;

  static RunArtifact InDirectory(const std::filesystem::path& dir, std::uint64_t seed);
};

std::string Sha256Hex(const std::string& bytes);

// Verifies manifest digests, then the checkpoint format version.
Checkpoint CheckpointRestore(const RunArtifact& artifact);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error_code;
  std::string error_message;
  RunArtifact artifact;
  MetricSeries metrics;
  std::vector<FreeEnergyReport> free_energy;
};

struct ExperimentResult {
  std::vector<SeedOutcome> seeds;
  nlohmann::json summary;
  bool all_ok() const;
};

struct RunOptions {
  // Called at the start of each seed's run; an exception fails that seed only.
  std::function<void(std::uint64_t)> before_seed;
  bool parallel = true;
};

// One artifact directory per seed under config.output_dir. Throws kIo before
// any compute when the output directory is not writable.
ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const RunOptions& options = {});

// Continues a checkpointed run up to `total_rounds` (defaults to the
// config's round count), writing a fresh artifact into out_dir.
SeedOutcome ResumeRun(const Checkpoint& checkpoint, const std::filesystem::path& out_dir,
                      std::optional<std::int64_t> total_rounds = std::nullopt);

struct ReplayResult {
  SignAssignment signs;
  std::size_t events = 0;
  std::optional<bool> matches_checkpoint;
};

// Rebuilds final signs from a transcript. When a checkpoint is given (or a
// checkpoint.json sits next to the transcript) the result is compared to it.
ReplayResult ReplayFromFiles(const std::filesystem::path& transcript,
                             std::optional<std::filesystem::path> checkpoint);

}  // namespace cpc

#endif  // CPC_RUNNER_HPP_
