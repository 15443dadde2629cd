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

#include "cpc/runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <future>
#include <iomanip>
#include <set>
#include <sstream>

#include "cpc/error.hpp"

namespace cpc {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

namespace {

void CheckKeys(const json& obj, std::initializer_list<const char*> allowed,
               const std::string& prefix) {
  if (!obj.is_object()) {
    Fail(ErrorCode::kValidation,
         (prefix.empty() ? std::string("config") : prefix.substr(0, prefix.size() - 1)) +
             " must be an object");
  }
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) Fail(ErrorCode::kValidation, "unknown key '" + prefix + item.key() + "'");
  }
}

template <typename T>
void Read(const json& obj, const char* key, const std::string& prefix, T& out) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    Fail(ErrorCode::kValidation, "field '" + prefix + key + "' has the wrong type");
  }
}

template <typename T>
void ReadOptional(const json& obj, const char* key, const std::string& prefix,
                  std::optional<T>& out) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  T value{};
  Read(obj, key, prefix, value);
  out = value;
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (!observations) world.Validate();
  if (num_signs < 1) Fail(ErrorCode::kValidation, "num_signs must be >= 1");
  if (num_categories < 1) Fail(ErrorCode::kValidation, "num_categories must be >= 1");
  hyper.Validate();
  if (hyper.num_signs != num_signs || hyper.num_categories != num_categories) {
    Fail(ErrorCode::kInternal, "hyper sizes out of sync with num_signs/num_categories");
  }
  if (!hyper.ng_mean0.empty() && !observations &&
      static_cast<int>(hyper.ng_mean0.size()) != world.feature_dim) {
    Fail(ErrorCode::kValidation, "hyper.ng_mean0 length must equal world.feature_dim");
  }
  if (rounds < 1) Fail(ErrorCode::kValidation, "rounds must be >= 1");
  if (freeze_after && (*freeze_after < 0 || *freeze_after >= rounds)) {
    Fail(ErrorCode::kValidation, "freeze_after must be in [0, rounds)");
  }
  if (shift_at && (*shift_at < 0 || *shift_at >= rounds)) {
    Fail(ErrorCode::kValidation, "shift_at must be in [0, rounds)");
  }
  if (shift_at.has_value() != world.shift.has_value()) {
    Fail(ErrorCode::kValidation, "shift_at and world.shift must be given together");
  }
  if (shift_at && world.shift->round != *shift_at) {
    Fail(ErrorCode::kValidation, "world.shift round differs from shift_at");
  }
  if (shift_at && observations) {
    Fail(ErrorCode::kValidation, "shift_at needs a generated world, not an observation file");
  }
  if (seeds.empty()) Fail(ErrorCode::kValidation, "seeds must not be empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    Fail(ErrorCode::kValidation, "seeds must be distinct");
  }
  if (output_dir.empty()) Fail(ErrorCode::kValidation, "output_dir must not be empty");
}

ExperimentConfig ParseConfigJson(const json& doc) {
  CheckKeys(doc,
            {"world", "num_signs", "num_categories", "hyper", "protocol_variant", "mode",
             "rounds", "freeze_after", "shift_at", "seeds", "output_dir", "observations"},
            "");
  ExperimentConfig cfg;
  if (auto it = doc.find("world"); it != doc.end() && !it->is_null()) {
    const json& w = *it;
    CheckKeys(w,
              {"num_objects", "num_true_categories", "num_agents", "feature_dim",
               "num_viewpoints", "category_separation", "noise_scale", "shift"},
              "world.");
    Read(w, "num_objects", "world.", cfg.world.num_objects);
    Read(w, "num_true_categories", "world.", cfg.world.num_true_categories);
    Read(w, "num_agents", "world.", cfg.world.num_agents);
    Read(w, "feature_dim", "world.", cfg.world.feature_dim);
    Read(w, "num_viewpoints", "world.", cfg.world.num_viewpoints);
    Read(w, "category_separation", "world.", cfg.world.category_separation);
    Read(w, "noise_scale", "world.", cfg.world.noise_scale);
    if (auto s = w.find("shift"); s != w.end() && !s->is_null()) {
      CheckKeys(*s, {"kind", "magnitude"}, "world.shift.");
      ShiftSpec spec;
      std::string kind = "translate";
      Read(*s, "kind", "world.shift.", kind);
      spec.kind = ParseShiftKind(kind);
      Read(*s, "magnitude", "world.shift.", spec.magnitude);
      cfg.world.shift = spec;
    }
  } else if (!doc.contains("observations")) {
    Fail(ErrorCode::kValidation, "missing required key 'world'");
  }

  Read(doc, "num_signs", "", cfg.num_signs);
  Read(doc, "num_categories", "", cfg.num_categories);
  if (cfg.num_signs == 0) cfg.num_signs = cfg.world.num_true_categories;
  if (cfg.num_categories == 0) cfg.num_categories = cfg.world.num_true_categories;

  if (auto it = doc.find("hyper"); it != doc.end() && !it->is_null()) {
    CheckKeys(*it, {"dirichlet_alpha", "ng_mean0", "ng_kappa0", "ng_a0", "ng_b0"}, "hyper.");
    Read(*it, "dirichlet_alpha", "hyper.", cfg.hyper.dirichlet_alpha);
    Read(*it, "ng_mean0", "hyper.", cfg.hyper.ng_mean0);
    Read(*it, "ng_kappa0", "hyper.", cfg.hyper.ng_kappa0);
    Read(*it, "ng_a0", "hyper.", cfg.hyper.ng_a0);
    Read(*it, "ng_b0", "hyper.", cfg.hyper.ng_b0);
  }
  cfg.hyper.num_signs = cfg.num_signs;
  cfg.hyper.num_categories = cfg.num_categories;

  std::string variant = "mh";
  Read(doc, "protocol_variant", "", variant);
  cfg.protocol_variant = ParseProtocolVariant(variant);
  std::string mode = "sampled";
  Read(doc, "mode", "", mode);
  cfg.mode = ParseProposalMode(mode);

  if (!doc.contains("rounds")) Fail(ErrorCode::kValidation, "missing required key 'rounds'");
  Read(doc, "rounds", "", cfg.rounds);
  ReadOptional(doc, "freeze_after", "", cfg.freeze_after);
  ReadOptional(doc, "shift_at", "", cfg.shift_at);
  if (cfg.shift_at && cfg.world.shift) cfg.world.shift->round = *cfg.shift_at;
  Read(doc, "seeds", "", cfg.seeds);
  std::string out = cfg.output_dir.string();
  Read(doc, "output_dir", "", out);
  cfg.output_dir = out;
  std::optional<std::string> observations;
  ReadOptional(doc, "observations", "", observations);
  if (observations) cfg.observations = fs::path(*observations);
  cfg.Validate();
  return cfg;
}

ExperimentConfig ParseConfigText(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kParse, std::string("config is not valid JSON: ") + e.what());
  }
  return ParseConfigJson(doc);
}

ExperimentConfig ParseConfig(const fs::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfigText(buffer.str());
}

json EmitConfig(const ExperimentConfig& cfg) {
  json world = {
      {"num_objects", cfg.world.num_objects},
      {"num_true_categories", cfg.world.num_true_categories},
      {"num_agents", cfg.world.num_agents},
      {"feature_dim", cfg.world.feature_dim},
      {"num_viewpoints", cfg.world.num_viewpoints},
      {"category_separation", cfg.world.category_separation},
      {"noise_scale", cfg.world.noise_scale},
  };
  if (cfg.world.shift) {
    world["shift"] = {{"kind", ShiftKindName(cfg.world.shift->kind)},
                      {"magnitude", cfg.world.shift->magnitude}};
  }
  json hyper = {
      {"dirichlet_alpha", cfg.hyper.dirichlet_alpha},
      {"ng_kappa0", cfg.hyper.ng_kappa0},
      {"ng_a0", cfg.hyper.ng_a0},
      {"ng_b0", cfg.hyper.ng_b0},
  };
  if (!cfg.hyper.ng_mean0.empty()) hyper["ng_mean0"] = cfg.hyper.ng_mean0;
  json doc = {
      {"world", world},
      {"num_signs", cfg.num_signs},
      {"num_categories", cfg.num_categories},
      {"hyper", hyper},
      {"protocol_variant", ProtocolVariantName(cfg.protocol_variant)},
      {"mode", ProposalModeName(cfg.mode)},
      {"rounds", cfg.rounds},
      {"seeds", cfg.seeds},
      {"output_dir", cfg.output_dir.string()},
  };
  if (cfg.freeze_after) doc["freeze_after"] = *cfg.freeze_after;
  if (cfg.shift_at) doc["shift_at"] = *cfg.shift_at;
  if (cfg.observations) doc["observations"] = cfg.observations->string();
  return doc;
}

// ---------------------------------------------------------------------------
// Training setup
// ---------------------------------------------------------------------------

WorldConfig SeedWorld(const ExperimentConfig& config, std::uint64_t seed) {
  WorldConfig world = config.world;
  world.seed = DeriveSeed(seed, kWorldStream);
  return world;
}

TrainingSchedule MakeSchedule(const ExperimentConfig& config, std::uint64_t seed) {
  TrainingSchedule schedule;
  schedule.variant = config.protocol_variant;
  schedule.mode = config.mode;
  schedule.rounds = config.rounds;
  schedule.freeze_after = config.freeze_after;
  if (config.shift_at) schedule.shift_world = SeedWorld(config, seed);
  return schedule;
}

namespace {

ObservationSet InitialObservations(const ExperimentConfig& config, std::uint64_t seed) {
  if (config.observations) {
    ObservationSet obs = LoadObservations(*config.observations);
    if (obs.num_agents() < 2) {
      Fail(ErrorCode::kValidation, "observation file must hold at least two agents");
    }
    return obs;
  }
  return GenerateWorld(SeedWorld(config, seed));
}

}  // namespace

TrainingState InitTraining(const ExperimentConfig& config, std::uint64_t seed) {
  config.Validate();
  TrainingState state{{}, {}, Rng(DeriveSeed(seed, kProtocolStream)), {}, {}, 0, false};
  state.obs = InitialObservations(config, seed);
  const int K = state.obs.num_agents();
  for (int k = 0; k < K; ++k) {
    state.agent_rngs.emplace_back(DeriveSeed(seed, kAgentStreamBase + k));
    state.agents.push_back(
        InitAgent(k, config.hyper, state.obs.agents[k], state.agent_rngs.back()));
  }
  state.signs.signs.resize(state.obs.num_objects());
  for (int& w : state.signs.signs) {
    w = static_cast<int>(state.protocol_rng.Below(config.num_signs));
  }
  return state;
}

MetricRecord ComputeMetrics(const TrainingState& state, const FreeEnergyReport& report,
                            ProposalMode mode) {
  MetricRecord record;
  record.round = report.round;
  record.free_energy_total = report.total;
  const int K = static_cast<int>(state.agents.size());
  const int D = state.obs.num_objects();
  std::vector<std::vector<int>> estimates(K, std::vector<int>(D));
  for (int k = 0; k < K; ++k) {
    for (int d = 0; d < D; ++d) {
      estimates[k][d] = MapSignEstimate(state.agents[k], d, mode, state.obs.agents[k]);
    }
  }
  double kappa_sum = 0.0;
  int pairs = 0;
  for (int a = 0; a < K; ++a) {
    for (int b = a + 1; b < K; ++b) {
      kappa_sum += CohensKappa(estimates[a], estimates[b]);
      ++pairs;
    }
  }
  record.kappa = pairs > 0 ? kappa_sum / pairs : 1.0;
  if (state.obs.ground_truth) {
    const auto& truth = *state.obs.ground_truth;
    record.ari_signs_vs_truth = AdjustedRandIndex(state.signs.signs, truth);
    for (const auto& agent : state.agents) {
      record.ari_z_vs_truth.push_back(AdjustedRandIndex(agent.assignments, truth));
    }
  }
  return record;
}

// ---------------------------------------------------------------------------
// Stream encodings
// ---------------------------------------------------------------------------

json TranscriptHeaderJson(std::uint64_t rng_seed, const SignAssignment& initial) {
  return {{"rng_seed", rng_seed},
          {"initial_signs", initial.signs},
          {"initial_version", initial.version}};
}

json TranscriptEventJson(const TranscriptEvent& e) {
  return {{"round", e.round},
          {"speaker_id", e.speaker},
          {"listener_id", e.listener},
          {"object_id", e.object},
          {"proposed_sign", e.proposed_sign},
          {"accepted", e.accepted}};
}

json FreeEnergyJson(const FreeEnergyReport& r) {
  return {{"type", "free_energy"},
          {"round", r.round},
          {"collective_regularization", r.collective_regularization},
          {"individual_prediction_error", r.individual_prediction_error},
          {"individual_regularization", r.individual_regularization},
          {"total", r.total}};
}

json MetricJson(const MetricRecord& m) {
  json doc = {{"type", "metrics"},
              {"round", m.round},
              {"kappa", m.kappa},
              {"ari_signs_vs_truth", nullptr},
              {"ari_z_vs_truth", m.ari_z_vs_truth},
              {"free_energy_total", m.free_energy_total}};
  if (m.ari_signs_vs_truth) doc["ari_signs_vs_truth"] = *m.ari_signs_vs_truth;
  return doc;
}

GameTranscript LoadTranscript(const fs::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open transcript " + path.string());
  GameTranscript transcript;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json rec = json::parse(line);
      if (!have_header) {
        transcript.rng_seed = rec.at("rng_seed").get<std::uint64_t>();
        transcript.initial_signs = rec.at("initial_signs").get<std::vector<int>>();
        transcript.initial_version = rec.at("initial_version").get<std::uint64_t>();
        have_header = true;
        continue;
      }
      TranscriptEvent e;
      e.round = rec.at("round").get<std::int64_t>();
      e.speaker = rec.at("speaker_id").get<int>();
      e.listener = rec.at("listener_id").get<int>();
      e.object = rec.at("object_id").get<int>();
      e.proposed_sign = rec.at("proposed_sign").get<int>();
      e.accepted = rec.at("accepted").get<bool>();
      transcript.events.push_back(e);
    } catch (const json::exception& e) {
      Fail(ErrorCode::kParse, path.string() + ": line " + std::to_string(line_no) +
                                  ": bad transcript record (" + e.what() + ")");
    }
  }
  if (!have_header) Fail(ErrorCode::kParse, path.string() + ": missing transcript header");
  return transcript;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

json CheckpointJson(const ExperimentConfig& config, std::uint64_t seed,
                    const TrainingState& state) {
  json agents = json::array();
  for (std::size_t k = 0; k < state.agents.size(); ++k) {
    const AgentState& a = state.agents[k];
    json emissions = json::array();
    for (const auto& e : a.emissions) {
      emissions.push_back({{"mean", e.mean}, {"precision", e.precision}});
    }
    agents.push_back({{"id", a.id},
                      {"assignments", a.assignments},
                      {"emissions", emissions},
                      {"association", a.association},
                      {"ng_mean0", a.hyper.ng_mean0},
                      {"frozen_language", a.frozen_language},
                      {"rng", state.agent_rngs[k].SaveState()}});
  }
  return {{"format_version", kFormatVersion},
          {"seed", seed},
          {"config", EmitConfig(config)},
          {"next_round", state.next_round},
          {"shift_applied", state.shift_applied},
          {"signs", state.signs.signs},
          {"signs_version", state.signs.version},
          {"protocol_rng", state.protocol_rng.SaveState()},
          {"agents", agents}};
}

std::string SerializeCheckpoint(const ExperimentConfig& config, std::uint64_t seed,
                                const TrainingState& state) {
  return CheckpointJson(config, seed, state).dump() + "\n";
}

Checkpoint ParseCheckpoint(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error&) {
    Fail(ErrorCode::kCorrupt, "checkpoint is truncated or unreadable");
  }
  int version = -1;
  try {
    version = doc.at("format_version").get<int>();
  } catch (const json::exception&) {
    Fail(ErrorCode::kCorrupt, "checkpoint has no format version");
  }
  if (version != kFormatVersion) {
    Fail(ErrorCode::kIncompatible, "checkpoint format version " + std::to_string(version) +
                                       " is not supported (expected " +
                                       std::to_string(kFormatVersion) + ")");
  }
  Checkpoint cp;
  try {
    cp.config = ParseConfigJson(doc.at("config"));
    cp.seed = doc.at("seed").get<std::uint64_t>();
    TrainingState& st = cp.state;
    st.next_round = doc.at("next_round").get<std::int64_t>();
    st.shift_applied = doc.at("shift_applied").get<bool>();
    st.signs.signs = doc.at("signs").get<std::vector<int>>();
    st.signs.version = doc.at("signs_version").get<std::uint64_t>();
    st.protocol_rng.LoadState(doc.at("protocol_rng").get<std::string>());
    for (const auto& ja : doc.at("agents")) {
      AgentState a;
      a.id = ja.at("id").get<int>();
      a.assignments = ja.at("assignments").get<std::vector<int>>();
      for (const auto& je : ja.at("emissions")) {
        a.emissions.push_back({je.at("mean").get<std::vector<double>>(),
                               je.at("precision").get<std::vector<double>>()});
      }
      a.association = ja.at("association").get<std::vector<std::int64_t>>();
      a.hyper = cp.config.hyper;
      a.hyper.ng_mean0 = ja.at("ng_mean0").get<std::vector<double>>();
      a.frozen_language = ja.at("frozen_language").get<bool>();
      Rng rng;
      rng.LoadState(ja.at("rng").get<std::string>());
      st.agents.push_back(std::move(a));
      st.agent_rngs.push_back(rng);
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kCorrupt, std::string("checkpoint is missing fields: ") + e.what());
  }

  TrainingState& st = cp.state;
  st.obs = InitialObservations(cp.config, cp.seed);
  if (st.shift_applied) st.obs = ApplyShift(st.obs, SeedWorld(cp.config, cp.seed));
  if (static_cast<int>(st.agents.size()) != st.obs.num_agents() ||
      st.signs.size() != st.obs.num_objects()) {
    Fail(ErrorCode::kCorrupt, "checkpoint dimensions do not match its world");
  }
  for (auto& a : st.agents) {
    try {
      a.Validate();
    } catch (const Error& e) {
      Fail(ErrorCode::kCorrupt, std::string("checkpoint agent invalid: ") + e.what());
    }
  }
  return cp;
}

namespace {

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << bytes;
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

std::string UtcTimestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

Checkpoint LoadCheckpointFile(const fs::path& path) {
  return ParseCheckpoint(ReadFile(path));
}

std::string Sha256Hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    Fail(ErrorCode::kInternal, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

RunArtifact RunArtifact::InDirectory(const fs::path& dir, std::uint64_t seed) {
  return {seed,
          dir,
          dir / "config.json",
          dir / "transcript.jsonl",
          dir / "metrics.jsonl",
          dir / "checkpoint.json",
          dir / "manifest.json"};
}

Checkpoint CheckpointRestore(const RunArtifact& artifact) {
  json manifest;
  try {
    manifest = json::parse(ReadFile(artifact.manifest));
  } catch (const json::parse_error&) {
    Fail(ErrorCode::kCorrupt, "manifest is truncated or unreadable");
  }
  try {
    for (const auto& [name, entry] : manifest.at("files").items()) {
      const std::string expected = entry.at("sha256").get<std::string>();
      if (Sha256Hex(ReadFile(artifact.dir / name)) != expected) {
        Fail(ErrorCode::kCorrupt, "digest mismatch for " + name);
      }
    }
    const int version = manifest.at("format_version").get<int>();
    if (version != kFormatVersion) {
      Fail(ErrorCode::kIncompatible, "artifact format version " + std::to_string(version) +
                                         " is not supported (expected " +
                                         std::to_string(kFormatVersion) + ")");
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kCorrupt, std::string("manifest is malformed: ") + e.what());
  }
  return LoadCheckpointFile(artifact.checkpoint);
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

namespace {

SeedOutcome ExecuteRun(const ExperimentConfig& config, std::uint64_t seed,
                       TrainingState state, const fs::path& dir) {
  SeedOutcome outcome;
  outcome.seed = seed;
  outcome.artifact = RunArtifact::InDirectory(dir, seed);
  const RunArtifact& art = outcome.artifact;
  fs::create_directories(dir);

  WriteFile(art.config, EmitConfig(config).dump(2) + "\n");
  std::ofstream transcript(art.transcript, std::ios::binary | std::ios::trunc);
  std::ofstream metrics(art.metrics, std::ios::binary | std::ios::trunc);
  if (!transcript || !metrics) Fail(ErrorCode::kIo, "cannot open output streams in " + dir.string());
  transcript << TranscriptHeaderJson(seed, state.signs).dump() << '\n';

  const TrainingSchedule schedule = MakeSchedule(config, seed);
  TrainingObserver observer;
  observer.on_event = [&](const TranscriptEvent& e) {
    transcript << TranscriptEventJson(e).dump() << '\n';
  };
  observer.on_round = [&](const TrainingState& st, const FreeEnergyReport& report) {
    MetricRecord record = ComputeMetrics(st, report, config.mode);
    metrics << FreeEnergyJson(report).dump() << '\n'
            << MetricJson(record).dump() << '\n';
    transcript.flush();
    metrics.flush();
    outcome.metrics.push_back(std::move(record));
    outcome.free_energy.push_back(report);
  };
  while (state.next_round < schedule.rounds) TrainOneRound(state, schedule, observer);
  transcript.close();
  metrics.close();
  if (!transcript || !metrics) Fail(ErrorCode::kIo, "write failed in " + dir.string());

  WriteFile(art.checkpoint, SerializeCheckpoint(config, seed, state));
  json files = json::object();
  for (const fs::path& p : {art.config, art.transcript, art.metrics, art.checkpoint}) {
    const std::string bytes = ReadFile(p);
    files[p.filename().string()] = {{"sha256", Sha256Hex(bytes)}, {"bytes", bytes.size()}};
  }
  const json manifest = {{"format_version", kFormatVersion},
                         {"seed", seed},
                         {"created_at", UtcTimestamp()},
                         {"files", files}};
  WriteFile(art.manifest, manifest.dump(2) + "\n");
  outcome.ok = true;
  return outcome;
}

void CheckWritable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path probe = dir / ".write-probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "probe")) {
      Fail(ErrorCode::kIo, "output directory " + dir.string() + " is not writable");
    }
  }
  fs::remove(probe, ec);
}

json Aggregate(const std::vector<double>& values) {
  if (values.empty()) return nullptr;
  return {{"median", Median(values)}, {"iqr", InterquartileRange(values)}, {"n", values.size()}};
}

json FinalMetricsJson(const MetricRecord& m) {
  json doc = MetricJson(m);
  doc.erase("type");
  if (auto mean = m.mean_ari_z()) doc["mean_ari_z_vs_truth"] = *mean;
  return doc;
}

}  // namespace

bool ExperimentResult::all_ok() const {
  return std::all_of(seeds.begin(), seeds.end(), [](const SeedOutcome& s) { return s.ok; });
}

ExperimentResult RunExperiment(const ExperimentConfig& config, const RunOptions& options) {
  config.Validate();
  CheckWritable(config.output_dir);

  auto run_one = [&](std::uint64_t seed) {
    SeedOutcome outcome;
    outcome.seed = seed;
    try {
      if (options.before_seed) options.before_seed(seed);
      outcome = ExecuteRun(config, seed, InitTraining(config, seed),
                           config.output_dir / ("seed-" + std::to_string(seed)));
    } catch (const Error& e) {
      outcome.ok = false;
      outcome.error_code = ErrorCodeName(e.code());
      outcome.error_message = e.what();
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.error_code = ErrorCodeName(ErrorCode::kInternal);
      outcome.error_message = e.what();
    }
    return outcome;
  };

  ExperimentResult result;
  if (options.parallel && config.seeds.size() > 1) {
    std::vector<std::future<SeedOutcome>> futures;
    for (auto seed : config.seeds) futures.push_back(std::async(std::launch::async, run_one, seed));
    for (auto& f : futures) result.seeds.push_back(f.get());
  } else {
    for (auto seed : config.seeds) result.seeds.push_back(run_one(seed));
  }

  json seeds = json::array();
  std::vector<double> kappa, ari_signs, ari_z, free_energy;
  for (const auto& s : result.seeds) {
    if (!s.ok) {
      seeds.push_back({{"seed", s.seed}, {"status", "error"},
                       {"code", s.error_code}, {"message", s.error_message}});
      continue;
    }
    const MetricRecord& last = s.metrics.back();
    seeds.push_back({{"seed", s.seed}, {"status", "ok"},
                     {"dir", s.artifact.dir.string()}, {"final", FinalMetricsJson(last)}});
    kappa.push_back(last.kappa);
    free_energy.push_back(last.free_energy_total);
    if (last.ari_signs_vs_truth) ari_signs.push_back(*last.ari_signs_vs_truth);
    if (auto mean = last.mean_ari_z()) ari_z.push_back(*mean);
  }
  result.summary = {{"status", result.all_ok() ? "ok" : "partial_failure"},
                    {"config", EmitConfig(config)},
                    {"seeds", seeds},
                    {"aggregate",
                     {{"kappa", Aggregate(kappa)},
                      {"ari_signs_vs_truth", Aggregate(ari_signs)},
                      {"mean_ari_z_vs_truth", Aggregate(ari_z)},
                      {"free_energy_total", Aggregate(free_energy)}}}};
  WriteFile(config.output_dir / "summary.json", result.summary.dump(2) + "\n");
  return result;
}

SeedOutcome ResumeRun(const Checkpoint& checkpoint, const fs::path& out_dir,
                      std::optional<std::int64_t> total_rounds) {
  ExperimentConfig config = checkpoint.config;
  if (total_rounds) config.rounds = *total_rounds;
  config.output_dir = out_dir;
  config.Validate();
  Require(checkpoint.state.next_round <= config.rounds,
          "ResumeRun: checkpoint is already past the requested round count");
  CheckWritable(out_dir);
  return ExecuteRun(config, checkpoint.seed, checkpoint.state, out_dir);
}

ReplayResult ReplayFromFiles(const fs::path& transcript,
                             std::optional<fs::path> checkpoint) {
  const GameTranscript t = LoadTranscript(transcript);
  ReplayResult result;
  result.signs = ReplayTranscript(t);
  result.events = t.events.size();
  if (!checkpoint) {
    const fs::path sibling = transcript.parent_path() / "checkpoint.json";
    if (fs::exists(sibling)) checkpoint = sibling;
  }
  if (checkpoint) {
    const Checkpoint cp = LoadCheckpointFile(*checkpoint);
    result.matches_checkpoint = cp.state.signs == result.signs;
  }
  return result;
}

}  // namespace cpc
