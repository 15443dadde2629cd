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

#include "cpc_c.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <string>

#include "cpc/error.hpp"
#include "cpc/runner.hpp"
#include "cpc/suites.hpp"

struct cpc_config {
  cpc::ExperimentConfig value;
};

struct cpc_sim {
  cpc::ExperimentConfig config;
  std::uint64_t seed = 0;
  cpc::TrainingSchedule schedule;
  cpc::TrainingState state;
  double last_total = std::numeric_limits<double>::quiet_NaN();
};

namespace {

thread_local std::string g_last_error;

cpc_status Status(cpc::ErrorCode code) { return static_cast<cpc_status>(code); }

char* Dup(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename F>
cpc_status Guard(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (const cpc::Error& e) {
    g_last_error = e.what();
    return Status(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return CPC_ERR_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CPC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return CPC_ERR_INTERNAL;
  }
}

void NotNull(const void* p, const char* what) {
  cpc::Require(p != nullptr, std::string(what) + " must not be null");
}

}  // namespace

extern "C" {

const char* cpc_version(void) { return "0.1.0"; }

const char* cpc_last_error(void) { return g_last_error.c_str(); }

const char* cpc_status_name(cpc_status status) {
  switch (status) {
    case CPC_OK: return "ok";
    case CPC_ERR_CRITERIA_FAILED: return "criteria_failed";
    case CPC_ERR_PARTIAL_FAILURE: return "partial_failure";
    default:
      if (status >= CPC_ERR_INVALID_ARGUMENT && status <= CPC_ERR_INTERNAL) {
        return cpc::ErrorCodeName(static_cast<cpc::ErrorCode>(status));
      }
      return "unknown";
  }
}

void cpc_string_free(char* s) { delete[] s; }

cpc_status cpc_config_load(const char* path, cpc_config** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new cpc_config{cpc::ParseConfig(path)};
    return CPC_OK;
  });
}

cpc_status cpc_config_from_json(const char* json, cpc_config** out) {
  return Guard([&] {
    NotNull(json, "json");
    NotNull(out, "out");
    *out = new cpc_config{cpc::ParseConfigText(json)};
    return CPC_OK;
  });
}

cpc_status cpc_config_to_json(const cpc_config* config, char** out) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(out, "out");
    *out = Dup(cpc::EmitConfig(config->value).dump(2));
    return CPC_OK;
  });
}

cpc_status cpc_config_set_output_dir(cpc_config* config, const char* dir) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(dir, "dir");
    config->value.output_dir = dir;
    return CPC_OK;
  });
}

cpc_status cpc_config_set_seeds(cpc_config* config, const uint64_t* seeds, size_t count) {
  return Guard([&] {
    NotNull(config, "config");
    cpc::Require(count > 0 && seeds != nullptr, "at least one seed is required");
    config->value.seeds.assign(seeds, seeds + count);
    return CPC_OK;
  });
}

void cpc_config_free(cpc_config* config) { delete config; }

cpc_status cpc_run_experiment(const cpc_config* config, char** summary) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(summary, "summary");
    const cpc::ExperimentResult result = cpc::RunExperiment(config->value);
    *summary = Dup(result.summary.dump(2));
    return result.all_ok() ? CPC_OK : CPC_ERR_PARTIAL_FAILURE;
  });
}

cpc_status cpc_run_suite(const char* name, const char* out_dir, char** report) {
  return Guard([&] {
    NotNull(name, "name");
    NotNull(out_dir, "out_dir");
    NotNull(report, "report");
    const cpc::SuiteReport r = cpc::RunSuite(name, out_dir);
    *report = Dup(r.ToJson().dump(2));
    return r.passed() ? CPC_OK : CPC_ERR_CRITERIA_FAILED;
  });
}

cpc_status cpc_replay_transcript(const char* transcript, const char* checkpoint, char** result) {
  return Guard([&] {
    NotNull(transcript, "transcript");
    NotNull(result, "result");
    std::optional<std::filesystem::path> cp;
    if (checkpoint != nullptr) cp = checkpoint;
    const cpc::ReplayResult r = cpc::ReplayFromFiles(transcript, cp);
    nlohmann::json doc = {{"status", "ok"},
                          {"events", r.events},
                          {"final_signs", r.signs.signs},
                          {"version", r.signs.version}};
    doc["matches_checkpoint"] =
        r.matches_checkpoint ? nlohmann::json(*r.matches_checkpoint) : nlohmann::json(nullptr);
    if (r.matches_checkpoint && !*r.matches_checkpoint) {
      doc["status"] = "mismatch";
      *result = Dup(doc.dump(2));
      g_last_error = "replayed signs differ from the checkpoint";
      return CPC_ERR_VALIDATION;
    }
    *result = Dup(doc.dump(2));
    return CPC_OK;
  });
}

cpc_status cpc_resume(const char* checkpoint, const char* out_dir, int64_t total_rounds,
                      char** result) {
  return Guard([&] {
    NotNull(checkpoint, "checkpoint");
    NotNull(out_dir, "out_dir");
    NotNull(result, "result");
    std::optional<std::int64_t> rounds;
    if (total_rounds > 0) rounds = total_rounds;
    const cpc::SeedOutcome o =
        cpc::ResumeRun(cpc::LoadCheckpointFile(checkpoint), out_dir, rounds);
    nlohmann::json doc = {{"status", "ok"}, {"seed", o.seed}, {"dir", o.artifact.dir.string()}};
    if (!o.metrics.empty()) doc["final"] = cpc::MetricJson(o.metrics.back());
    *result = Dup(doc.dump(2));
    return CPC_OK;
  });
}

cpc_status cpc_sim_create(const cpc_config* config, uint64_t seed, cpc_sim** out) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(out, "out");
    config->value.Validate();
    auto sim = std::make_unique<cpc_sim>();
    sim->config = config->value;
    sim->seed = seed;
    sim->schedule = cpc::MakeSchedule(sim->config, seed);
    sim->state = cpc::InitTraining(sim->config, seed);
    *out = sim.release();
    return CPC_OK;
  });
}

cpc_status cpc_sim_step(cpc_sim* sim, int64_t rounds) {
  return Guard([&] {
    NotNull(sim, "sim");
    cpc::Require(rounds >= 0, "rounds must be non-negative");
    for (int64_t i = 0; i < rounds; ++i) {
      sim->last_total = cpc::TrainOneRound(sim->state, sim->schedule).total;
    }
    return CPC_OK;
  });
}

cpc_status cpc_sim_round(const cpc_sim* sim, int64_t* round) {
  return Guard([&] {
    NotNull(sim, "sim");
    NotNull(round, "round");
    *round = sim->state.next_round;
    return CPC_OK;
  });
}

cpc_status cpc_sim_signs(const cpc_sim* sim, int32_t* buffer, size_t capacity, size_t* count) {
  return Guard([&] {
    NotNull(sim, "sim");
    NotNull(count, "count");
    const auto& signs = sim->state.signs.signs;
    *count = signs.size();
    cpc::Require(capacity == 0 || buffer != nullptr, "buffer must not be null");
    for (size_t i = 0; i < signs.size() && i < capacity; ++i) buffer[i] = signs[i];
    return CPC_OK;
  });
}

cpc_status cpc_sim_free_energy(const cpc_sim* sim, double* total) {
  return Guard([&] {
    NotNull(sim, "sim");
    NotNull(total, "total");
    *total = sim->last_total;
    return CPC_OK;
  });
}

cpc_status cpc_sim_save_checkpoint(const cpc_sim* sim, const char* path) {
  return Guard([&] {
    NotNull(sim, "sim");
    NotNull(path, "path");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) cpc::Fail(cpc::ErrorCode::kIo, std::string("cannot open ") + path);
    out << cpc::SerializeCheckpoint(sim->config, sim->seed, sim->state);
    if (!out) cpc::Fail(cpc::ErrorCode::kIo, std::string("cannot write ") + path);
    return CPC_OK;
  });
}

cpc_status cpc_sim_load_checkpoint(const char* path, cpc_sim** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    cpc::Checkpoint cp = cpc::LoadCheckpointFile(path);
    auto sim = std::make_unique<cpc_sim>();
    sim->config = cp.config;
    sim->seed = cp.seed;
    sim->schedule = cpc::MakeSchedule(sim->config, cp.seed);
    sim->state = std::move(cp.state);
    *out = sim.release();
    return CPC_OK;
  });
}

void cpc_sim_free(cpc_sim* sim) { delete sim; }

}  // extern "C"
