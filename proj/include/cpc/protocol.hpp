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

#ifndef CPC_PROTOCOL_HPP_
#define CPC_PROTOCOL_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cpc/agent.hpp"
#include "cpc/freeenergy.hpp"
#include "cpc/rng.hpp"
#include "cpc/signs.hpp"
#include "cpc/world.hpp"

namespace cpc {

// mh: the listener runs the Metropolis-Hastings test. always/never are the
// imitation and no-communication baselines.
enum class ProtocolVariant { kMh, kAlways, kNever };

const char* ProtocolVariantName(ProtocolVariant variant);
ProtocolVariant ParseProtocolVariant(const std::string& name);

// One naming-game exchange. Only public integers: no features, no
// categories, no parameters.
struct TranscriptEvent {
  std::int64_t round = 0;
  int speaker = 0;
  int listener = 0;
  int object = 0;
  int proposed_sign = 0;
  bool accepted = false;

  friend bool operator==(const TranscriptEvent&, const TranscriptEvent&) = default;
};

struct GameTranscript {
  std::uint64_t rng_seed = 0;
  std::vector<int> initial_signs;
  std::uint64_t initial_version = 0;
  std::vector<TranscriptEvent> events;

  friend bool operator==(const GameTranscript&, const GameTranscript&) = default;
};

using EventSink = std::function<void(const TranscriptEvent&)>;

// K = 2 alternates roles by round parity and draws nothing. K > 2 draws a
// uniformly random (near-)perfect matching with random speaker/listener
// order; with odd K one agent sits out.
std::vector<std::pair<int, int>> PairingSchedule(int num_agents,
                                                 std::int64_t round, Rng& rng);

// Runs every scheduled pair over all objects in index order. Agent k's
// proposals and decisions draw from agent_rngs[k]; the schedule draws from
// protocol_rng. Frozen listeners reject under every variant.
std::vector<TranscriptEvent> RunRound(std::span<const AgentState> agents,
                                      std::span<Rng> agent_rngs,
                                      SignAssignment& signs,
                                      const ObservationSet& obs,
                                      ProtocolVariant variant, ProposalMode mode,
                                      std::int64_t round, Rng& protocol_rng,
                                      const EventSink& sink = {});

// Applies the accepted events to the initial assignment.
SignAssignment ReplayTranscript(const GameTranscript& transcript);

struct TrainingSchedule {
  ProtocolVariant variant = ProtocolVariant::kMh;
  ProposalMode mode = ProposalMode::kSampled;
  std::int64_t rounds = 1;
  std::optional<std::int64_t> freeze_after;
  // World used to regenerate observations at shift->round. Needs a shift.
  std::optional<WorldConfig> shift_world;
};

// Everything that evolves during training; checkpoints serialize this.
struct TrainingState {
  std::vector<AgentState> agents;
  std::vector<Rng> agent_rngs;
  Rng protocol_rng;
  SignAssignment signs;
  ObservationSet obs;
  std::int64_t next_round = 0;
  bool shift_applied = false;

  friend bool operator==(const TrainingState&, const TrainingState&) = default;
};

struct TrainingObserver {
  EventSink on_event;
  std::function<void(const TrainingState&, const FreeEnergyReport&)> on_round;
};

// One round: triggers, perceive, exchanges, parameter updates, free energy.
FreeEnergyReport TrainOneRound(TrainingState& state,
                               const TrainingSchedule& schedule,
                               const TrainingObserver& observer = {});

struct TrainingResult {
  GameTranscript transcript;
  std::vector<FreeEnergyReport> free_energy;
};

// Runs rounds [state.next_round, schedule.rounds).
TrainingResult RunTraining(TrainingState& state, const TrainingSchedule& schedule,
                           const TrainingObserver& observer = {});

}  // namespace cpc

#endif  // CPC_PROTOCOL_HPP_
