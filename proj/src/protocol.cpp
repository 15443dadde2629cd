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

#include "cpc/protocol.hpp"

#include <numeric>

#include "cpc/error.hpp"

namespace cpc {

const char* ProtocolVariantName(ProtocolVariant variant) {
  switch (variant) {
    case ProtocolVariant::kMh: return "mh";
    case ProtocolVariant::kAlways: return "always";
    case ProtocolVariant::kNever: return "never";
  }
  return "mh";
}

ProtocolVariant ParseProtocolVariant(const std::string& name) {
  if (name == "mh") return ProtocolVariant::kMh;
  if (name == "always") return ProtocolVariant::kAlways;
  if (name == "never") return ProtocolVariant::kNever;
  Fail(ErrorCode::kValidation, "unknown protocol variant '" + name + "'");
}

std::vector<std::pair<int, int>> PairingSchedule(int num_agents,
                                                 std::int64_t round, Rng& rng) {
  Require(num_agents >= 2, "PairingSchedule: need at least two agents");
  if (num_agents == 2) {
    if (round % 2 == 0) return {{0, 1}};
    return {{1, 0}};
  }
  std::vector<int> order(num_agents);
  std::iota(order.begin(), order.end(), 0);
  for (int i = num_agents - 1; i > 0; --i) {
    std::swap(order[i], order[rng.Below(i + 1)]);
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i + 1 < num_agents; i += 2) pairs.emplace_back(order[i], order[i + 1]);
  return pairs;
}

std::vector<TranscriptEvent> RunRound(std::span<const AgentState> agents,
                                      std::span<Rng> agent_rngs,
                                      SignAssignment& signs,
                                      const ObservationSet& obs,
                                      ProtocolVariant variant, ProposalMode mode,
                                      std::int64_t round, Rng& protocol_rng,
                                      const EventSink& sink) {
  const int K = static_cast<int>(agents.size());
  Require(K == obs.num_agents() && agent_rngs.size() == agents.size(),
          "RunRound: agent count mismatch");
  Require(signs.size() == obs.num_objects(), "RunRound: sign length mismatch");

  std::vector<TranscriptEvent> events;
  for (const auto& [speaker, listener] : PairingSchedule(K, round, protocol_rng)) {
    const AgentState& s = agents[speaker];
    const AgentState& l = agents[listener];
    for (int d = 0; d < signs.size(); ++d) {
      const int proposed =
          ProposeSign(s, d, mode, obs.agents[speaker], agent_rngs[speaker]);
      bool accepted = false;
      switch (variant) {
        case ProtocolVariant::kMh: {
          const double r = AcceptanceProbability(l, d, proposed, signs[d], mode,
                                                 obs.agents[listener]);
          accepted = Decide(l, r, agent_rngs[listener]);
          break;
        }
        case ProtocolVariant::kAlways:
          accepted = !l.frozen_language;
          break;
        case ProtocolVariant::kNever:
          accepted = false;
          break;
      }
      if (accepted) signs.Commit(d, proposed);
      TranscriptEvent event{round, speaker, listener, d, proposed, accepted};
      if (sink) sink(event);
      events.push_back(event);
    }
  }
  return events;
}

SignAssignment ReplayTranscript(const GameTranscript& transcript) {
  SignAssignment signs{transcript.initial_signs, transcript.initial_version};
  for (const auto& e : transcript.events) {
    Require(e.object >= 0 && e.object < signs.size(),
            "ReplayTranscript: event object out of range");
    if (e.accepted) signs.Commit(e.object, e.proposed_sign);
  }
  return signs;
}

FreeEnergyReport TrainOneRound(TrainingState& state,
                               const TrainingSchedule& schedule,
                               const TrainingObserver& observer) {
  const std::int64_t round = state.next_round;
  if (schedule.shift_world && !state.shift_applied &&
      round >= schedule.shift_world->shift->round) {
    state.obs = ApplyShift(state.obs, *schedule.shift_world);
    state.shift_applied = true;
  }
  if (schedule.freeze_after && round >= *schedule.freeze_after) {
    for (auto& agent : state.agents) agent.frozen_language = true;
  }

  for (std::size_t k = 0; k < state.agents.size(); ++k) {
    Perceive(state.agents[k], state.obs.agents[k], state.signs, state.agent_rngs[k]);
  }
  RunRound(state.agents, state.agent_rngs, state.signs, state.obs, schedule.variant,
           schedule.mode, round, state.protocol_rng, observer.on_event);
  for (std::size_t k = 0; k < state.agents.size(); ++k) {
    UpdateParameters(state.agents[k], state.obs.agents[k], state.signs);
  }
  FreeEnergyReport report = EstimateTotal(state.agents, state.signs, state.obs, round);
  state.next_round = round + 1;
  if (observer.on_round) observer.on_round(state, report);
  return report;
}

TrainingResult RunTraining(TrainingState& state, const TrainingSchedule& schedule,
                           const TrainingObserver& observer) {
  Require(schedule.rounds >= 1, "RunTraining: round count must be >= 1");
  if (schedule.shift_world) {
    Require(schedule.shift_world->shift.has_value(),
            "RunTraining: shift world has no shift spec");
  }
  TrainingResult result;
  result.transcript.initial_signs = state.signs.signs;
  result.transcript.initial_version = state.signs.version;
  TrainingObserver chained = observer;
  chained.on_event = [&](const TranscriptEvent& e) {
    result.transcript.events.push_back(e);
    if (observer.on_event) observer.on_event(e);
  };
  while (state.next_round < schedule.rounds) {
    result.free_energy.push_back(TrainOneRound(state, schedule, chained));
  }
  return result;
}

}  // namespace cpc
