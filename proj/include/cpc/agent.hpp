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

#ifndef CPC_AGENT_HPP_
#define CPC_AGENT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cpc/probkernels.hpp"
#include "cpc/rng.hpp"
#include "cpc/signs.hpp"
#include "cpc/world.hpp"

namespace cpc {

// sampled: proposals and acceptance use the agent's current category draw.
// collapsed: the category is summed out under the current parameters.
enum class ProposalMode { kSampled, kCollapsed };

const char* ProposalModeName(ProposalMode mode);
ProposalMode ParseProposalMode(const std::string& name);

struct Emission {
  std::vector<double> mean;
  std::vector<double> precision;

  friend bool operator==(const Emission&, const Emission&) = default;
};

// One agent's private generative model. Protocol code never reads these
// fields; it only sees the outputs of ProposeSign, AcceptanceProbability and
// Decide.
struct AgentState {
  int id = 0;
  std::vector<int> assignments;        // z_d, one per object
  std::vector<Emission> emissions;     // theta_z, one per category
  std::vector<std::int64_t> association;  // W x Z co-occurrence counts, row-major
  GaussCatHyper hyper;
  bool frozen_language = false;

  int num_signs() const { return hyper.num_signs; }
  int num_categories() const { return hyper.num_categories; }
  std::span<const std::int64_t> association_row(int w) const {
    return {association.data() + static_cast<std::size_t>(w) * num_categories(),
            static_cast<std::size_t>(num_categories())};
  }
  void Validate() const;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

AgentState InitAgent(int id, const GaussCatHyper& hyper,
                     const AgentObservations& obs, Rng& rng);

// p(z | w) from the smoothed association counts.
std::vector<double> AssociationPredictive(const AgentState& agent, int w);

// log p(o_d | theta_z) for every category.
std::vector<double> EmissionLogLikelihoods(const AgentState& agent,
                                           const AgentObservations& obs, int d);

// Log weights of the perception posterior q(z | o_d, w_d), unnormalized.
std::vector<double> PerceptionLogWeights(const AgentState& agent,
                                         const AgentObservations& obs, int d,
                                         int sign);

// Unnormalized log weights over signs used for proposals and MAP readout.
std::vector<double> SignLogWeights(const AgentState& agent, int d,
                                   ProposalMode mode,
                                   const AgentObservations& obs);

// One Gibbs sweep over objects resampling every z_d.
void Perceive(AgentState& agent, const AgentObservations& obs,
              const SignAssignment& signs, Rng& rng);

int ProposeSign(const AgentState& speaker, int d, ProposalMode mode,
                const AgentObservations& obs, Rng& rng);

// Metropolis-Hastings acceptance ratio computed from listener-local state.
// A zero current likelihood yields 1.
double AcceptanceProbability(const AgentState& listener, int d, int proposed,
                             int current, ProposalMode mode,
                             const AgentObservations& obs);

// Bernoulli(r). A listener with a frozen language always rejects. Either
// way exactly one draw is consumed.
bool Decide(const AgentState& listener, double r, Rng& rng);

// Re-estimates theta from current assignments and, unless frozen, recounts
// the sign-category co-occurrences.
void UpdateParameters(AgentState& agent, const AgentObservations& obs,
                      const SignAssignment& signs);

// Argmax of SignLogWeights, lowest index on ties. Consumes no randomness.
int MapSignEstimate(const AgentState& agent, int d, ProposalMode mode,
                    const AgentObservations& obs);

}  // namespace cpc

#endif  // CPC_AGENT_HPP_
