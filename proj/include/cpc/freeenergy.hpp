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

#ifndef CPC_FREEENERGY_HPP_
#define CPC_FREEENERGY_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "cpc/agent.hpp"
#include "cpc/signs.hpp"
#include "cpc/world.hpp"

namespace cpc {

// Collective free energy split into its three terms. Plug-in estimator: the
// point parameters stand in for their posteriors, and the observation
// entropy constant is dropped, so totals compare only within one dataset.
struct FreeEnergyReport {
  std::int64_t round = 0;
  double collective_regularization = 0.0;
  std::vector<double> individual_prediction_error;  // per agent
  std::vector<double> individual_regularization;    // per agent
  double total = 0.0;

  friend bool operator==(const FreeEnergyReport&, const FreeEnergyReport&) = default;
};

// q_d(w) proportional to p(w) * prod_k p_k(z^k_d | w).
std::vector<double> SignPosterior(std::span<const AgentState> agents, int d);

// sum_d KL[q_d || p(w)].
double CollectiveRegularization(std::span<const AgentState> agents,
                                const SignAssignment& signs,
                                const ObservationSet& obs);

// sum_d sum_z q(z | o_d, w_d) * -log p(o_d | theta_z).
double IndividualPredictionError(const AgentState& agent,
                                 const AgentObservations& obs,
                                 const SignAssignment& signs);

// sum_d KL[q(z | o_d) || p(z | w_d)] with q the likelihood-only posterior.
double IndividualRegularization(const AgentState& agent,
                                const SignAssignment& signs,
                                const AgentObservations& obs);

FreeEnergyReport EstimateTotal(std::span<const AgentState> agents,
                               const SignAssignment& signs,
                               const ObservationSet& obs, std::int64_t round);

}  // namespace cpc

#endif  // CPC_FREEENERGY_HPP_
