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

#include "cpc/freeenergy.hpp"

#include <cmath>

#include "cpc/error.hpp"
#include "cpc/probkernels.hpp"

namespace cpc {

std::vector<double> SignPosterior(std::span<const AgentState> agents, int d) {
  Require(!agents.empty(), "SignPosterior: no agents");
  const int W = agents.front().num_signs();
  // Uniform p(w) cancels in the normalization but is kept for clarity.
  std::vector<double> logw(W, -std::log(static_cast<double>(W)));
  for (const auto& agent : agents) {
    Require(agent.num_signs() == W, "SignPosterior: agents disagree on W");
    const int z = agent.assignments.at(d);
    for (int w = 0; w < W; ++w) logw[w] += std::log(AssociationPredictive(agent, w)[z]);
  }
  return NormalizeLogWeights(logw);
}

double CollectiveRegularization(std::span<const AgentState> agents,
                                const SignAssignment& signs,
                                const ObservationSet& obs) {
  Require(!agents.empty(), "CollectiveRegularization: no agents");
  Require(signs.size() == obs.num_objects(),
          "CollectiveRegularization: sign/observation length mismatch");
  const int W = agents.front().num_signs();
  const std::vector<double> prior(W, 1.0 / W);
  double total = 0.0;
  for (int d = 0; d < obs.num_objects(); ++d) {
    total += KlDivergence(SignPosterior(agents, d), prior);
  }
  return total;
}

double IndividualPredictionError(const AgentState& agent,
                                 const AgentObservations& obs,
                                 const SignAssignment& signs) {
  Require(signs.size() == obs.num_objects(),
          "IndividualPredictionError: sign/observation length mismatch");
  double total = 0.0;
  for (int d = 0; d < obs.num_objects(); ++d) {
    const auto loglik = EmissionLogLikelihoods(agent, obs, d);
    const auto q = NormalizeLogWeights(PerceptionLogWeights(agent, obs, d, signs[d]));
    for (std::size_t z = 0; z < q.size(); ++z) {
      if (q[z] > 0.0) total -= q[z] * loglik[z];
    }
  }
  return total;
}

double IndividualRegularization(const AgentState& agent,
                                const SignAssignment& signs,
                                const AgentObservations& obs) {
  Require(signs.size() == obs.num_objects(),
          "IndividualRegularization: sign/observation length mismatch");
  double total = 0.0;
  for (int d = 0; d < obs.num_objects(); ++d) {
    const auto q = NormalizeLogWeights(EmissionLogLikelihoods(agent, obs, d));
    total += KlDivergence(q, AssociationPredictive(agent, signs[d]));
  }
  return total;
}

FreeEnergyReport EstimateTotal(std::span<const AgentState> agents,
                               const SignAssignment& signs,
                               const ObservationSet& obs, std::int64_t round) {
  Require(static_cast<int>(agents.size()) == obs.num_agents(),
          "EstimateTotal: agent count differs from observation set");
  FreeEnergyReport report;
  report.round = round;
  report.collective_regularization = CollectiveRegularization(agents, signs, obs);
  report.total = report.collective_regularization;
  for (std::size_t k = 0; k < agents.size(); ++k) {
    const double err = IndividualPredictionError(agents[k], obs.agents[k], signs);
    const double reg = IndividualRegularization(agents[k], signs, obs.agents[k]);
    report.individual_prediction_error.push_back(err);
    report.individual_regularization.push_back(reg);
    report.total += err + reg;
  }
  return report;
}

}  // namespace cpc
