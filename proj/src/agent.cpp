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

#include "cpc/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpc/error.hpp"

namespace cpc {

const char* ProposalModeName(ProposalMode mode) {
  return mode == ProposalMode::kSampled ? "sampled" : "collapsed";
}

ProposalMode ParseProposalMode(const std::string& name) {
  if (name == "sampled") return ProposalMode::kSampled;
  if (name == "collapsed") return ProposalMode::kCollapsed;
  Fail(ErrorCode::kValidation, "unknown mode '" + name + "'");
}

void AgentState::Validate() const {
  hyper.Validate();
  const int W = num_signs();
  const int Z = num_categories();
  if (static_cast<int>(emissions.size()) != Z) {
    Fail(ErrorCode::kValidation, "agent emissions must have one entry per category");
  }
  if (association.size() != static_cast<std::size_t>(W) * Z) {
    Fail(ErrorCode::kValidation, "agent association must be W x Z");
  }
  for (auto c : association) {
    if (c < 0) Fail(ErrorCode::kValidation, "association counts must be >= 0");
  }
  for (int z : assignments) {
    if (z < 0 || z >= Z) Fail(ErrorCode::kValidation, "assignment out of range");
  }
  for (const auto& e : emissions) {
    if ((!hyper.ng_mean0.empty() && e.mean.size() != hyper.ng_mean0.size()) ||
        e.precision.size() != e.mean.size()) {
      Fail(ErrorCode::kValidation, "emission dimension mismatch");
    }
    for (double p : e.precision) {
      if (!(p > 0.0)) Fail(ErrorCode::kValidation, "emission precision must be > 0");
    }
  }
}

AgentState InitAgent(int id, const GaussCatHyper& hyper,
                     const AgentObservations& obs, Rng& rng) {
  hyper.Validate();
  const int M = obs.dim;
  const int D = obs.num_objects();
  Require(M >= 1 && D >= 1, "InitAgent: empty observations");

  std::vector<double> data_mean(M, 0.0);
  std::vector<double> data_var(M, 0.0);
  for (int d = 0; d < D; ++d) {
    for (int i = 0; i < M; ++i) data_mean[i] += obs.row(d)[i];
  }
  for (double& m : data_mean) m /= D;
  for (int d = 0; d < D; ++d) {
    for (int i = 0; i < M; ++i) {
      const double diff = obs.row(d)[i] - data_mean[i];
      data_var[i] += diff * diff;
    }
  }
  for (double& v : data_var) v /= D;

  AgentState agent;
  agent.id = id;
  agent.hyper = hyper;
  if (!agent.hyper.ng_mean0.empty()) {
    Require(static_cast<int>(agent.hyper.ng_mean0.size()) == M,
            "InitAgent: hyper.ng_mean0 length differs from feature dimension");
  }
  const int Z = hyper.num_categories;
  const int W = hyper.num_signs;

  agent.assignments.resize(D);
  for (int& z : agent.assignments) z = static_cast<int>(rng.Below(Z));

  agent.emissions.resize(Z);
  for (auto& e : agent.emissions) {
    e.mean.resize(M);
    e.precision.resize(M);
    for (int i = 0; i < M; ++i) {
      const bool spread = data_var[i] > 0.0;
      const double sd = spread ? std::sqrt(data_var[i]) : 0.0;
      e.mean[i] = data_mean[i] + sd * rng.Normal();
      e.precision[i] = spread ? 1.0 / data_var[i] : hyper.ng_a0 / hyper.ng_b0;
    }
  }
  agent.association.assign(static_cast<std::size_t>(W) * Z, 0);
  return agent;
}

std::vector<double> AssociationPredictive(const AgentState& agent, int w) {
  Require(w >= 0 && w < agent.num_signs(), "sign index out of range");
  return DirichletPredictive(agent.association_row(w), agent.hyper.dirichlet_alpha);
}

std::vector<double> EmissionLogLikelihoods(const AgentState& agent,
                                           const AgentObservations& obs, int d) {
  Require(d >= 0 && d < obs.num_objects(), "object index out of range");
  std::vector<double> out(agent.num_categories());
  const auto x = obs.row(d);
  for (int z = 0; z < agent.num_categories(); ++z) {
    const auto& e = agent.emissions[z];
    out[z] = LogGaussianDiag(x, e.mean, e.precision);
  }
  return out;
}

std::vector<double> PerceptionLogWeights(const AgentState& agent,
                                         const AgentObservations& obs, int d,
                                         int sign) {
  auto weights = EmissionLogLikelihoods(agent, obs, d);
  const auto prior = AssociationPredictive(agent, sign);
  for (std::size_t z = 0; z < weights.size(); ++z) weights[z] += std::log(prior[z]);
  return weights;
}

namespace {

// log p(w) under the symmetric Dirichlet prior with no sign counts: uniform.
double LogSignPrior(const AgentState& agent) {
  return -std::log(static_cast<double>(agent.num_signs()));
}

// Log of the listener-side likelihood of sign w for object d.
double SignLogLikelihood(const AgentState& agent, int d, int w, ProposalMode mode,
                         std::span<const double> emission_loglik) {
  const auto phi = AssociationPredictive(agent, w);
  if (mode == ProposalMode::kSampled) {
    return std::log(phi[agent.assignments[d]]);
  }
  std::vector<double> terms(phi.size());
  for (std::size_t z = 0; z < phi.size(); ++z) {
    terms[z] = emission_loglik[z] + std::log(phi[z]);
  }
  return LogSumExp(terms);
}

}  // namespace

std::vector<double> SignLogWeights(const AgentState& agent, int d,
                                   ProposalMode mode,
                                   const AgentObservations& obs) {
  Require(d >= 0 && d < static_cast<int>(agent.assignments.size()),
          "object index out of range");
  std::vector<double> loglik;
  if (mode == ProposalMode::kCollapsed) loglik = EmissionLogLikelihoods(agent, obs, d);
  std::vector<double> weights(agent.num_signs());
  for (int w = 0; w < agent.num_signs(); ++w) {
    weights[w] = LogSignPrior(agent) + SignLogLikelihood(agent, d, w, mode, loglik);
  }
  return weights;
}

void Perceive(AgentState& agent, const AgentObservations& obs,
              const SignAssignment& signs, Rng& rng) {
  Require(signs.size() == obs.num_objects() &&
              static_cast<int>(agent.assignments.size()) == obs.num_objects(),
          "Perceive: sign/observation length mismatch");
  for (int d = 0; d < obs.num_objects(); ++d) {
    const auto weights = PerceptionLogWeights(agent, obs, d, signs[d]);
    agent.assignments[d] = static_cast<int>(CategoricalSample(weights, rng));
  }
}

int ProposeSign(const AgentState& speaker, int d, ProposalMode mode,
                const AgentObservations& obs, Rng& rng) {
  const auto weights = SignLogWeights(speaker, d, mode, obs);
  return static_cast<int>(CategoricalSample(weights, rng));
}

double AcceptanceProbability(const AgentState& listener, int d, int proposed,
                             int current, ProposalMode mode,
                             const AgentObservations& obs) {
  const int W = listener.num_signs();
  Require(proposed >= 0 && proposed < W && current >= 0 && current < W,
          "AcceptanceProbability: sign out of range");
  Require(d >= 0 && d < static_cast<int>(listener.assignments.size()),
          "object index out of range");
  if (proposed == current) return 1.0;
  std::vector<double> loglik;
  if (mode == ProposalMode::kCollapsed) loglik = EmissionLogLikelihoods(listener, obs, d);
  const double num = SignLogLikelihood(listener, d, proposed, mode, loglik);
  const double den = SignLogLikelihood(listener, d, current, mode, loglik);
  if (den == -std::numeric_limits<double>::infinity()) return 1.0;
  return std::exp(std::min(0.0, num - den));
}

bool Decide(const AgentState& listener, double r, Rng& rng) {
  Require(r >= 0.0 && r <= 1.0, "Decide: probability outside [0, 1]");
  const double u = rng.Uniform();
  if (listener.frozen_language) return false;
  return u < r;
}

void UpdateParameters(AgentState& agent, const AgentObservations& obs,
                      const SignAssignment& signs) {
  const int D = obs.num_objects();
  const int M = obs.dim;
  const int Z = agent.num_categories();
  Require(signs.size() == D && static_cast<int>(agent.assignments.size()) == D,
          "UpdateParameters: sign/observation length mismatch");

  std::vector<std::vector<int>> members(Z);
  for (int d = 0; d < D; ++d) members[agent.assignments[d]].push_back(d);

  const auto& h = agent.hyper;
  std::vector<double> prior_mean = h.ng_mean0;
  if (prior_mean.empty()) {
    prior_mean.assign(M, 0.0);
    for (int d = 0; d < D; ++d) {
      for (int i = 0; i < M; ++i) prior_mean[i] += obs.row(d)[i];
    }
    for (double& m : prior_mean) m /= D;
  }
  std::vector<double> feature;
  for (int z = 0; z < Z; ++z) {
    auto& e = agent.emissions[z];
    for (int i = 0; i < M; ++i) {
      feature.clear();
      for (int d : members[z]) feature.push_back(obs.row(d)[i]);
      const NormalGamma post = NormalGammaUpdate(
          {prior_mean[i], h.ng_kappa0, h.ng_a0, h.ng_b0}, feature);
      e.mean[i] = post.mean;
      e.precision[i] = post.shape / post.rate;
    }
  }

  if (agent.frozen_language) return;
  std::fill(agent.association.begin(), agent.association.end(), 0);
  for (int d = 0; d < D; ++d) {
    agent.association[static_cast<std::size_t>(signs[d]) * Z +
                      agent.assignments[d]] += 1;
  }
}

int MapSignEstimate(const AgentState& agent, int d, ProposalMode mode,
                    const AgentObservations& obs) {
  const auto weights = SignLogWeights(agent, d, mode, obs);
  return static_cast<int>(std::max_element(weights.begin(), weights.end()) -
                          weights.begin());
}

}  // namespace cpc
