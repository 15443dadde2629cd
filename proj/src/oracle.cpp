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

#include "cpc/oracle.hpp"

#include <cmath>
#include <limits>

#include "cpc/error.hpp"
#include "cpc/probkernels.hpp"

namespace cpc {

void TinyInstance::CheckBounds() const {
  Require(!agents.empty(), "TinyInstance: no agents");
  Require(static_cast<int>(agents.size()) == obs.num_agents(),
          "TinyInstance: agent count differs from observations");
  const int K = static_cast<int>(agents.size());
  const int D = num_objects();
  const int W = num_signs();
  const int Z = agents.front().num_categories();
  Require(K <= 3 && D >= 1 && D <= 4 && W <= 4 && Z <= 4,
          "TinyInstance: outside enumerable bounds (K<=3, D<=4, W<=4, Z<=4)");
  Require(std::pow(static_cast<double>(W), D) <= 256.0,
          "TinyInstance: joint sign space exceeds 256");
  for (const auto& a : agents) {
    Require(a.num_signs() == W, "TinyInstance: agents disagree on W");
  }
}

std::size_t JointIndex(std::span<const int> signs, int num_signs) {
  std::size_t index = 0;
  std::size_t stride = 1;
  for (int w : signs) {
    index += stride * static_cast<std::size_t>(w);
    stride *= static_cast<std::size_t>(num_signs);
  }
  return index;
}

PosteriorTable EnumeratePosterior(const TinyInstance& inst) {
  inst.CheckBounds();
  const int W = inst.num_signs();
  const int D = inst.num_objects();
  PosteriorTable table;
  table.num_signs = W;
  table.num_objects = D;
  table.per_object.resize(D);
  for (int d = 0; d < D; ++d) {
    std::vector<double> logw(W, -std::log(static_cast<double>(W)));
    for (std::size_t k = 0; k < inst.agents.size(); ++k) {
      const auto& agent = inst.agents[k];
      const auto loglik = EmissionLogLikelihoods(agent, inst.obs.agents[k], d);
      for (int w = 0; w < W; ++w) {
        const auto phi = AssociationPredictive(agent, w);
        std::vector<double> terms(phi.size());
        for (std::size_t z = 0; z < phi.size(); ++z) {
          terms[z] = loglik[z] + std::log(phi[z]);
        }
        logw[w] += LogSumExp(terms);
      }
    }
    table.per_object[d] = NormalizeLogWeights(logw);
  }

  std::size_t size = 1;
  for (int d = 0; d < D; ++d) size *= static_cast<std::size_t>(W);
  table.joint.assign(size, 0.0);
  for (std::size_t index = 0; index < size; ++index) {
    double p = 1.0;
    std::size_t rest = index;
    for (int d = 0; d < D; ++d) {
      p *= table.per_object[d][rest % W];
      rest /= W;
    }
    table.joint[index] = p;
  }
  return table;
}

std::vector<std::vector<int>> CentralizedGibbs(const TinyInstance& inst,
                                               std::int64_t iterations, Rng& rng) {
  Require(iterations >= 1, "CentralizedGibbs: iterations must be >= 1");
  // The full conditional of w_d given everything else is its per-object
  // posterior, since objects do not interact once z is summed out.
  const PosteriorTable table = EnumeratePosterior(inst);
  const int D = table.num_objects;
  std::vector<std::vector<double>> logp(D);
  for (int d = 0; d < D; ++d) {
    for (double p : table.per_object[d]) {
      logp[d].push_back(p > 0.0 ? std::log(p)
                                : -std::numeric_limits<double>::infinity());
    }
  }
  std::vector<int> state(D, 0);
  std::vector<std::vector<int>> chain;
  const std::int64_t burn = BurnIn(iterations);
  chain.reserve(static_cast<std::size_t>(iterations - burn));
  for (std::int64_t it = 0; it < iterations; ++it) {
    for (int d = 0; d < D; ++d) {
      state[d] = static_cast<int>(CategoricalSample(logp[d], rng));
    }
    if (it >= burn) chain.push_back(state);
  }
  return chain;
}

std::vector<double> EmpiricalJoint(std::span<const std::vector<int>> chain,
                                   int num_signs, int num_objects) {
  Require(!chain.empty(), "EmpiricalJoint: empty chain");
  std::size_t size = 1;
  for (int d = 0; d < num_objects; ++d) size *= static_cast<std::size_t>(num_signs);
  std::vector<double> freq(size, 0.0);
  for (const auto& sample : chain) {
    Require(static_cast<int>(sample.size()) == num_objects,
            "EmpiricalJoint: sample length mismatch");
    freq[JointIndex(sample, num_signs)] += 1.0;
  }
  for (double& f : freq) f /= static_cast<double>(chain.size());
  return freq;
}

double TotalVariationDistance(std::span<const double> p, std::span<const double> q) {
  Require(p.size() == q.size(), "TotalVariationDistance: support mismatch");
  double mass_p = 0.0;
  double mass_q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    mass_p += p[i];
    mass_q += q[i];
  }
  Require(std::abs(mass_p - 1.0) <= 1e-9 && std::abs(mass_q - 1.0) <= 1e-9,
          "TotalVariationDistance: tables must be normalized");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

}  // namespace cpc
