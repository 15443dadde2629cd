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

#ifndef CPC_ORACLE_HPP_
#define CPC_ORACLE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "cpc/agent.hpp"
#include "cpc/rng.hpp"
#include "cpc/world.hpp"

namespace cpc {

// A fixed-parameter model small enough to enumerate every joint sign
// assignment. p(w) is uniform.
struct TinyInstance {
  std::vector<AgentState> agents;
  ObservationSet obs;

  int num_signs() const { return agents.front().num_signs(); }
  int num_objects() const { return obs.num_objects(); }
  // Throws kInvalidArgument outside D <= 4, K <= 3, W <= 4, Z <= 4, W^D <= 256.
  void CheckBounds() const;
};

// Joint assignments are indexed little-endian: w_0 + W * w_1 + W^2 * w_2 ...
std::size_t JointIndex(std::span<const int> signs, int num_signs);

struct PosteriorTable {
  int num_signs = 0;
  int num_objects = 0;
  std::vector<std::vector<double>> per_object;  // [d][w]
  std::vector<double> joint;                    // W^D entries
};

PosteriorTable EnumeratePosterior(const TinyInstance& inst);

// Single-site Gibbs over w with z summed out. One iteration is a sweep over
// all objects; the first 20% of iterations are discarded as burn-in.
std::vector<std::vector<int>> CentralizedGibbs(const TinyInstance& inst,
                                               std::int64_t iterations, Rng& rng);

std::vector<double> EmpiricalJoint(std::span<const std::vector<int>> chain,
                                   int num_signs, int num_objects);

double TotalVariationDistance(std::span<const double> p, std::span<const double> q);

inline std::int64_t BurnIn(std::int64_t iterations) { return iterations / 5; }

}  // namespace cpc

#endif  // CPC_ORACLE_HPP_
