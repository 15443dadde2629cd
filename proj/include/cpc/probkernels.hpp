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

#ifndef CPC_PROBKERNELS_HPP_
#define CPC_PROBKERNELS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "cpc/rng.hpp"

namespace cpc {

// Hyperparameters shared by every agent: symmetric Dirichlet concentration
// for p(w) and for each row of the sign-to-category association, and a
// per-feature Normal-Gamma prior for the emission model.
struct GaussCatHyper {
  double dirichlet_alpha = 1.0;
  // Prior mean per feature. Empty means the mean of the agent's current
  // observations, recomputed at every parameter update.
  std::vector<double> ng_mean0;
  double ng_kappa0 = 0.01;
  double ng_a0 = 1.0;
  double ng_b0 = 1.0;
  int num_signs = 1;
  int num_categories = 1;

  void Validate() const;
  friend bool operator==(const GaussCatHyper&, const GaussCatHyper&) = default;
};

// Sum over features of the log density of independent normals with the
// given precisions.
double LogGaussianDiag(std::span<const double> x, std::span<const double> mean,
                       std::span<const double> precision);

// Normal-Gamma parameters for a single scalar feature.
struct NormalGamma {
  double mean;
  double kappa;
  double shape;
  double rate;

  friend bool operator==(const NormalGamma&, const NormalGamma&) = default;
};

// Conjugate update; empty data returns the prior unchanged.
NormalGamma NormalGammaUpdate(const NormalGamma& prior,
                              std::span<const double> data);

// Log density of the Student-t posterior predictive of a Normal-Gamma.
double NormalGammaLogPredictive(const NormalGamma& posterior, double x);

// (counts_i + alpha) / (sum counts + n * alpha).
std::vector<double> DirichletPredictive(std::span<const std::int64_t> counts,
                                        double alpha);

double LogSumExp(std::span<const double> values);

// Draws index i with probability proportional to exp(log_weights[i]).
// Consumes exactly one draw from rng.
std::size_t CategoricalSample(std::span<const double> log_weights, Rng& rng);

// Normalized probabilities from log weights (softmax).
std::vector<double> NormalizeLogWeights(std::span<const double> log_weights);

// KL[p || q] in nats over a finite support; terms with p_i = 0 contribute 0.
double KlDivergence(std::span<const double> p, std::span<const double> q);

}  // namespace cpc

#endif  // CPC_PROBKERNELS_HPP_
