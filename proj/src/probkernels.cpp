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

#include "cpc/probkernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "cpc/error.hpp"

namespace cpc {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

void GaussCatHyper::Validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      Fail(ErrorCode::kValidation,
           std::string("hyper.") + name + " must be positive and finite");
    }
  };
  positive(dirichlet_alpha, "dirichlet_alpha");
  positive(ng_kappa0, "ng_kappa0");
  positive(ng_a0, "ng_a0");
  positive(ng_b0, "ng_b0");
  if (num_signs < 1) Fail(ErrorCode::kValidation, "num_signs must be >= 1");
  if (num_categories < 1) {
    Fail(ErrorCode::kValidation, "num_categories must be >= 1");
  }
  for (double m : ng_mean0) {
    if (!std::isfinite(m)) {
      Fail(ErrorCode::kValidation, "hyper.ng_mean0 entries must be finite");
    }
  }
}

double LogGaussianDiag(std::span<const double> x, std::span<const double> mean,
                       std::span<const double> precision) {
  Require(x.size() == mean.size() && x.size() == precision.size(),
          "LogGaussianDiag: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Require(precision[i] > 0.0, "LogGaussianDiag: precision must be positive");
    const double diff = x[i] - mean[i];
    total += 0.5 * std::log(precision[i]) - 0.5 * kLogTwoPi -
             0.5 * precision[i] * diff * diff;
  }
  return total;
}

NormalGamma NormalGammaUpdate(const NormalGamma& prior,
                              std::span<const double> data) {
  if (data.empty()) return prior;
  const double n = static_cast<double>(data.size());
  const double mean = std::accumulate(data.begin(), data.end(), 0.0) / n;
  double scatter = 0.0;
  for (double x : data) scatter += (x - mean) * (x - mean);
  NormalGamma post;
  post.kappa = prior.kappa + n;
  post.mean = (prior.kappa * prior.mean + n * mean) / post.kappa;
  post.shape = prior.shape + 0.5 * n;
  post.rate = prior.rate + 0.5 * scatter +
              0.5 * prior.kappa * n * (mean - prior.mean) *
                  (mean - prior.mean) / post.kappa;
  return post;
}

double NormalGammaLogPredictive(const NormalGamma& post, double x) {
  // Student-t with 2a dof, location m, scale^2 = b (kappa + 1) / (a kappa).
  const double nu = 2.0 * post.shape;
  const double scale2 = post.rate * (post.kappa + 1.0) / (post.shape * post.kappa);
  const double z = (x - post.mean) * (x - post.mean) / scale2;
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
         0.5 * std::log(nu * std::numbers::pi * scale2) -
         0.5 * (nu + 1.0) * std::log1p(z / nu);
}

std::vector<double> DirichletPredictive(std::span<const std::int64_t> counts,
                                        double alpha) {
  Require(!counts.empty(), "DirichletPredictive: empty counts");
  Require(alpha > 0.0, "DirichletPredictive: alpha must be positive");
  double total = 0.0;
  for (auto c : counts) {
    Require(c >= 0, "DirichletPredictive: negative count");
    total += static_cast<double>(c);
  }
  const double denom = total + static_cast<double>(counts.size()) * alpha;
  std::vector<double> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out[i] = (static_cast<double>(counts[i]) + alpha) / denom;
  }
  return out;
}

double LogSumExp(std::span<const double> values) {
  Require(!values.empty(), "LogSumExp: empty input");
  if (values.size() == 1) return values[0];
  const double peak = *std::max_element(values.begin(), values.end());
  if (peak == kNegInf) return kNegInf;
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - peak);
  return peak + std::log(sum);
}

std::size_t CategoricalSample(std::span<const double> log_weights, Rng& rng) {
  Require(!log_weights.empty(), "CategoricalSample: empty weights");
  const double norm = LogSumExp(log_weights);
  Require(std::isfinite(norm),
          "CategoricalSample: no finite weight to sample from");
  const double u = rng.Uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    const double p = std::exp(log_weights[i] - norm);
    if (p > 0.0) last_positive = i;
    cumulative += p;
    if (u < cumulative) return i;
  }
  // Rounding left cumulative slightly below 1.
  return last_positive;
}

std::vector<double> NormalizeLogWeights(std::span<const double> log_weights) {
  const double norm = LogSumExp(log_weights);
  Require(std::isfinite(norm), "NormalizeLogWeights: no finite weight");
  std::vector<double> out(log_weights.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(log_weights[i] - norm);
  }
  return out;
}

double KlDivergence(std::span<const double> p, std::span<const double> q) {
  Require(p.size() == q.size(), "KlDivergence: support mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p[i] * (std::log(p[i]) - std::log(q[i]));
  }
  return kl;
}

}  // namespace cpc
