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

#ifndef CPC_METRICS_HPP_
#define CPC_METRICS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cpc {

double AdjustedRandIndex(std::span<const int> labels_a, std::span<const int> labels_b);

// Chance-corrected agreement. Returns 1 when both raters are constant and
// equal (p_e = p_o = 1).
double CohensKappa(std::span<const int> a, std::span<const int> b);

struct MetricRecord {
  std::int64_t round = 0;
  double kappa = 0.0;
  std::optional<double> ari_signs_vs_truth;
  std::vector<double> ari_z_vs_truth;  // empty without ground truth
  double free_energy_total = 0.0;

  // Mean of ari_z_vs_truth; the default adaptation target.
  std::optional<double> mean_ari_z() const;

  friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

using MetricSeries = std::vector<MetricRecord>;

// Rounds after shift_round until `metric` first reaches
// threshold * median(metric over the 10 rounds before shift_round).
// nullopt means it never recovered inside the series.
std::optional<std::int64_t> AdaptationTime(std::span<const double> metric_by_round,
                                           std::int64_t shift_round,
                                           double threshold = 0.9);

double Median(std::vector<double> values);
// Interquartile range (linear interpolation between order statistics).
double InterquartileRange(std::vector<double> values);

}  // namespace cpc

#endif  // CPC_METRICS_HPP_
