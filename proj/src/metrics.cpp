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

#include "cpc/metrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "cpc/error.hpp"

namespace cpc {

namespace {

double Choose2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

double AdjustedRandIndex(std::span<const int> labels_a, std::span<const int> labels_b) {
  Require(labels_a.size() == labels_b.size(), "AdjustedRandIndex: length mismatch");
  Require(labels_a.size() >= 2, "AdjustedRandIndex: need at least two items");
  std::map<std::pair<int, int>, double> cells;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    cells[{labels_a[i], labels_b[i]}] += 1.0;
    rows[labels_a[i]] += 1.0;
    cols[labels_b[i]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [key, n] : cells) index += Choose2(n);
  double sum_rows = 0.0;
  for (const auto& [key, n] : rows) sum_rows += Choose2(n);
  double sum_cols = 0.0;
  for (const auto& [key, n] : cols) sum_cols += Choose2(n);
  const double total = Choose2(static_cast<double>(labels_a.size()));
  const double expected = sum_rows * sum_cols / total;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  // Both partitions trivial in the same way (all singletons or one block).
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

double CohensKappa(std::span<const int> a, std::span<const int> b) {
  Require(a.size() == b.size(), "CohensKappa: length mismatch");
  Require(a.size() >= 2, "CohensKappa: need at least two items");
  const double n = static_cast<double>(a.size());
  std::map<int, double> freq_a;
  std::map<int, double> freq_b;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    freq_a[a[i]] += 1.0;
    freq_b[b[i]] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  const double p_o = agree / n;
  double p_e = 0.0;
  for (const auto& [label, count] : freq_a) {
    auto it = freq_b.find(label);
    if (it != freq_b.end()) p_e += (count / n) * (it->second / n);
  }
  if (p_e >= 1.0) return 1.0;
  return (p_o - p_e) / (1.0 - p_e);
}

std::optional<double> MetricRecord::mean_ari_z() const {
  if (ari_z_vs_truth.empty()) return std::nullopt;
  return std::accumulate(ari_z_vs_truth.begin(), ari_z_vs_truth.end(), 0.0) /
         static_cast<double>(ari_z_vs_truth.size());
}

double Median(std::vector<double> values) {
  Require(!values.empty(), "Median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

double Quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double InterquartileRange(std::vector<double> values) {
  Require(!values.empty(), "InterquartileRange: empty input");
  std::sort(values.begin(), values.end());
  return Quantile(values, 0.75) - Quantile(values, 0.25);
}

std::optional<std::int64_t> AdaptationTime(std::span<const double> metric_by_round,
                                           std::int64_t shift_round,
                                           double threshold) {
  const auto n = static_cast<std::int64_t>(metric_by_round.size());
  Require(shift_round >= 0 && shift_round < n,
          "AdaptationTime: shift round outside the series");
  const std::int64_t window_start = std::max<std::int64_t>(0, shift_round - 10);
  Require(shift_round - window_start >= 1,
          "AdaptationTime: empty pre-shift window");
  const double baseline = Median(std::vector<double>(
      metric_by_round.begin() + window_start, metric_by_round.begin() + shift_round));
  const double target = threshold * baseline;
  for (std::int64_t r = shift_round; r < n; ++r) {
    if (metric_by_round[static_cast<std::size_t>(r)] >= target) return r - shift_round;
  }
  return std::nullopt;
}

}  // namespace cpc
