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

#ifndef CPC_SUITES_HPP_
#define CPC_SUITES_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "cpc/oracle.hpp"
#include "cpc/runner.hpp"
#include "json.hpp"

namespace cpc {

struct CriterionResult {
  std::string id;
  std::string description;
  bool passed = false;
  nlohmann::json detail;
};

struct SuiteReport {
  std::string name;
  std::vector<CriterionResult> criteria;

  bool passed() const;
  nlohmann::json ToJson() const;
};

// K=2, D=2, W=2, Z=2 with hand-set parameters; the posterior is neither
// uniform nor degenerate.
TinyInstance StandardTinyInstance();

// Runs the decentralized mh/collapsed naming game on a fixed-parameter
// instance and returns the post-burn-in sign samples (one per round).
std::vector<std::vector<int>> DecentralizedChain(const TinyInstance& inst,
                                                 std::int64_t rounds, std::uint64_t seed);

// K=2, D=100, four categories, separation/noise = 5, 200 rounds, seeds 1..10.
ExperimentConfig StandardWorldConfig();

SuiteReport RunOracleValidationSuite(const std::filesystem::path& out_dir);
SuiteReport RunBaselineComparisonSuite(const std::filesystem::path& out_dir);
SuiteReport RunPlasticitySuite(const std::filesystem::path& out_dir);

// name is one of oracle-validation, baseline-comparison, plasticity.
SuiteReport RunSuite(const std::string& name, const std::filesystem::path& out_dir);

// Windowed median of series[end - window, end).
double TrailingMedian(const std::vector<double>& series, std::size_t end, std::size_t window);

}  // namespace cpc

#endif  // CPC_SUITES_HPP_
