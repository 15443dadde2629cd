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

#ifndef CPC_TESTS_INVARIANTS_HPP_
#define CPC_TESTS_INVARIANTS_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "cpc/probkernels.hpp"

namespace cpc::testing {

struct InvariantCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Brute-force posterior predictive of a 1-D Normal-Gamma model: prior times
// likelihood integrated on a (mean, log-precision) grid, evaluated on xs and
// normalized over xs.
std::vector<double> GridPredictive(const NormalGamma& prior, const std::vector<double>& data,
                                   const std::vector<double>& xs);

InvariantCheck CheckAcceptanceScaleInvariance();
InvariantCheck CheckIdentityProposal();
InvariantCheck CheckNeverAcceptImmutability();
InvariantCheck CheckTranscriptReplay(const std::filesystem::path& scratch);
InvariantCheck CheckPublicChannelPurity(const std::filesystem::path& scratch);
InvariantCheck CheckKlNonnegativity();
InvariantCheck CheckNormalizations();
InvariantCheck CheckNormalGammaGridOracle();
InvariantCheck CheckRelabelingInvariance();
InvariantCheck CheckNullCalibration();
InvariantCheck CheckSeedDeterminism(const std::filesystem::path& scratch);
InvariantCheck CheckCheckpointResume(const std::filesystem::path& scratch);

std::vector<InvariantCheck> RunAllInvariantChecks(const std::filesystem::path& scratch);

}  // namespace cpc::testing

#endif  // CPC_TESTS_INVARIANTS_HPP_
