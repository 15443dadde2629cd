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

#ifndef CPC_WORLD_HPP_
#define CPC_WORLD_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cpc {

enum class ShiftKind { kTranslate, kPermute };

const char* ShiftKindName(ShiftKind kind);
ShiftKind ParseShiftKind(const std::string& name);

// A single scheduled environment change.
//  translate: every category mean of every agent moves by magnitude along a
//             per-agent unit vector drawn from the world seed.
//  permute:   object d's true category c becomes (c + round(magnitude)) mod C.
struct ShiftSpec {
  std::int64_t round = 0;
  ShiftKind kind = ShiftKind::kTranslate;
  double magnitude = 0.0;

  friend bool operator==(const ShiftSpec&, const ShiftSpec&) = default;
};

struct WorldConfig {
  int num_objects = 100;
  int num_true_categories = 4;
  int num_agents = 2;
  int feature_dim = 2;
  // 1 keeps every context at zero. V > 1 gives each agent one of V
  // viewpoints, each with its own set of category means.
  int num_viewpoints = 1;
  double category_separation = 5.0;
  double noise_scale = 1.0;
  std::optional<ShiftSpec> shift;
  std::uint64_t seed = 0;

  void Validate() const;
  friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

// One agent's private view: num_objects rows of `dim` features.
struct AgentObservations {
  int dim = 0;
  std::vector<double> values;

  std::span<const double> row(int d) const {
    return {values.data() + static_cast<std::size_t>(d) * dim,
            static_cast<std::size_t>(dim)};
  }
  int num_objects() const {
    return dim == 0 ? 0 : static_cast<int>(values.size()) / dim;
  }
  friend bool operator==(const AgentObservations&,
                         const AgentObservations&) = default;
};

struct ObservationSet {
  std::vector<AgentObservations> agents;
  // contexts[k][d]: fixed observation context of agent k for object d.
  std::vector<std::vector<int>> contexts;
  // Hidden from agents; absent for files without a label column.
  std::optional<std::vector<int>> ground_truth;

  int num_agents() const { return static_cast<int>(agents.size()); }
  int num_objects() const {
    return agents.empty() ? 0 : agents.front().num_objects();
  }
  void Validate() const;
  friend bool operator==(const ObservationSet&, const ObservationSet&) = default;
};

ObservationSet GenerateWorld(const WorldConfig& config);

// Regenerates `obs` under config.shift using the original noise stream.
// Throws kInvalidArgument when the config carries no shift.
ObservationSet ApplyShift(const ObservationSet& obs, const WorldConfig& config);

// Delimiter-separated text, header required:
//   agent_id,object_id,context,f_1,...,f_M[,true_label]
ObservationSet LoadObservations(const std::filesystem::path& path);
void SaveObservations(const ObservationSet& obs,
                      const std::filesystem::path& path);

}  // namespace cpc

#endif  // CPC_WORLD_HPP_
