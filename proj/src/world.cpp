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

#include "cpc/world.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>

#include "cpc/error.hpp"
#include "cpc/rng.hpp"

namespace cpc {

const char* ShiftKindName(ShiftKind kind) {
  return kind == ShiftKind::kTranslate ? "translate" : "permute";
}

ShiftKind ParseShiftKind(const std::string& name) {
  if (name == "translate") return ShiftKind::kTranslate;
  if (name == "permute") return ShiftKind::kPermute;
  Fail(ErrorCode::kValidation, "unknown shift kind '" + name + "'");
}

void WorldConfig::Validate() const {
  if (num_true_categories < 1) {
    Fail(ErrorCode::kValidation, "world.num_true_categories must be >= 1");
  }
  if (num_objects < num_true_categories) {
    Fail(ErrorCode::kValidation,
         "world.num_objects must be >= world.num_true_categories");
  }
  if (num_agents < 2) Fail(ErrorCode::kValidation, "world.num_agents must be >= 2");
  if (feature_dim < 1) Fail(ErrorCode::kValidation, "world.feature_dim must be >= 1");
  if (num_viewpoints < 1) {
    Fail(ErrorCode::kValidation, "world.num_viewpoints must be >= 1");
  }
  if (!(category_separation > 0.0) || !std::isfinite(category_separation)) {
    Fail(ErrorCode::kValidation, "world.category_separation must be positive");
  }
  if (!(noise_scale > 0.0) || !std::isfinite(noise_scale)) {
    Fail(ErrorCode::kValidation, "world.noise_scale must be positive");
  }
  if (shift && !std::isfinite(shift->magnitude)) {
    Fail(ErrorCode::kValidation, "world.shift.magnitude must be finite");
  }
}

void ObservationSet::Validate() const {
  if (agents.empty()) Fail(ErrorCode::kValidation, "observation set has no agents");
  const int d_count = num_objects();
  if (contexts.size() != agents.size()) {
    Fail(ErrorCode::kValidation, "contexts must have one row per agent");
  }
  for (std::size_t k = 0; k < agents.size(); ++k) {
    const auto& a = agents[k];
    if (a.dim < 1 || a.values.size() % a.dim != 0 ||
        a.num_objects() != d_count) {
      Fail(ErrorCode::kValidation,
           "agent " + std::to_string(k) + " has inconsistent feature dimension");
    }
    for (double v : a.values) {
      if (!std::isfinite(v)) {
        Fail(ErrorCode::kValidation,
             "agent " + std::to_string(k) + " has a non-finite feature value");
      }
    }
    if (static_cast<int>(contexts[k].size()) != d_count) {
      Fail(ErrorCode::kValidation, "context row length mismatch");
    }
  }
  if (ground_truth) {
    if (static_cast<int>(ground_truth->size()) != d_count) {
      Fail(ErrorCode::kValidation, "ground truth length mismatch");
    }
    for (int label : *ground_truth) {
      if (label < 0) Fail(ErrorCode::kValidation, "ground truth labels must be >= 0");
    }
  }
}

namespace {

// Everything random about a world, drawn once from the seed so that a shift
// can re-render observations with the same noise realization.
struct WorldDraw {
  // means[k][v][c] -> feature vector
  std::vector<std::vector<std::vector<std::vector<double>>>> means;
  std::vector<int> viewpoint;                    // per agent
  std::vector<int> labels;                       // per object
  std::vector<std::vector<double>> noise;        // [k] -> D * M
  std::vector<std::vector<double>> direction;    // [k] -> unit vector
};

WorldDraw DrawWorld(const WorldConfig& cfg) {
  const int K = cfg.num_agents;
  const int D = cfg.num_objects;
  const int C = cfg.num_true_categories;
  const int M = cfg.feature_dim;
  Rng mean_rng(DeriveSeed(cfg.seed, 1));
  Rng label_rng(DeriveSeed(cfg.seed, 2));
  Rng noise_rng(DeriveSeed(cfg.seed, 3));
  Rng direction_rng(DeriveSeed(cfg.seed, 4));
  Rng viewpoint_rng(DeriveSeed(cfg.seed, 5));

  // Category means sit on an integer grid with spacing equal to the
  // separation, so the closest pair of means is exactly that far apart.
  int side = 1;
  while (std::pow(static_cast<double>(side), M) < C) ++side;

  WorldDraw draw;
  draw.means.resize(K);
  for (int k = 0; k < K; ++k) {
    draw.means[k].resize(cfg.num_viewpoints);
    for (int v = 0; v < cfg.num_viewpoints; ++v) {
      std::vector<int> slots(C);
      std::iota(slots.begin(), slots.end(), 0);
      for (int i = C - 1; i > 0; --i) {
        std::swap(slots[i], slots[mean_rng.Below(i + 1)]);
      }
      std::vector<double> origin(M);
      for (double& x : origin) x = cfg.category_separation * mean_rng.Normal();
      auto& set = draw.means[k][v];
      set.resize(C);
      for (int c = 0; c < C; ++c) {
        int slot = slots[c];
        set[c].resize(M);
        for (int i = 0; i < M; ++i) {
          set[c][i] = origin[i] + cfg.category_separation * (slot % side);
          slot /= side;
        }
      }
    }
  }

  draw.viewpoint.resize(K, 0);
  if (cfg.num_viewpoints > 1) {
    for (int k = 0; k < K; ++k) {
      draw.viewpoint[k] = static_cast<int>(viewpoint_rng.Below(cfg.num_viewpoints));
    }
  }

  draw.labels.resize(D);
  for (int d = 0; d < D; ++d) draw.labels[d] = d % C;
  for (int i = D - 1; i > 0; --i) {
    std::swap(draw.labels[i], draw.labels[label_rng.Below(i + 1)]);
  }

  draw.noise.resize(K);
  for (int k = 0; k < K; ++k) {
    draw.noise[k].resize(static_cast<std::size_t>(D) * M);
    for (double& x : draw.noise[k]) x = cfg.noise_scale * noise_rng.Normal();
  }

  draw.direction.resize(K);
  for (int k = 0; k < K; ++k) {
    auto& dir = draw.direction[k];
    dir.resize(M);
    double norm = 0.0;
    while (norm < 1e-12) {
      norm = 0.0;
      for (double& x : dir) {
        x = direction_rng.Normal();
        norm += x * x;
      }
      norm = std::sqrt(norm);
    }
    for (double& x : dir) x /= norm;
  }
  return draw;
}

ObservationSet Render(const WorldConfig& cfg, const WorldDraw& draw,
                      const std::vector<int>& labels, double translate) {
  const int K = cfg.num_agents;
  const int D = cfg.num_objects;
  const int M = cfg.feature_dim;
  ObservationSet obs;
  obs.agents.resize(K);
  obs.contexts.assign(K, std::vector<int>(D, 0));
  for (int k = 0; k < K; ++k) {
    auto& a = obs.agents[k];
    a.dim = M;
    a.values.resize(static_cast<std::size_t>(D) * M);
    const auto& set = draw.means[k][draw.viewpoint[k]];
    for (int d = 0; d < D; ++d) {
      obs.contexts[k][d] = draw.viewpoint[k];
      for (int i = 0; i < M; ++i) {
        double value = set[labels[d]][i];
        if (translate != 0.0) value += translate * draw.direction[k][i];
        const std::size_t at = static_cast<std::size_t>(d) * M + i;
        a.values[at] = value + draw.noise[k][at];
      }
    }
  }
  obs.ground_truth = labels;
  return obs;
}

}  // namespace

ObservationSet GenerateWorld(const WorldConfig& config) {
  config.Validate();
  const WorldDraw draw = DrawWorld(config);
  return Render(config, draw, draw.labels, 0.0);
}

ObservationSet ApplyShift(const ObservationSet& obs, const WorldConfig& config) {
  Require(config.shift.has_value(), "ApplyShift: config has no shift spec");
  config.Validate();
  Require(obs.num_agents() == config.num_agents &&
              obs.num_objects() == config.num_objects,
          "ApplyShift: observation set does not match the world config");
  Require(obs.ground_truth.has_value(),
          "ApplyShift: observation set has no ground truth");
  const WorldDraw draw = DrawWorld(config);
  const ShiftSpec& shift = *config.shift;
  if (shift.kind == ShiftKind::kTranslate) {
    return Render(config, draw, *obs.ground_truth, shift.magnitude);
  }
  const int C = config.num_true_categories;
  const long step = std::lround(shift.magnitude);
  const int offset = static_cast<int>(((step % C) + C) % C);
  std::vector<int> labels = *obs.ground_truth;
  for (int& c : labels) c = (c + offset) % C;
  return Render(config, draw, labels, 0.0);
}

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> Split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(Trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void ParseFail(const std::filesystem::path& path, int line,
                            const std::string& what) {
  Fail(ErrorCode::kParse,
       path.string() + ": line " + std::to_string(line) + ": " + what);
}

template <typename T>
bool ParseNumber(std::string_view field, T& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && field.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

}  // namespace

ObservationSet LoadObservations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open observation file " + path.string());

  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) ParseFail(path, 1, "missing header row");
  ++line_no;
  const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
  const auto header = Split(line, delim);
  if (header.size() < 4 || header[0] != "agent_id" || header[1] != "object_id" ||
      header[2] != "context") {
    ParseFail(path, line_no,
              "header must start with agent_id,object_id,context,f_1");
  }
  const bool has_label = header.back() == "true_label";
  const int dim = static_cast<int>(header.size()) - 3 - (has_label ? 1 : 0);
  if (dim < 1) ParseFail(path, line_no, "header lists no feature columns");

  struct Row {
    int context;
    std::vector<double> features;
    int label;
    int line;
  };
  std::map<std::pair<int, int>, Row> rows;
  int max_agent = -1;
  int max_object = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto fields = Split(line, delim);
    if (fields.size() != header.size()) {
      // A short or long row is a feature-dimension inconsistency.
      Fail(ErrorCode::kValidation,
           path.string() + ": line " + std::to_string(line_no) + ": expected " +
               std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    int agent = 0, object = 0, context = 0;
    if (!ParseNumber(fields[0], agent) || agent < 0) {
      ParseFail(path, line_no, "bad agent_id '" + std::string(fields[0]) + "'");
    }
    if (!ParseNumber(fields[1], object) || object < 0) {
      ParseFail(path, line_no, "bad object_id '" + std::string(fields[1]) + "'");
    }
    if (!ParseNumber(fields[2], context) || context < 0) {
      ParseFail(path, line_no, "bad context '" + std::string(fields[2]) + "'");
    }
    Row row{context, std::vector<double>(dim), -1, line_no};
    for (int i = 0; i < dim; ++i) {
      if (!ParseNumber(fields[3 + i], row.features[i]) ||
          !std::isfinite(row.features[i])) {
        ParseFail(path, line_no,
                  "bad feature f_" + std::to_string(i + 1) + " '" +
                      std::string(fields[3 + i]) + "'");
      }
    }
    if (has_label && (!ParseNumber(fields.back(), row.label) || row.label < 0)) {
      ParseFail(path, line_no,
                "bad true_label '" + std::string(fields.back()) + "'");
    }
    if (!rows.emplace(std::make_pair(agent, object), std::move(row)).second) {
      Fail(ErrorCode::kValidation,
           path.string() + ": line " + std::to_string(line_no) +
               ": duplicate row for agent " + std::to_string(agent) +
               ", object " + std::to_string(object));
    }
    max_agent = std::max(max_agent, agent);
    max_object = std::max(max_object, object);
  }
  if (rows.empty()) Fail(ErrorCode::kValidation, path.string() + ": no data rows");

  const int K = max_agent + 1;
  const int D = max_object + 1;
  ObservationSet obs;
  obs.agents.resize(K);
  obs.contexts.assign(K, std::vector<int>(D, 0));
  if (has_label) obs.ground_truth.emplace(D, -1);
  for (int k = 0; k < K; ++k) {
    obs.agents[k].dim = dim;
    obs.agents[k].values.resize(static_cast<std::size_t>(D) * dim);
    for (int d = 0; d < D; ++d) {
      auto it = rows.find({k, d});
      if (it == rows.end()) {
        Fail(ErrorCode::kValidation,
             path.string() + ": missing row for agent " + std::to_string(k) +
                 ", object " + std::to_string(d));
      }
      const Row& row = it->second;
      obs.contexts[k][d] = row.context;
      std::copy(row.features.begin(), row.features.end(),
                obs.agents[k].values.begin() + static_cast<std::ptrdiff_t>(d) * dim);
      if (has_label) {
        int& label = (*obs.ground_truth)[d];
        if (label >= 0 && label != row.label) {
          Fail(ErrorCode::kValidation,
               path.string() + ": line " + std::to_string(row.line) +
                   ": true_label disagrees with another agent's row for object " +
                   std::to_string(d));
        }
        label = row.label;
      }
    }
  }
  obs.Validate();
  return obs;
}

namespace {

void AppendDouble(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

void SaveObservations(const ObservationSet& obs,
                      const std::filesystem::path& path) {
  obs.Validate();
  const int dim = obs.agents.front().dim;
  for (const auto& a : obs.agents) {
    Require(a.dim == dim,
            "SaveObservations: file format needs one feature dimension");
  }
  std::string text = "agent_id,object_id,context";
  for (int i = 0; i < dim; ++i) text += ",f_" + std::to_string(i + 1);
  if (obs.ground_truth) text += ",true_label";
  text += '\n';
  for (int k = 0; k < obs.num_agents(); ++k) {
    for (int d = 0; d < obs.num_objects(); ++d) {
      text += std::to_string(k) + ',' + std::to_string(d) + ',' +
              std::to_string(obs.contexts[k][d]);
      for (double v : obs.agents[k].row(d)) {
        text += ',';
        AppendDouble(text, v);
      }
      if (obs.ground_truth) text += ',' + std::to_string((*obs.ground_truth)[d]);
      text += '\n';
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write observation file " + path.string());
  out << text;
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace cpc
