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

#ifndef CPC_TESTS_HELPERS_HPP_
#define CPC_TESTS_HELPERS_HPP_

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cpc/agent.hpp"
#include "cpc/world.hpp"

namespace cpc::testing {

// Fresh scratch directory under the system temp dir; removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("cpc-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string ReadAll(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteAll(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

// Hand-built agent with 1-D features; emissions as (mean, precision) pairs and
// the association matrix as W x Z counts.
inline AgentState HandAgent(int id, int num_signs, const std::vector<std::pair<double, double>>& theta,
                            const std::vector<std::int64_t>& counts, int num_objects,
                            double alpha = 1.0) {
  AgentState a;
  a.id = id;
  a.hyper.num_signs = num_signs;
  a.hyper.num_categories = static_cast<int>(theta.size());
  a.hyper.dirichlet_alpha = alpha;
  a.hyper.ng_mean0 = {0.0};
  for (const auto& [m, p] : theta) a.emissions.push_back({{m}, {p}});
  a.association = counts;
  a.assignments.assign(static_cast<std::size_t>(num_objects), 0);
  a.Validate();
  return a;
}

inline AgentObservations OneDim(const std::vector<double>& values) { return {1, values}; }

inline double Sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace cpc::testing

#endif  // CPC_TESTS_HELPERS_HPP_
