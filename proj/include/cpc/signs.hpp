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

#ifndef CPC_SIGNS_HPP_
#define CPC_SIGNS_HPP_

#include <cstdint>
#include <vector>

namespace cpc {

// The shared external representation: one sign per object. This is the only
// state agents exchange.
struct SignAssignment {
  std::vector<int> signs;
  std::uint64_t version = 0;

  int size() const { return static_cast<int>(signs.size()); }
  int operator[](int d) const { return signs[static_cast<std::size_t>(d)]; }

  // Writes w for object d; the version moves only when the value changes.
  void Commit(int d, int w) {
    auto& slot = signs[static_cast<std::size_t>(d)];
    if (slot != w) {
      slot = w;
      ++version;
    }
  }

  friend bool operator==(const SignAssignment&, const SignAssignment&) = default;
};

}  // namespace cpc

#endif  // CPC_SIGNS_HPP_
