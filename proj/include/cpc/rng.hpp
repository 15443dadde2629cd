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

#ifndef CPC_RNG_HPP_
#define CPC_RNG_HPP_

#include <cstdint>
#include <random>
#include <string>

namespace cpc {

// Seeded generator with platform-independent draws. Only the raw 64-bit
// engine output is used; the std distributions are avoided because their
// algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits. One engine draw.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal by Box-Muller. Two engine draws, no cached spare.
  double Normal();

  // Uniform integer in [0, n). One engine draw.
  std::uint64_t Below(std::uint64_t n);

  std::string SaveState() const;
  void LoadState(const std::string& state);

  friend bool operator==(const Rng& a, const Rng& b) {
    return a.engine_ == b.engine_;
  }

 private:
  std::mt19937_64 engine_;
};

// Counter-based stream derivation: splitmix64 finalizer applied to
// root ^ splitmix64(stream + 1). Distinct streams of one root never collide
// in practice and the mapping is stable across platforms.
std::uint64_t DeriveSeed(std::uint64_t root, std::uint64_t stream);

// Stream ids used by the runner.
inline constexpr std::uint64_t kWorldStream = 0;
inline constexpr std::uint64_t kProtocolStream = 1;
inline constexpr std::uint64_t kAgentStreamBase = 16;

}  // namespace cpc

#endif  // CPC_RNG_HPP_
