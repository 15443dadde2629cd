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

#include <cmath>
#include <numbers>
#include <vector>

#include "cpc/error.hpp"
#include "cpc/oracle.hpp"
#include "cpc/suites.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cpc;
using cpc::testing::HandAgent;
using cpc::testing::OneDim;

namespace {

TinyInstance Make(std::vector<AgentState> agents, std::vector<AgentObservations> views) {
  TinyInstance inst;
  inst.agents = std::move(agents);
  for (const auto& v : views) inst.obs.contexts.emplace_back(v.num_objects(), 0);
  inst.obs.agents = std::move(views);
  return inst;
}

TinyInstance Symmetric() {
  // Swapping the two signs maps each agent's association matrix to itself.
  return Make({HandAgent(0, 2, {{0.0, 1.0}, {1.0, 1.0}}, {3, 1, 3, 1}, 2),
               HandAgent(1, 2, {{0.0, 1.0}, {1.0, 1.0}}, {2, 2, 2, 2}, 2)},
              {OneDim({0.2, 0.9}), OneDim({-0.3, 0.5})});
}

double Density(double x, const Emission& e) {
  return std::sqrt(e.precision[0] / (2.0 * std::numbers::pi)) *
         std::exp(-0.5 * e.precision[0] * std::pow(x - e.mean[0], 2));
}

// Brute force: sums over every joint (w, z) configuration, no factorization.
std::vector<double> BruteForceJoint(const TinyInstance& inst) {
  const int W = inst.num_signs(), D = inst.num_objects(), K = static_cast<int>(inst.agents.size());
  const int Z = inst.agents[0].num_categories();
  int wcells = 1, zcells = 1;
  for (int d = 0; d < D; ++d) wcells *= W;
  for (int i = 0; i < D * K; ++i) zcells *= Z;
  std::vector<double> joint(wcells, 0.0);
  for (int wi = 0; wi < wcells; ++wi) {
    std::vector<int> w(D);
    for (int d = 0, r = wi; d < D; ++d, r /= W) w[d] = r % W;
    for (int zi = 0; zi < zcells; ++zi) {
      double p = 1.0;
      for (int i = 0, r = zi; i < D * K; ++i, r /= Z) {
        const int k = i / D, d = i % D, z = r % Z;
        const AgentState& a = inst.agents[k];
        const auto row = a.association_row(w[d]);
        double n = 0.0;
        for (auto c : row) n += static_cast<double>(c);
        const double phi = (row[z] + a.hyper.dirichlet_alpha) / (n + Z * a.hyper.dirichlet_alpha);
        p *= phi * Density(inst.obs.agents[k].row(d)[0], a.emissions[z]);
      }
      joint[wi] += p;
    }
  }
  double total = 0.0;
  for (double v : joint) total += v;
  for (double& v : joint) v /= total;
  return joint;
}

}  // namespace

TEST_CASE("enumerate_posterior") {
  SUBCASE("symmetric instance is uniform") {
    const PosteriorTable t = EnumeratePosterior(Symmetric());
    for (const auto& p : t.per_object) {
      CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
      CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
    }
  }
  SUBCASE("overwhelming evidence for sign 0 on object 0") {
    // Sign 0 pins category 0 and sign 1 pins category 1; both agents see object
    // 0 right on category 0's sharp mean, far from category 1.
    const std::vector<std::pair<double, double>> theta{{0.0, 4.0}, {6.0, 4.0}};
    const TinyInstance inst =
        Make({HandAgent(0, 2, theta, {200, 0, 0, 200}, 2), HandAgent(1, 2, theta, {200, 0, 0, 200}, 2)},
             {OneDim({0.0, 3.0}), OneDim({0.0, 2.5})});
    CHECK(EnumeratePosterior(inst).per_object[0][0] > 0.99);
  }
  SUBCASE("joint is the product of per-object tables") {
    const TinyInstance inst = StandardTinyInstance();
    const PosteriorTable t = EnumeratePosterior(inst);
    double total = 0.0;
    for (int w0 = 0; w0 < 2; ++w0) {
      for (int w1 = 0; w1 < 2; ++w1) {
        const std::vector<int> w{w0, w1};
        CHECK(std::abs(t.joint[JointIndex(w, 2)] - t.per_object[0][w0] * t.per_object[1][w1]) <= 1e-12);
        total += t.joint[JointIndex(w, 2)];
      }
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
  SUBCASE("matches a brute-force sum over all latent categories") {
    const TinyInstance three = Make(
        {HandAgent(0, 3, {{0.0, 1.0}, {2.0, 0.5}}, {4, 1, 0, 2, 3, 3}, 3),
         HandAgent(1, 3, {{1.0, 2.0}, {-1.0, 1.0}}, {0, 5, 2, 2, 1, 0}, 3),
         HandAgent(2, 3, {{0.5, 1.0}, {0.0, 3.0}}, {1, 1, 6, 0, 0, 4}, 3)},
        {OneDim({0.1, 1.7, -0.4}), OneDim({0.9, -1.2, 0.3}), OneDim({0.4, 0.0, 0.2})});
    for (const TinyInstance& inst : {StandardTinyInstance(), three}) {
      const auto brute = BruteForceJoint(inst);
      const auto exact = EnumeratePosterior(inst).joint;
      REQUIRE(brute.size() == exact.size());
      for (std::size_t i = 0; i < exact.size(); ++i) CHECK(std::abs(brute[i] - exact[i]) <= 1e-12);
    }
  }
  SUBCASE("bounds") {
    const auto big = HandAgent(0, 2, {{0.0, 1.0}}, {0, 0}, 5);
    TinyInstance inst = Make({big, big}, {OneDim({0, 0, 0, 0, 0}), OneDim({0, 0, 0, 0, 0})});
    CHECK_THROWS_AS(EnumeratePosterior(inst), Error);
    const auto wide = HandAgent(0, 5, {{0.0, 1.0}}, {0, 0, 0, 0, 0}, 1);
    CHECK_THROWS_AS(EnumeratePosterior(Make({wide, wide}, {OneDim({0}), OneDim({0})})), Error);
    const auto a = HandAgent(0, 2, {{0.0, 1.0}}, {0, 0}, 1);
    CHECK_THROWS_AS(EnumeratePosterior(Make({a, a, a, a}, {OneDim({0}), OneDim({0}), OneDim({0}), OneDim({0})})),
                    Error);
  }
}

TEST_CASE("centralized_gibbs") {
  SUBCASE("symmetric instance") {
    Rng rng(1);
    const auto chain = CentralizedGibbs(Symmetric(), 50000, rng);
    CHECK(chain.size() == 40000u);
    const auto emp = EmpiricalJoint(chain, 2, 2);
    const double sigma = std::sqrt(0.25 * 0.75 / chain.size());
    for (double p : emp) CHECK(std::abs(p - 0.25) <= 3.0 * sigma);
  }
  SUBCASE("matches enumeration at 1e5 samples") {
    const TinyInstance inst = StandardTinyInstance();
    Rng rng(2);
    const auto chain = CentralizedGibbs(inst, 125000, rng);
    CHECK(chain.size() == 100000u);
    CHECK(TotalVariationDistance(EmpiricalJoint(chain, 2, 2), EnumeratePosterior(inst).joint) <= 0.02);
  }
  SUBCASE("seed determinism") {
    Rng a(3), b(3);
    CHECK(CentralizedGibbs(StandardTinyInstance(), 1000, a) ==
          CentralizedGibbs(StandardTinyInstance(), 1000, b));
  }
  SUBCASE("error shrinks with chain length") {
    const TinyInstance inst = StandardTinyInstance();
    const auto exact = EnumeratePosterior(inst).joint;
    std::vector<double> tv;
    for (std::int64_t n : {500, 5000, 50000}) {
      // Average over a few seeds to keep the trend check stable.
      double sum = 0.0;
      for (std::uint64_t seed = 10; seed < 15; ++seed) {
        Rng rng(seed);
        sum += TotalVariationDistance(EmpiricalJoint(CentralizedGibbs(inst, n, rng), 2, 2), exact);
      }
      tv.push_back(sum / 5);
    }
    CHECK(tv[1] < tv[0]);
    CHECK(tv[2] < tv[1]);
  }
}

TEST_CASE("decentralized and centralized chains agree") {
  const TinyInstance inst = StandardTinyInstance();
  Rng rng(4);
  const auto central = EmpiricalJoint(CentralizedGibbs(inst, 62500, rng), 2, 2);
  const auto decentral = EmpiricalJoint(DecentralizedChain(inst, 62500, 5), 2, 2);
  CHECK(TotalVariationDistance(central, decentral) <= 0.05);
}

TEST_CASE("total_variation_distance") {
  const std::vector<double> p{0.6, 0.4}, q{0.5, 0.5}, a{1.0, 0.0}, b{0.0, 1.0};
  CHECK(TotalVariationDistance(p, p) == 0.0);
  CHECK(TotalVariationDistance(a, b) == 1.0);
  CHECK(TotalVariationDistance(p, q) == doctest::Approx(0.1));
  CHECK_THROWS_AS(TotalVariationDistance(p, std::vector<double>{1.0}), Error);
  CHECK_THROWS_AS(TotalVariationDistance(p, std::vector<double>{0.5, 0.4}), Error);
}

TEST_CASE("joint index and burn-in") {
  CHECK(JointIndex(std::vector<int>{1, 0, 2}, 3) == 19u);
  CHECK(JointIndex(std::vector<int>{0, 1, 2}, 3) == 3u + 18u);
  CHECK(BurnIn(62500) == 12500);
}
