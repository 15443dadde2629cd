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

#include "cpc/suites.hpp"

#include <chrono>
#include <limits>

#include "cpc/error.hpp"
#include "cpc/protocol.hpp"

namespace cpc {

using nlohmann::json;
namespace fs = std::filesystem;

bool SuiteReport::passed() const {
  for (const auto& c : criteria) {
    if (!c.passed) return false;
  }
  return true;
}

json SuiteReport::ToJson() const {
  json items = json::array();
  for (const auto& c : criteria) {
    items.push_back({{"id", c.id},
                     {"description", c.description},
                     {"passed", c.passed},
                     {"detail", c.detail}});
  }
  return {{"suite", name}, {"passed", passed()}, {"criteria", items}};
}

namespace {

AgentState FixedAgent(int id, const std::vector<Emission>& emissions,
                      const std::vector<std::int64_t>& counts) {
  AgentState a;
  a.id = id;
  a.hyper.num_signs = 2;
  a.hyper.num_categories = 2;
  a.hyper.ng_mean0 = {0.0};
  a.assignments = {0, 0};
  a.emissions = emissions;
  a.association = counts;
  a.frozen_language = false;
  a.Validate();
  return a;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::vector<double> FinalValues(const ExperimentResult& result,
                                std::optional<double> (*pick)(const MetricRecord&)) {
  std::vector<double> out;
  for (const auto& s : result.seeds) {
    if (!s.ok || s.metrics.empty()) continue;
    if (auto v = pick(s.metrics.back())) out.push_back(*v);
  }
  return out;
}

std::vector<double> Totals(const SeedOutcome& s) {
  std::vector<double> out;
  for (const auto& r : s.free_energy) out.push_back(r.total);
  return out;
}

json FailedSeeds(const ExperimentResult& result) {
  json out = json::array();
  for (const auto& s : result.seeds) {
    if (!s.ok) out.push_back({{"seed", s.seed}, {"error", s.error_message}});
  }
  return out;
}

}  // namespace

TinyInstance StandardTinyInstance() {
  TinyInstance inst;
  inst.agents.push_back(FixedAgent(0, {{{0.0}, {1.0}}, {{2.0}, {1.0}}}, {6, 2, 1, 5}));
  inst.agents.push_back(FixedAgent(1, {{{1.0}, {2.0}}, {{-1.0}, {2.0}}}, {3, 1, 2, 4}));
  inst.obs.agents = {{1, {0.3, 1.6}}, {1, {0.2, -0.4}}};
  inst.obs.contexts = {{0, 0}, {0, 0}};
  inst.obs.Validate();
  inst.CheckBounds();
  return inst;
}

std::vector<std::vector<int>> DecentralizedChain(const TinyInstance& inst,
                                                 std::int64_t rounds, std::uint64_t seed) {
  inst.CheckBounds();
  Require(rounds >= 1, "DecentralizedChain: rounds must be >= 1");
  std::vector<Rng> agent_rngs;
  for (std::size_t k = 0; k < inst.agents.size(); ++k) {
    agent_rngs.emplace_back(DeriveSeed(seed, kAgentStreamBase + k));
  }
  Rng protocol_rng(DeriveSeed(seed, kProtocolStream));
  SignAssignment signs{std::vector<int>(inst.num_objects(), 0), 0};
  const std::int64_t burn = BurnIn(rounds);
  std::vector<std::vector<int>> chain;
  chain.reserve(static_cast<std::size_t>(rounds - burn));
  for (std::int64_t r = 0; r < rounds; ++r) {
    RunRound(inst.agents, agent_rngs, signs, inst.obs, ProtocolVariant::kMh,
             ProposalMode::kCollapsed, r, protocol_rng);
    if (r >= burn) chain.push_back(signs.signs);
  }
  return chain;
}

ExperimentConfig StandardWorldConfig() {
  ExperimentConfig cfg;
  cfg.world.num_objects = 100;
  cfg.world.num_true_categories = 4;
  cfg.world.num_agents = 2;
  cfg.world.feature_dim = 2;
  cfg.world.category_separation = 5.0;
  cfg.world.noise_scale = 1.0;
  cfg.num_signs = 4;
  cfg.num_categories = 4;
  cfg.hyper.num_signs = 4;
  cfg.hyper.num_categories = 4;
  cfg.protocol_variant = ProtocolVariant::kMh;
  cfg.mode = ProposalMode::kSampled;
  cfg.rounds = 200;
  cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  return cfg;
}

double TrailingMedian(const std::vector<double>& series, std::size_t end, std::size_t window) {
  Require(end <= series.size() && window >= 1 && end >= window,
          "TrailingMedian: window outside the series");
  return Median(std::vector<double>(series.begin() + static_cast<std::ptrdiff_t>(end - window),
                                    series.begin() + static_cast<std::ptrdiff_t>(end)));
}

SuiteReport RunOracleValidationSuite(const fs::path& out_dir) {
  (void)out_dir;
  SuiteReport report{"oracle-validation", {}};
  const TinyInstance inst = StandardTinyInstance();
  const PosteriorTable posterior = EnumeratePosterior(inst);
  // 50,000 samples remain after the 20% burn-in.
  constexpr std::int64_t kRounds = 62'500;

  const auto start = std::chrono::steady_clock::now();
  const auto decentralized = DecentralizedChain(inst, kRounds, 2024);
  const auto empirical = EmpiricalJoint(decentralized, posterior.num_signs, posterior.num_objects);
  const double tv = TotalVariationDistance(empirical, posterior.joint);
  const double seconds = Seconds(start);
  report.criteria.push_back(
      {"C1", "decentralized mh/collapsed chain matches the enumerated posterior (TV <= 0.05, < 10 s)",
       tv <= 0.05 && seconds < 10.0,
       {{"tv", tv}, {"samples", decentralized.size()}, {"seconds", seconds},
        {"posterior", posterior.joint}, {"empirical", empirical}}});

  Rng gibbs_rng(DeriveSeed(2024, 99));
  const auto centralized = CentralizedGibbs(inst, kRounds, gibbs_rng);
  const auto central_empirical =
      EmpiricalJoint(centralized, posterior.num_signs, posterior.num_objects);
  const double tv_pair = TotalVariationDistance(central_empirical, empirical);
  report.criteria.push_back(
      {"C2", "centralized Gibbs and the decentralized chain agree (TV <= 0.05)",
       tv_pair <= 0.05,
       {{"tv", tv_pair},
        {"tv_centralized_vs_posterior", TotalVariationDistance(central_empirical, posterior.joint)},
        {"samples", centralized.size()}}});
  return report;
}

SuiteReport RunBaselineComparisonSuite(const fs::path& out_dir) {
  SuiteReport report{"baseline-comparison", {}};
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig mh = StandardWorldConfig();
  mh.output_dir = out_dir / "mh";
  ExperimentConfig never = mh;
  never.protocol_variant = ProtocolVariant::kNever;
  never.output_dir = out_dir / "never";
  const ExperimentResult mh_result = RunExperiment(mh);
  const ExperimentResult never_result = RunExperiment(never);
  const double seconds = Seconds(start);

  auto kappa = [](const MetricRecord& m) -> std::optional<double> { return m.kappa; };
  auto ari = [](const MetricRecord& m) { return m.ari_signs_vs_truth; };
  auto fe = [](const MetricRecord& m) -> std::optional<double> { return m.free_energy_total; };
  const bool complete = mh_result.all_ok() && never_result.all_ok();
  const double mh_kappa = Median(FinalValues(mh_result, kappa));
  const double never_kappa = Median(FinalValues(never_result, kappa));
  const double mh_ari = Median(FinalValues(mh_result, ari));
  const double never_ari = Median(FinalValues(never_result, ari));
  const double mh_fe = Median(FinalValues(mh_result, fe));
  const double never_fe = Median(FinalValues(never_result, fe));
  report.criteria.push_back(
      {"C3",
       "mh >= never on median final kappa and ARI(signs, truth); mh <= never on median final free "
       "energy; under 2 minutes",
       complete && mh_kappa >= never_kappa && mh_ari >= never_ari && mh_fe <= never_fe &&
           seconds < 120.0,
       {{"median_kappa", {{"mh", mh_kappa}, {"never", never_kappa}}},
        {"median_ari_signs_vs_truth", {{"mh", mh_ari}, {"never", never_ari}}},
        {"median_free_energy_total", {{"mh", mh_fe}, {"never", never_fe}}},
        {"seconds", seconds},
        {"failed_seeds", FailedSeeds(mh_result).size() + FailedSeeds(never_result).size()}}});

  int descending = 0;
  json per_seed = json::array();
  for (const auto& s : mh_result.seeds) {
    if (!s.ok) continue;
    const auto totals = Totals(s);
    const double early = TrailingMedian(totals, 20, 20);
    const double late = TrailingMedian(totals, 200, 20);
    if (late < early) ++descending;
    per_seed.push_back({{"seed", s.seed}, {"window_median_round_20", early},
                        {"window_median_round_200", late}});
  }
  report.criteria.push_back(
      {"C4", "20-round windowed median free energy at round 200 below round 20 in >= 8 of 10 seeds",
       descending >= 8, {{"descending_seeds", descending}, {"per_seed", per_seed}}});
  return report;
}

SuiteReport RunPlasticitySuite(const fs::path& out_dir) {
  SuiteReport report{"plasticity", {}};
  ExperimentConfig plastic = StandardWorldConfig();
  plastic.rounds = 400;
  plastic.shift_at = 200;
  plastic.world.shift =
      ShiftSpec{200, ShiftKind::kTranslate, 3.0 * plastic.world.category_separation};
  plastic.output_dir = out_dir / "plastic";
  ExperimentConfig frozen = plastic;
  frozen.freeze_after = 200;
  frozen.output_dir = out_dir / "frozen";
  const ExperimentResult plastic_result = RunExperiment(plastic);
  const ExperimentResult frozen_result = RunExperiment(frozen);

  constexpr double kThreshold = 0.9;
  constexpr auto kNever = std::numeric_limits<std::int64_t>::max();
  auto adaptation = [&](const SeedOutcome& s) -> std::int64_t {
    std::vector<double> series;
    for (const auto& m : s.metrics) series.push_back(m.mean_ari_z().value_or(0.0));
    return AdaptationTime(series, 200, kThreshold).value_or(kNever);
  };
  auto encode = [&](std::int64_t t) -> json { return t == kNever ? json(nullptr) : json(t); };

  int plastic_not_slower = 0;
  int both_unrecovered = 0;
  json per_seed = json::array();
  std::vector<double> plastic_plateau, frozen_plateau;
  const bool complete = plastic_result.all_ok() && frozen_result.all_ok();
  for (std::size_t i = 0; complete && i < plastic_result.seeds.size(); ++i) {
    const auto& p = plastic_result.seeds[i];
    const auto& f = frozen_result.seeds[i];
    const std::int64_t tp = adaptation(p);
    const std::int64_t tf = adaptation(f);
    if (tp <= tf) ++plastic_not_slower;
    if (tp == kNever && tf == kNever) ++both_unrecovered;
    plastic_plateau.push_back(TrailingMedian(Totals(p), 400, 20));
    frozen_plateau.push_back(TrailingMedian(Totals(f), 400, 20));
    per_seed.push_back({{"seed", p.seed},
                        {"adaptation_plastic", encode(tp)},
                        {"adaptation_frozen", encode(tf)},
                        {"plateau_plastic", plastic_plateau.back()},
                        {"plateau_frozen", frozen_plateau.back()}});
  }
  const double plastic_fe = complete ? Median(plastic_plateau) : 0.0;
  const double frozen_fe = complete ? Median(frozen_plateau) : 0.0;
  report.criteria.push_back(
      {"C5",
       "after a 3x-separation translate shift, plastic adaptation_time <= frozen in >= 8 of 10 "
       "seeds and frozen post-shift free energy plateau >= plastic",
       complete && plastic_not_slower >= 8 && frozen_fe >= plastic_fe,
       {{"plastic_not_slower_seeds", plastic_not_slower},
        {"both_unrecovered_seeds", both_unrecovered},
        {"median_plateau", {{"plastic", plastic_fe}, {"frozen", frozen_fe}}},
        {"adaptation_metric", "mean ari_z_vs_truth, threshold 0.9"},
        {"per_seed", per_seed}}});
  return report;
}

SuiteReport RunSuite(const std::string& name, const fs::path& out_dir) {
  if (name == "oracle-validation") return RunOracleValidationSuite(out_dir);
  if (name == "baseline-comparison") return RunBaselineComparisonSuite(out_dir);
  if (name == "plasticity") return RunPlasticitySuite(out_dir);
  Fail(ErrorCode::kInvalidArgument, "unknown suite '" + name + "'");
}

}  // namespace cpc
