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

#include "invariants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "cpc/freeenergy.hpp"
#include "cpc/metrics.hpp"
#include "cpc/oracle.hpp"
#include "cpc/runner.hpp"
#include "cpc/suites.hpp"
#include "helpers.hpp"
#include "json.hpp"

namespace cpc::testing {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string Fmt(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << v;
  return ss.str();
}

// Random hand-built agent with 1-D emissions on D objects.
AgentState RandomAgent(int id, int W, int Z, int D, Rng& rng) {
  std::vector<std::pair<double, double>> theta;
  for (int z = 0; z < Z; ++z) theta.emplace_back(4.0 * rng.Normal(), 0.2 + 3.0 * rng.Uniform());
  std::vector<std::int64_t> counts(static_cast<std::size_t>(W * Z));
  for (auto& c : counts) c = static_cast<std::int64_t>(rng.Below(12));
  AgentState a = HandAgent(id, W, theta, counts, D, 0.3 + rng.Uniform());
  for (auto& z : a.assignments) z = static_cast<int>(rng.Below(static_cast<std::uint64_t>(Z)));
  return a;
}

ExperimentConfig SmallConfig(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.world.num_objects = 24;
  cfg.world.num_true_categories = 3;
  cfg.world.feature_dim = 2;
  cfg.num_signs = 3;
  cfg.num_categories = 3;
  cfg.hyper.num_signs = 3;
  cfg.hyper.num_categories = 3;
  cfg.rounds = 16;
  cfg.seeds = {3, 4};
  cfg.output_dir = out;
  return cfg;
}

}  // namespace

std::vector<double> GridPredictive(const NormalGamma& prior, const std::vector<double>& data,
                                   const std::vector<double>& xs) {
  // Posterior over (mu, u = ln lambda) on a uniform grid; the Jacobian of the
  // log transform contributes +u. Parameterized without using the conjugate
  // update, so this is an independent check.
  const double center =
      data.empty() ? prior.mean : std::accumulate(data.begin(), data.end(), 0.0) / data.size();
  const double hm = 0.02, hu = 0.02;
  std::vector<double> mus, lams, logw;
  for (double u = -9.0; u <= 5.0; u += hu) {
    const double lam = std::exp(u);
    for (double mu = center - 18.0; mu <= center + 18.0; mu += hm) {
      double lp = 0.5 * std::log(prior.kappa * lam) -
                  0.5 * prior.kappa * lam * (mu - prior.mean) * (mu - prior.mean) +
                  (prior.shape - 1.0) * u - prior.rate * lam + u;
      for (double x : data) lp += 0.5 * u - 0.5 * lam * (x - mu) * (x - mu);
      mus.push_back(mu);
      lams.push_back(lam);
      logw.push_back(lp);
    }
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  std::vector<double> keep_mu, keep_lam, keep_w;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    const double w = std::exp(logw[i] - top);
    if (w < 1e-20) continue;
    keep_mu.push_back(mus[i]);
    keep_lam.push_back(lams[i]);
    keep_w.push_back(w);
  }
  std::vector<double> out;
  for (double x : xs) {
    double s = 0.0;
    for (std::size_t i = 0; i < keep_w.size(); ++i) {
      const double dx = x - keep_mu[i];
      s += keep_w[i] * std::sqrt(keep_lam[i]) * std::exp(-0.5 * keep_lam[i] * dx * dx);
    }
    out.push_back(s);
  }
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= total;
  return out;
}

InvariantCheck CheckAcceptanceScaleInvariance() {
  // A second feature whose emission is identical across categories multiplies
  // every category likelihood by the same constant c.
  Rng rng(11);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int W = 3, Z = 3, D = 4;
    AgentState base = RandomAgent(0, W, Z, D, rng);
    AgentObservations obs1{1, {}};
    for (int d = 0; d < D; ++d) obs1.values.push_back(3.0 * rng.Normal());
    AgentState scaled = base;
    const double shared_mean = rng.Normal(), shared_prec = 0.1 + 5.0 * rng.Uniform();
    scaled.hyper.ng_mean0 = {0.0, 0.0};
    for (auto& e : scaled.emissions) {
      e.mean.push_back(shared_mean);
      e.precision.push_back(shared_prec);
    }
    AgentObservations obs2{2, {}};
    for (int d = 0; d < D; ++d) {
      obs2.values.push_back(obs1.values[d]);
      obs2.values.push_back(shared_mean + 4.0 * rng.Normal());
    }
    for (auto mode : {ProposalMode::kSampled, ProposalMode::kCollapsed}) {
      for (int d = 0; d < D; ++d) {
        for (int a = 0; a < W; ++a) {
          for (int b = 0; b < W; ++b) {
            const double r1 = AcceptanceProbability(base, d, a, b, mode, obs1);
            const double r2 = AcceptanceProbability(scaled, d, a, b, mode, obs2);
            worst = std::max(worst, std::abs(r1 - r2));
          }
        }
      }
    }
  }
  return {"acceptance-ratio scale invariance", worst <= 1e-12, "max |diff| " + Fmt(worst)};
}

InvariantCheck CheckIdentityProposal() {
  Rng rng(12);
  bool ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    const AgentState a = RandomAgent(0, 4, 3, 3, rng);
    const AgentObservations obs = OneDim({rng.Normal(), 50.0, -50.0});
    for (auto mode : {ProposalMode::kSampled, ProposalMode::kCollapsed}) {
      for (int d = 0; d < 3; ++d) {
        for (int w = 0; w < 4; ++w) ok = ok && AcceptanceProbability(a, d, w, w, mode, obs) == 1.0;
      }
    }
  }
  return {"identity-proposal acceptance = 1", ok, ok ? "all exact 1" : "found r != 1"};
}

InvariantCheck CheckNeverAcceptImmutability() {
  ExperimentConfig cfg = SmallConfig("unused");
  cfg.protocol_variant = ProtocolVariant::kNever;
  bool ok = true;
  std::size_t events = 0;
  for (auto seed : cfg.seeds) {
    TrainingState state = InitTraining(cfg, seed);
    const SignAssignment initial = state.signs;
    TrainingObserver observer;
    observer.on_event = [&](const TranscriptEvent& e) {
      ++events;
      ok = ok && !e.accepted;
    };
    observer.on_round = [&](const TrainingState& st, const FreeEnergyReport&) {
      ok = ok && st.signs == initial;
    };
    RunTraining(state, MakeSchedule(cfg, seed), observer);
  }
  return {"never-accept sign immutability", ok && events > 0,
          std::to_string(events) + " events, signs and version constant"};
}

InvariantCheck CheckTranscriptReplay(const fs::path& scratch) {
  ExperimentConfig cfg = SmallConfig(scratch / "replay");
  cfg.protocol_variant = ProtocolVariant::kMh;
  const ExperimentResult result = RunExperiment(cfg, {.before_seed = {}, .parallel = false});
  bool ok = result.all_ok();
  for (const auto& s : result.seeds) {
    if (!s.ok) continue;
    const ReplayResult r = ReplayFromFiles(s.artifact.transcript, std::nullopt);
    ok = ok && r.matches_checkpoint.value_or(false);
  }
  return {"transcript replay determinism", ok, "replayed signs equal checkpointed signs"};
}

InvariantCheck CheckPublicChannelPurity(const fs::path& scratch) {
  ExperimentConfig cfg = SmallConfig(scratch / "purity");
  cfg.seeds = {5};
  const ExperimentResult result = RunExperiment(cfg, {.before_seed = {}, .parallel = false});
  if (!result.all_ok()) return {"public-channel purity", false, "run failed"};
  const std::set<std::string> header_keys{"rng_seed", "initial_signs", "initial_version"};
  const std::set<std::string> event_keys{"round",     "speaker_id",    "listener_id",
                                         "object_id", "proposed_sign", "accepted"};
  std::istringstream lines(ReadAll(result.seeds[0].artifact.transcript));
  std::string line;
  bool header = true, ok = true;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const json rec = json::parse(line);
    std::set<std::string> keys;
    for (auto it = rec.begin(); it != rec.end(); ++it) {
      keys.insert(it.key());
      const json& v = it.value();
      if (it.key() == "accepted") {
        ok = ok && v.is_boolean();
      } else if (v.is_array()) {
        for (const auto& x : v) ok = ok && x.is_number_integer();
      } else {
        ok = ok && v.is_number_integer();
      }
    }
    ok = ok && keys == (header ? header_keys : event_keys);
    header = false;
    ++n;
  }
  return {"public-channel purity", ok && n > 1,
          std::to_string(n) + " records hold only schema integers and booleans"};
}

InvariantCheck CheckKlNonnegativity() {
  Rng rng(13);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int W = 1 + static_cast<int>(rng.Below(4)), Z = 1 + static_cast<int>(rng.Below(4));
    const int D = 1 + static_cast<int>(rng.Below(6));
    std::vector<AgentState> agents;
    ObservationSet obs;
    for (int k = 0; k < 2; ++k) {
      agents.push_back(RandomAgent(k, W, Z, D, rng));
      AgentObservations o{1, {}};
      for (int d = 0; d < D; ++d) o.values.push_back(5.0 * rng.Normal());
      obs.agents.push_back(o);
      obs.contexts.emplace_back(D, 0);
    }
    SignAssignment signs{std::vector<int>(D), 0};
    for (auto& w : signs.signs) w = static_cast<int>(rng.Below(static_cast<std::uint64_t>(W)));
    const FreeEnergyReport r = EstimateTotal(agents, signs, obs, 0);
    worst = std::min(worst, r.collective_regularization);
    for (double v : r.individual_regularization) worst = std::min(worst, v);
  }
  return {"KL-term nonnegativity", worst >= -1e-9, "min KL term " + Fmt(worst)};
}

InvariantCheck CheckNormalizations() {
  Rng rng(14);
  double worst = 0.0;
  auto track = [&](const std::vector<double>& p) { worst = std::max(worst, std::abs(Sum(p) - 1.0)); };
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.Below(8));
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n));
    for (auto& c : counts) c = static_cast<std::int64_t>(rng.Below(1000));
    track(DirichletPredictive(counts, 1e-3 + 5.0 * rng.Uniform()));
    std::vector<double> lw(static_cast<std::size_t>(n));
    for (auto& v : lw) v = 300.0 * rng.Normal();
    track(NormalizeLogWeights(lw));

    const AgentState a = RandomAgent(0, 3, n, 2, rng);
    const AgentObservations obs = OneDim({rng.Normal(), 10.0 * rng.Normal()});
    for (int d = 0; d < 2; ++d) {
      track(NormalizeLogWeights(PerceptionLogWeights(a, obs, d, static_cast<int>(rng.Below(3)))));
      track(NormalizeLogWeights(SignLogWeights(a, d, ProposalMode::kCollapsed, obs)));
    }
  }
  const PosteriorTable table = EnumeratePosterior(StandardTinyInstance());
  track(table.joint);
  for (const auto& p : table.per_object) track(p);
  return {"distribution normalizations", worst <= 1e-12, "max |sum - 1| " + Fmt(worst)};
}

InvariantCheck CheckNormalGammaGridOracle() {
  const NormalGamma prior{0.5, 1.0, 3.0, 2.0};
  const std::vector<std::vector<double>> datasets{
      {}, {2.0}, {0.5, -0.3}, {1.0, 2.0, 3.0}, {-1.0, 0.2, 0.4, 1.5}, {0.1, 0.2, 0.3, 2.5, -1.0}};
  double worst = 0.0;
  for (const auto& data : datasets) {
    const NormalGamma post = NormalGammaUpdate(prior, data);
    std::vector<double> xs;
    for (int i = -80; i <= 80; ++i) xs.push_back(post.mean + 0.1 * i);
    std::vector<double> closed;
    for (double x : xs) closed.push_back(std::exp(NormalGammaLogPredictive(post, x)));
    const double total = Sum(closed);
    for (double& v : closed) v /= total;
    worst = std::max(worst, TotalVariationDistance(closed, GridPredictive(prior, data, xs)));
  }
  return {"Normal-Gamma vs grid integration", worst <= 1e-6, "max TV " + Fmt(worst)};
}

InvariantCheck CheckRelabelingInvariance() {
  Rng rng(15);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> a(60), b(60);
    for (auto& v : a) v = static_cast<int>(rng.Below(4));
    for (std::size_t i = 0; i < b.size(); ++i) {
      b[i] = rng.Uniform() < 0.6 ? a[i] : static_cast<int>(rng.Below(4));
    }
    std::vector<int> perm{0, 1, 2, 3}, other{0, 1, 2, 3};
    for (int i = 3; i > 0; --i) {
      std::swap(perm[i], perm[rng.Below(static_cast<std::uint64_t>(i + 1))]);
      std::swap(other[i], other[rng.Below(static_cast<std::uint64_t>(i + 1))]);
    }
    std::vector<int> pa(a.size()), pb(b.size()), ob(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      pa[i] = perm[a[i]];
      pb[i] = perm[b[i]];
      ob[i] = other[b[i]];
    }
    worst = std::max(worst, std::abs(AdjustedRandIndex(a, b) - AdjustedRandIndex(pa, ob)));
    worst = std::max(worst, std::abs(AdjustedRandIndex(a, b) - AdjustedRandIndex(b, a)));
    worst = std::max(worst, std::abs(CohensKappa(a, b) - CohensKappa(pa, pb)));
  }
  return {"ARI/kappa relabeling invariance", worst <= 1e-12, "max |diff| " + Fmt(worst)};
}

InvariantCheck CheckNullCalibration() {
  Rng rng(16);
  double ari = 0.0, kappa = 0.0;
  constexpr int kTrials = 1000;
  for (int trial = 0; trial < kTrials; ++trial) {
    std::vector<int> a(100), b(100);
    for (auto& v : a) v = static_cast<int>(rng.Below(4));
    for (auto& v : b) v = static_cast<int>(rng.Below(4));
    ari += AdjustedRandIndex(a, b);
    kappa += CohensKappa(a, b);
  }
  ari /= kTrials;
  kappa /= kTrials;
  return {"ARI/kappa null calibration", std::abs(ari) <= 0.02 && std::abs(kappa) <= 0.02,
          "mean ARI " + Fmt(ari) + ", mean kappa " + Fmt(kappa)};
}

InvariantCheck CheckSeedDeterminism(const fs::path& scratch) {
  ExperimentConfig cfg = SmallConfig(scratch / "det-a");
  cfg.world.shift = ShiftSpec{8, ShiftKind::kTranslate, 6.0};
  cfg.shift_at = 8;
  const ExperimentResult a = RunExperiment(cfg);
  cfg.output_dir = scratch / "det-b";
  const ExperimentResult b = RunExperiment(cfg);
  bool ok = a.all_ok() && b.all_ok();
  for (std::size_t i = 0; ok && i < a.seeds.size(); ++i) {
    const RunArtifact& x = a.seeds[i].artifact;
    const RunArtifact& y = b.seeds[i].artifact;
    ok = ReadAll(x.transcript) == ReadAll(y.transcript) &&
         ReadAll(x.metrics) == ReadAll(y.metrics) &&
         ParseCheckpoint(ReadAll(x.checkpoint)).state ==
             ParseCheckpoint(ReadAll(y.checkpoint)).state;
  }
  return {"end-to-end seed determinism", ok, "transcripts and metric streams byte-identical"};
}

InvariantCheck CheckCheckpointResume(const fs::path& scratch) {
  ExperimentConfig cfg = SmallConfig(scratch / "straight");
  cfg.seeds = {7};
  cfg.rounds = 20;
  cfg.world.shift = ShiftSpec{6, ShiftKind::kTranslate, 6.0};
  cfg.shift_at = 6;
  const ExperimentResult straight = RunExperiment(cfg);
  ExperimentConfig half = cfg;
  half.rounds = 10;
  half.output_dir = scratch / "half";
  const ExperimentResult first = RunExperiment(half);
  if (!straight.all_ok() || !first.all_ok()) return {"checkpoint-resume bit-equivalence", false, "run failed"};

  const Checkpoint cp = CheckpointRestore(first.seeds[0].artifact);
  const SeedOutcome resumed = ResumeRun(cp, scratch / "resumed", 20);

  auto lines = [](const fs::path& p) {
    std::vector<std::string> out;
    std::istringstream in(ReadAll(p));
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
  };
  // Straight run: header + events; resumed: header + events from round 10 on.
  const auto full_t = lines(straight.seeds[0].artifact.transcript);
  const auto tail_t = lines(resumed.artifact.transcript);
  const auto full_m = lines(straight.seeds[0].artifact.metrics);
  const auto tail_m = lines(resumed.artifact.metrics);
  bool ok = tail_t.size() > 1 && full_t.size() > tail_t.size() && tail_m.size() == full_m.size() / 2;
  ok = ok && std::equal(tail_t.begin() + 1, tail_t.end(), full_t.end() - (tail_t.size() - 1));
  ok = ok && std::equal(tail_m.begin(), tail_m.end(), full_m.end() - tail_m.size());
  ok = ok && ParseCheckpoint(ReadAll(resumed.artifact.checkpoint)).state ==
                 ParseCheckpoint(ReadAll(straight.seeds[0].artifact.checkpoint)).state;
  // Restore followed by an immediate checkpoint reproduces the bytes.
  const std::string original = ReadAll(first.seeds[0].artifact.checkpoint);
  ok = ok && SerializeCheckpoint(cp.config, cp.seed, cp.state) == original;
  return {"checkpoint-resume bit-equivalence", ok,
          "rounds 10-19 after resume identical to the uninterrupted run"};
}

std::vector<InvariantCheck> RunAllInvariantChecks(const fs::path& scratch) {
  return {CheckAcceptanceScaleInvariance(),
          CheckIdentityProposal(),
          CheckNeverAcceptImmutability(),
          CheckTranscriptReplay(scratch),
          CheckPublicChannelPurity(scratch),
          CheckKlNonnegativity(),
          CheckNormalizations(),
          CheckNormalGammaGridOracle(),
          CheckRelabelingInvariance(),
          CheckNullCalibration(),
          CheckSeedDeterminism(scratch),
          CheckCheckpointResume(scratch)};
}

}  // namespace cpc::testing
