// Copyright 2026 The banditlab Authors.
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

// Acceptance suite: one PASS/FAIL line per criterion. Tolerances below are
// fixed; nothing is tuned at run time.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "banditlab/adversarial.hpp"
#include "banditlab/config.hpp"
#include "banditlab/game.hpp"
#include "banditlab/harness.hpp"
#include "banditlab/rng.hpp"
#include "banditlab/smallcell.hpp"
#include "banditlab/stochastic.hpp"

namespace {

using namespace banditlab;
using Clock = std::chrono::steady_clock;

// Criterion 1-2: small-cell convergence and modal dominance.
constexpr double kGapTolerance = 0.05;
constexpr double kRuntimeBudgetS = 60.0;
constexpr double kTailShare = 0.5;
// Criterion 3: distribution invariants.
constexpr int kFuzzCases = 10000;
constexpr double kMassSlack = 1e-9;
constexpr int kMarginalDraws = 100000;
constexpr double kSigmas = 3.0;
// Criterion 4: UCB1 logarithmic regret.
constexpr double kUcbRatioBound = 25.0;
constexpr double kUcbRuntimeS = 10.0;
// Criterion 5: non-stationary instance.
constexpr std::size_t kAlarmWindow = 2000;
constexpr double kAlarmShare = 0.9;
// Criterion 6-7: sublinear external and internal regret.
constexpr double kRegretPerRound = 0.05;
constexpr double kCeGap = 0.05;
// Criterion 8: complexity.
constexpr double kDoublingLo = 1.8, kDoublingHi = 2.2;
constexpr double kTimeFactor = 4.0;

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void smallcell_criteria() {
  ExperimentConfig c;  // M=6, N=3, T=5e5, 20 replications, exp3m, uniform-iid
  c.trace_stride = 10000;
  const auto start = Clock::now();
  const RunSummary s = run_experiment(c);
  const double elapsed = seconds_since(start);

  double avg = 0.0, oracle = 0.0, worst_gap = 0.0;
  double worst_tail = 1.0;
  bool modal_ok = true;
  for (const auto& rep : s.replications) {
    avg += rep.final_avg_utility;
    oracle += *rep.oracle_avg_utility;
    worst_gap = std::max(worst_gap, compare_to_oracle(rep).relative_gap);
    const auto [tail_mode, tail_share] = modal_action(rep.tail_action_counts);
    const auto [mode, share] = modal_action(rep.action_counts);
    (void)share;
    modal_ok = modal_ok && tail_mode == *rep.oracle_action && mode == *rep.oracle_action &&
               tail_share > kTailShare;
    worst_tail = std::min(worst_tail, rep.oracle_action == tail_mode ? tail_share : 0.0);
  }
  const double n = static_cast<double>(s.replications.size());
  const double gap = relative_gap(avg / n, oracle / n);
  report(1, gap <= kGapTolerance && elapsed < kRuntimeBudgetS,
         fmt("relative gap %.4f (worst replication %.4f) <= %.2f; %.1f s < %.0f s", gap,
             worst_gap, kGapTolerance, elapsed, kRuntimeBudgetS));
  report(2, modal_ok,
         fmt("oracle subset is modal in all %zu replications; lowest tail share %.4f > %.2f",
             s.replications.size(), worst_tail, kTailShare));
}

void distribution_criterion() {
  std::mt19937_64 gen(20240601);
  std::lognormal_distribution<double> weight(0.0, 4.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Rng rng(17);
  double worst_mass = 0.0, worst_max = 0.0;
  bool sizes_ok = true;
  for (int i = 0; i < kFuzzCases; ++i) {
    const std::size_t M = 2 + gen() % 63;
    const std::size_t N = 1 + gen() % M;
    Exp3mState st(M, N, u(gen));
    for (double& w : st.weights) w = weight(gen);
    const MixedStrategy p = exp3m_distribution(st);
    double sum = 0.0;
    for (double x : p.probs()) {
      sum += x;
      worst_max = std::max(worst_max, x);
    }
    worst_mass = std::max(worst_mass, std::abs(sum - static_cast<double>(N)));
    sizes_ok = sizes_ok && depround(p, rng).size() == N;
  }

  const std::vector<std::vector<double>> fixed = {
      {0.5, 0.5},
      {0.9, 0.7, 0.3, 0.1},
      {0.25, 0.25, 0.25, 0.25},
      {1.0, 0.5, 0.5, 0.0},
      {0.1, 0.2, 0.3, 0.4},
      {0.6, 0.6, 0.6, 0.6, 0.6},
      {0.99, 0.01, 0.5, 0.5, 0.75, 0.25},
      {1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0, 1.0},
      {0.05, 0.95, 0.15, 0.85, 0.45, 0.55, 0.7, 0.3},
      {0.2, 0.8, 0.2, 0.8, 0.2, 0.8, 0.2, 0.8, 0.5, 0.5}};
  double worst_z = 0.0;
  bool marginals_ok = true;
  for (const auto& q : fixed) {
    double target = 0.0;
    for (double x : q) target += x;
    const MixedStrategy p(q, std::round(target));
    std::vector<int> hits(q.size(), 0);
    for (int d = 0; d < kMarginalDraws; ++d) {
      const SubsetAction s = depround(p, rng);
      sizes_ok = sizes_ok && s.size() == static_cast<std::size_t>(std::round(target));
      for (ArmIndex a : s.members()) ++hits[a];
    }
    for (std::size_t m = 0; m < q.size(); ++m) {
      const double freq = hits[m] / static_cast<double>(kMarginalDraws);
      const double sigma = std::sqrt(q[m] * (1 - q[m]) / kMarginalDraws);
      if (sigma == 0.0) {
        marginals_ok = marginals_ok && freq == q[m];
      } else {
        worst_z = std::max(worst_z, std::abs(freq - q[m]) / sigma);
      }
    }
  }
  marginals_ok = marginals_ok && worst_z <= kSigmas;
  report(3,
         worst_mass <= kMassSlack && worst_max <= 1.0 + kMassSlack && sizes_ok && marginals_ok,
         fmt("%d fuzz cases: max |sum p - N| %.2e, max p - 1 %.2e; exact N arms: %s; "
             "worst marginal deviation %.2f sigma over %zu distributions",
             kFuzzCases, worst_mass, worst_max - 1.0, sizes_ok ? "yes" : "no", worst_z,
             fixed.size()));
}

// Slope of y against x by least squares.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void ucb_criterion() {
  const int seeds = 100;
  const std::size_t n = 100000, step = 1000;
  const auto start = Clock::now();
  std::vector<double> regret(n / step, 0.0);
  for (int s = 0; s < seeds; ++s) {
    Ucb1Policy policy(2);
    Rng rng(derive_seed(4, s));
    const std::uint64_t env = derive_seed(40, s);
    double sums[2] = {0, 0}, got = 0;
    for (std::size_t t = 0; t < n; ++t) {
      SplitMix64 e(derive_seed(env, t));
      const double r[2] = {bernoulli(e, 0.9) ? 1.0 : 0.0, bernoulli(e, 0.6) ? 1.0 : 0.0};
      sums[0] += r[0];
      sums[1] += r[1];
      const ArmIndex a = policy.select(rng).arms[0];
      policy.observe(a, r[a]);
      got += r[a];
      if ((t + 1) % step == 0) regret[(t + 1) / step - 1] += std::max(sums[0], sums[1]) - got;
    }
  }
  const double elapsed = seconds_since(start);
  double worst = 0.0;
  std::vector<double> logn, ratio;
  for (std::size_t k = 0; k < regret.size(); ++k) {
    const double rounds = static_cast<double>((k + 1) * step);
    const double r = regret[k] / seeds / std::log(rounds);
    worst = std::max(worst, r);
    logn.push_back(std::log(rounds));
    ratio.push_back(r);
  }
  const double trend = slope(logn, ratio);
  report(4, worst < kUcbRatioBound && trend <= 0.0 && elapsed < kUcbRuntimeS,
         fmt("max regret/ln n %.3f < %.0f; trend slope d(ratio)/d(ln n) %.3f <= 0 "
             "(ratio %.3f at 1e3, %.3f at 1e5); %.1f s",
             worst, kUcbRatioBound, trend, ratio.front(), ratio.back(), elapsed));
}

void nonstationary_criterion() {
  const int seeds = 50;
  const std::size_t n = 100000, change = n / 2;
  double ucb_regret = 0.0, sw_regret = 0.0;
  int detected = 0;
  for (int s = 0; s < seeds; ++s) {
    const std::uint64_t env = derive_seed(50, s);
    auto mean = [&](std::size_t t, ArmIndex a) {
      return (a == 0) == (t < change) ? 0.9 : 0.1;
    };
    Ucb1Policy ucb(2);
    SlidingWindowUcbPolicy sw(2, 1000);
    Rng rng_a(derive_seed(5, s)), rng_b(derive_seed(5, s));
    // Two-sided detectors on both arms' raw streams.
    std::vector<PageHinkleyState> detectors = {
        {50.0, 0.005, ChangeDirection::kIncrease}, {50.0, 0.005, ChangeDirection::kDecrease},
        {50.0, 0.005, ChangeDirection::kIncrease}, {50.0, 0.005, ChangeDirection::kDecrease}};
    bool hit = false;
    for (std::size_t t = 0; t < n; ++t) {
      SplitMix64 e(derive_seed(env, t));
      const double r[2] = {bernoulli(e, mean(t, 0)) ? 1.0 : 0.0,
                           bernoulli(e, mean(t, 1)) ? 1.0 : 0.0};
      const ArmIndex a = ucb.select(rng_a).arms[0];
      ucb.observe(a, r[a]);
      ucb_regret += 0.9 - mean(t, a);
      const ArmIndex b = sw.select(rng_b).arms[0];
      sw.observe(b, r[b]);
      sw_regret += 0.9 - mean(t, b);
      for (std::size_t d = 0; d < detectors.size(); ++d) {
        const bool alarm = page_hinkley_step(detectors[d], r[d / 2]).alarm;
        if (alarm && t >= change && t < change + kAlarmWindow) hit = true;
      }
    }
    detected += hit;
  }
  ucb_regret /= seeds;
  sw_regret /= seeds;
  const double share = detected / static_cast<double>(seeds);
  report(5, sw_regret < ucb_regret && share >= kAlarmShare,
         fmt("mean regret sw-ucb %.1f < ucb1 %.1f: %s; change detected within %zu rounds in "
             "%.0f%% of seeds (>= %.0f%%)",
             sw_regret, ucb_regret, sw_regret < ucb_regret ? "yes" : "no", kAlarmWindow,
             100 * share, 100 * kAlarmShare));
}

void exp3_criterion() {
  ExperimentConfig c;
  c.kind = ExperimentKind::kAdversarialBench;
  c.policy = "exp3";
  c.arms = 10;
  c.plays = 1;
  c.horizon = 100000;
  c.replications = 20;
  c.best_mean = 0.7;
  c.other_mean = 0.4;
  c.trace_stride = c.horizon;
  const RunSummary s = run_experiment(c);
  double regret = 0.0;
  for (const auto& rep : s.replications) regret += rep.regret;
  regret /= static_cast<double>(s.replications.size()) * static_cast<double>(c.horizon);
  report(6, regret <= kRegretPerRound,
         fmt("mean external regret / n %.4f <= %.2f over %zu seeds", regret, kRegretPerRound,
             s.replications.size()));
}

void game_criterion() {
  std::string detail;
  bool pass = true;
  for (const char* name : {"chicken", "shapley"}) {
    ExperimentConfig c;
    c.kind = ExperimentKind::kGameCe;
    c.game = name;
    c.horizon = 100000;
    c.replications = 20;
    c.trace_stride = c.horizon;
    const RunSummary s = run_experiment(c);
    double internal = 0.0, gap = -1.0;
    for (const auto& rep : s.replications) {
      internal = std::max(internal, *rep.max_internal_regret_per_round);
      gap = std::max(gap, *rep.ce_gap);
    }
    pass = pass && internal <= kRegretPerRound && gap <= kCeGap;
    detail += fmt("%s: max internal regret/n %.4f, max CE gap %.4f; ", name, internal, gap);
  }
  detail += fmt("bounds %.2f / %.2f over 20 seeds", kRegretPerRound, kCeGap);
  report(7, pass, detail);
}

void complexity_criterion() {
  ExperimentConfig c;
  c.kind = ExperimentKind::kComplexityBench;  // M sweep 8..2048, N = M/2
  const auto rows = bench_complexity(c);
  bool state_ok = true;
  double lo = 1e9, hi = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double doublings = std::log2(static_cast<double>(rows[i].arms) / rows[i - 1].arms);
    const double per = std::pow(static_cast<double>(rows[i].state_scalars) /
                                    static_cast<double>(rows[i - 1].state_scalars),
                                1.0 / doublings);
    lo = std::min(lo, per);
    hi = std::max(hi, per);
    state_ok = state_ok && per >= kDoublingLo && per <= kDoublingHi;
  }
  const auto& first = rows.front();
  const auto& last = rows.back();
  const double measured = last.median_round_ns / first.median_round_ns;
  const double predicted = last.predicted_cost / first.predicted_cost;
  const double factor = measured / predicted;
  const bool time_ok = factor <= kTimeFactor && factor >= 1.0 / kTimeFactor;
  report(8, state_ok && time_ok,
         fmt("state growth per doubling in [%.3f, %.3f] within [%.1f, %.1f]; time ratio "
             "M=%zu/M=%zu measured %.1f vs predicted %.1f (factor %.2f within %.0fx)",
             lo, hi, kDoublingLo, kDoublingHi, last.arms, first.arms, measured, predicted,
             factor, kTimeFactor));
}

void oracle_criterion() {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int agree = 0;
  const int cases = 100;
  for (int i = 0; i < cases; ++i) {
    const std::size_t M = 1 + gen() % 8;
    const std::size_t N = 1 + gen() % M;
    std::vector<SmallCellParams> params(M);
    for (auto& p : params) p = {0.5 + 3 * u(gen), 12 * u(gen), 2 * u(gen), 5 * u(gen)};
    const auto mode = (gen() % 2) ? ServiceCountMode::kPaperMax : ServiceCountMode::kPhysicalMin;
    Scenario s = default_scenario(M, mode, 1 + gen() % 20, gen() % 10);
    s.params = params;
    const std::size_t horizon = 1 + gen() % 3000;
    const std::uint64_t seed = gen();
    const auto oracle = exhaustive_best_subset(s, N, horizon, seed);
    const auto trace = utility_trace(s, horizon, seed);
    agree += oracle.best_subset == best_fixed_subset(trace, N);
  }
  report(9, agree == cases,
         fmt("exhaustive oracle equals best fixed subset in %d/%d fuzzed instances", agree,
             cases));
}

}  // namespace

int main() {
  smallcell_criteria();
  distribution_criterion();
  ucb_criterion();
  nonstationary_criterion();
  exp3_criterion();
  game_criterion();
  complexity_criterion();
  oracle_criterion();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
