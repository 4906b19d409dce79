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

#include "banditlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "banditlab/adversarial.hpp"
#include "banditlab/errors.hpp"
#include "banditlab/game.hpp"
#include "banditlab/smallcell.hpp"
#include "banditlab/stochastic.hpp"

namespace banditlab {
namespace {

using Clock = std::chrono::steady_clock;

// Rounds per timing batch.
constexpr std::size_t kTimingBatch = 1024;

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

template <typename T>
std::string opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return num(*v);
  } else {
    return std::to_string(*v);
  }
}

class BatchTimer {
 public:
  void tick(std::size_t round) {
    if (round % kTimingBatch == 0) {
      const auto now = Clock::now();
      if (round > 0) {
        samples_.push_back(
            std::chrono::duration<double, std::nano>(now - start_).count() / kTimingBatch);
      }
      start_ = now;
    }
  }
  TimingStats stats() const {
    TimingStats out;
    if (samples_.empty()) return out;
    std::vector<double> s = samples_;
    std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(s.size() / 2), s.end());
    out.median_round_ns = s[s.size() / 2];
    out.mean_round_ns = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    return out;
  }

 private:
  Clock::time_point start_;
  std::vector<double> samples_;
};

void record_series(const ExperimentConfig& config, std::size_t t, std::size_t action_id,
                   double reward, double cum, ReplicationSummary& rep) {
  const std::size_t round = t + 1;
  if (round % config.trace_stride == 0 || round == 1 || round == config.horizon) {
    rep.series.push_back({round, action_id + 1, reward, cum, cum / static_cast<double>(round)});
  }
}

double swap_agent_gamma(const ExperimentConfig& config, std::size_t actions) {
  if (config.gamma) return *config.gamma;
  return default_gamma(actions, 1, config.horizon);
}

ReplicationSummary run_smallcell(const ExperimentConfig& config, const Scenario& scenario,
                                 std::size_t r) {
  ReplicationSummary rep;
  rep.replication = r;
  rep.seed = replication_seed(config.seed, r);
  rep.rounds = config.horizon;
  const std::uint64_t env_seed = environment_seed(rep.seed);
  const std::size_t M = scenario.num_cells();
  const std::size_t N = config.plays;
  const SubsetIndexer indexer(M, N);

  const OracleResult oracle = exhaustive_best_subset(scenario, N, config.horizon, env_seed);
  rep.oracle_avg_utility = oracle.best_avg_utility;
  rep.oracle_action = oracle.best_rank;
  rep.oracle_per_subset_avg = oracle.per_subset_avg;

  auto policy = make_policy(config, M, N, &oracle.best_subset);
  Rng rng(policy_seed(rep.seed));
  const RewardBounds bounds = utility_bounds(scenario).arm;
  std::vector<CellSnapshot> snaps(M);
  std::vector<double> utils(M);
  std::vector<double> rewards01(N);
  rep.action_counts.assign(indexer.count(), 0);
  rep.tail_action_counts.assign(indexer.count(), 0);
  const std::size_t tail_start =
      config.horizon > config.tail_window ? config.horizon - config.tail_window : 0;
  const double oracle_avg = oracle.best_avg_utility;
  std::optional<std::size_t> last_outside;
  double cum = 0.0;
  BatchTimer timer;
  for (std::size_t t = 0; t < config.horizon; ++t) {
    timer.tick(t);
    generate_round(scenario, t, env_seed, snaps);
    for (std::size_t m = 0; m < M; ++m) {
      utils[m] = cell_utility(snaps[m], scenario.params[m], scenario.mode);
    }
    const Selection& sel = policy->select(rng);
    double reward = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      reward += utils[sel.arms[i]];
      rewards01[i] = normalize_reward(utils[sel.arms[i]], bounds);
    }
    const std::size_t rank = indexer.rank(sel.arms);
    policy->observe(sel.arms, rewards01);
    cum += reward;
    ++rep.action_counts[rank];
    if (t >= tail_start) ++rep.tail_action_counts[rank];
    const double running = cum / static_cast<double>(t + 1);
    if (relative_gap(running, oracle_avg) >= config.convergence_tolerance) last_outside = t;
    record_series(config, t, rank, reward, cum, rep);
  }
  rep.timing = timer.stats();
  rep.cum_reward = cum;
  rep.final_avg_utility = cum / static_cast<double>(config.horizon);
  rep.regret = oracle_avg * static_cast<double>(config.horizon) - cum;
  if (!last_outside) {
    rep.settle_round = 1;
  } else if (*last_outside + 1 < config.horizon) {
    rep.settle_round = *last_outside + 2;
  }
  return rep;
}

std::vector<double> bench_means(const ExperimentConfig& config) {
  if (!config.arm_means.empty()) return config.arm_means;
  std::vector<double> means(config.arms, config.other_mean);
  means[0] = config.best_mean;
  return means;
}

ReplicationSummary run_bernoulli(const ExperimentConfig& config, std::size_t r) {
  ReplicationSummary rep;
  rep.replication = r;
  rep.seed = replication_seed(config.seed, r);
  rep.rounds = config.horizon;
  const std::uint64_t env_seed = environment_seed(rep.seed);
  const std::vector<double> base = bench_means(config);
  std::vector<double> swapped(base.rbegin(), base.rend());
  const std::size_t M = base.size();
  const std::size_t N = config.plays;
  const SubsetIndexer indexer(M, N);
  auto policy = make_policy(config, M, N);
  Rng rng(policy_seed(rep.seed));

  auto top_sum = [N](std::vector<double> v) {
    std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(N), v.end(),
                      std::greater<>());
    return std::accumulate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(N), 0.0);
  };
  const double best_base = top_sum(base);
  const double best_swapped = top_sum(swapped);

  std::vector<double> rewards(M);
  std::vector<double> chosen(N);
  std::vector<double> arm_sums(M, 0.0);
  rep.action_counts.assign(indexer.count(), 0);
  rep.tail_action_counts.assign(indexer.count(), 0);
  const std::size_t tail_start =
      config.horizon > config.tail_window ? config.horizon - config.tail_window : 0;
  double cum = 0.0;
  double pseudo = 0.0;
  BatchTimer timer;
  for (std::size_t t = 0; t < config.horizon; ++t) {
    timer.tick(t);
    const bool after = config.change_round > 0 && t >= config.change_round;
    const auto& means = after ? swapped : base;
    SplitMix64 engine(derive_seed(env_seed, t));
    for (std::size_t m = 0; m < M; ++m) {
      rewards[m] = bernoulli(engine, means[m]) ? 1.0 : 0.0;
      arm_sums[m] += rewards[m];
    }
    const Selection& sel = policy->select(rng);
    double reward = 0.0;
    double mean_reward = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      chosen[i] = rewards[sel.arms[i]];
      reward += chosen[i];
      mean_reward += means[sel.arms[i]];
    }
    const std::size_t rank = indexer.rank(sel.arms);
    policy->observe(sel.arms, chosen);
    cum += reward;
    pseudo += (after ? best_swapped : best_base) - mean_reward;
    ++rep.action_counts[rank];
    if (t >= tail_start) ++rep.tail_action_counts[rank];
    record_series(config, t, rank, reward, cum, rep);
  }
  rep.timing = timer.stats();
  rep.cum_reward = cum;
  rep.final_avg_utility = cum / static_cast<double>(config.horizon);
  rep.regret = top_sum(arm_sums) - cum;
  rep.pseudo_regret = pseudo;
  return rep;
}

ReplicationSummary run_game(const ExperimentConfig& config, const GameMatrix& game,
                            std::size_t r) {
  ReplicationSummary rep;
  rep.replication = r;
  rep.seed = replication_seed(config.seed, r);
  rep.rounds = config.horizon;
  std::vector<std::unique_ptr<Policy>> owned;
  std::vector<Policy*> agents;
  for (std::size_t k = 0; k < game.num_players(); ++k) {
    ExperimentConfig per_player = config;
    owned.push_back(make_policy(per_player, game.num_actions(k), 1));
    agents.push_back(owned.back().get());
  }
  Rng rng(policy_seed(rep.seed));
  const auto start = Clock::now();
  GameResult result = play_game(game, agents, config.horizon, rng);
  const double elapsed =
      std::chrono::duration<double, std::nano>(Clock::now() - start).count();
  rep.timing.median_round_ns = rep.timing.mean_round_ns =
      elapsed / static_cast<double>(config.horizon);

  rep.ce_gap = ce_gap(result.histogram, game);
  double worst_internal = 0.0;
  double worst_external = -std::numeric_limits<double>::infinity();
  for (const auto& player : result.players) {
    worst_internal = std::max(worst_internal, internal_regret(player.ledger, player.counterfactual));
    worst_external = std::max(worst_external, external_regret(player.counterfactual, player.ledger));
  }
  rep.max_internal_regret_per_round = worst_internal / static_cast<double>(config.horizon);
  rep.regret = worst_external;
  rep.action_counts.assign(result.histogram.counts().begin(), result.histogram.counts().end());
  rep.tail_action_counts.assign(game.num_profiles(), 0);
  const std::size_t tail_start =
      config.horizon > config.tail_window ? config.horizon - config.tail_window : 0;
  const auto received = result.players[0].ledger.received();
  double cum = 0.0;
  for (std::size_t t = 0; t < config.horizon; ++t) {
    const std::size_t profile = result.profile_sequence[t];
    if (t >= tail_start) ++rep.tail_action_counts[profile];
    cum += received[t];
    record_series(config, t, profile, received[t], cum, rep);
  }
  rep.cum_reward = cum;
  rep.final_avg_utility = cum / static_cast<double>(config.horizon);
  return rep;
}

template <typename Fn>
std::vector<ReplicationSummary> run_replications(const ExperimentConfig& config, Fn&& fn) {
  std::vector<ReplicationSummary> reps(config.replications);
  const std::size_t threads = std::min(resolve_thread_count(config), config.replications);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < config.replications; r = next++) {
      try {
        reps[r] = fn(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return reps;
}

std::vector<std::string> profile_labels(const GameMatrix& game) {
  std::vector<std::string> labels;
  for (std::size_t p = 0; p < game.num_profiles(); ++p) {
    std::string s;
    for (ArmIndex a : game.profile(p)) {
      if (!s.empty()) s += ' ';
      s += std::to_string(a);
    }
    labels.push_back(s);
  }
  return labels;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string svg_chart(const std::vector<std::pair<double, double>>& policy,
                      double oracle, const std::string& title) {
  const double width = 640, height = 360, pad = 40;
  double xmax = 1, ylo = oracle, yhi = oracle;
  for (const auto& [x, y] : policy) {
    xmax = std::max(xmax, x);
    ylo = std::min(ylo, y);
    yhi = std::max(yhi, y);
  }
  if (yhi - ylo < 1e-12) yhi = ylo + 1.0;
  auto px = [&](double x) { return pad + (width - 2 * pad) * x / xmax; };
  auto py = [&](double y) { return height - pad - (height - 2 * pad) * (y - ylo) / (yhi - ylo); };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n"
      << "<text x=\"" << pad << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n"
      << "<line x1=\"" << pad << "\" y1=\"" << py(oracle) << "\" x2=\"" << width - pad
      << "\" y2=\"" << py(oracle) << "\" stroke=\"red\" stroke-dasharray=\"4\"/>\n"
      << "<polyline fill=\"none\" stroke=\"blue\" points=\"";
  for (const auto& [x, y] : policy) svg << num(px(x)) << ',' << num(py(y)) << ' ';
  svg << "\"/>\n</svg>\n";
  return svg.str();
}

}  // namespace

std::uint64_t replication_seed(std::uint64_t base, std::size_t replication) {
  return derive_seed(base, replication);
}
std::uint64_t environment_seed(std::uint64_t rep_seed) { return derive_seed(rep_seed, 1); }
std::uint64_t policy_seed(std::uint64_t rep_seed) { return derive_seed(rep_seed, 2); }

std::vector<std::size_t> RunSummary::histogram() const {
  std::vector<std::size_t> total(action_labels.size(), 0);
  for (const auto& rep : replications) {
    for (std::size_t a = 0; a < rep.action_counts.size() && a < total.size(); ++a) {
      total[a] += rep.action_counts[a];
    }
  }
  return total;
}

double relative_gap(double running_avg, double oracle_avg) {
  return std::abs(running_avg - oracle_avg) / std::max(std::abs(oracle_avg), kGapFloor);
}

ConvergenceReport compare_to_oracle(std::span<const double> running_avg, double oracle_avg,
                                    double tolerance) {
  ConvergenceReport report;
  if (running_avg.empty()) throw ArgumentError("compare_to_oracle: empty series");
  report.relative_gap = relative_gap(running_avg.back(), oracle_avg);
  std::optional<std::size_t> last_outside;
  for (std::size_t t = 0; t < running_avg.size(); ++t) {
    if (relative_gap(running_avg[t], oracle_avg) >= tolerance) last_outside = t;
  }
  if (!last_outside) {
    report.settle_round = 1;
  } else if (*last_outside + 1 < running_avg.size()) {
    report.settle_round = *last_outside + 2;
  }
  return report;
}

ConvergenceReport compare_to_oracle(const ReplicationSummary& rep) {
  if (!rep.oracle_avg_utility) {
    throw ArgumentError("compare_to_oracle: replication has no oracle");
  }
  return {relative_gap(rep.final_avg_utility, *rep.oracle_avg_utility), rep.settle_round};
}

std::pair<std::size_t, double> modal_action(std::span<const std::size_t> counts) {
  if (counts.empty()) return {0, 0.0};
  const auto it = std::max_element(counts.begin(), counts.end());
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  return {static_cast<std::size_t>(it - counts.begin()),
          total ? static_cast<double>(*it) / static_cast<double>(total) : 0.0};
}

std::unique_ptr<Policy> make_policy(const ExperimentConfig& config, std::size_t num_arms,
                                    std::size_t plays, const SubsetAction* oracle_subset) {
  const std::string name = config.resolved_policy();
  const bool single = plays == 1;
  auto need_single = [&] {
    if (!single) throw ConfigError("policy '" + name + "' plays one arm per round (N = 1)");
  };
  if (name == "exp3m") {
    return std::make_unique<Exp3mPolicy>(
        num_arms, plays, config.gamma.value_or(default_gamma(num_arms, plays, config.horizon)));
  }
  if (name == "uniform") return std::make_unique<UniformSubsetPolicy>(num_arms, plays);
  if (name == "oracle") {
    if (!oracle_subset) throw ConfigError("policy 'oracle' needs a small-cell scenario");
    return std::make_unique<FixedSubsetPolicy>(num_arms, *oracle_subset);
  }
  if (name == "exp3") {
    need_single();
    return std::make_unique<Exp3Policy>(
        num_arms, config.gamma.value_or(default_gamma(num_arms, 1, config.horizon)));
  }
  if (name == "ucb1") {
    need_single();
    return std::make_unique<Ucb1Policy>(num_arms);
  }
  if (name == "discounted-ucb") {
    need_single();
    return std::make_unique<DiscountedUcbPolicy>(num_arms, config.discount);
  }
  if (name == "sw-ucb") {
    need_single();
    return std::make_unique<SlidingWindowUcbPolicy>(num_arms, config.window);
  }
  if (name == "ph-ucb") {
    need_single();
    return std::make_unique<PageHinkleyUcbPolicy>(num_arms, config.ph_lambda, config.ph_delta);
  }
  if (name == "swap-exp3") {
    need_single();
    return std::make_unique<SwapRegretAgent>(num_arms, swap_agent_gamma(config, num_arms));
  }
  throw ConfigError("unknown policy '" + name + "'");
}

RunSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  RunSummary summary;
  summary.config = config;
  switch (config.kind) {
    case ExperimentKind::kSmallCell: {
      const Scenario scenario = build_scenario(config);
      summary.action_labels = subset_labels(SubsetIndexer(config.arms, config.plays));
      if (binomial(config.arms, config.plays) > kMaxOracleSubsets) {
        throw ConfigError("C(M, N) too large for the exhaustive oracle");
      }
      summary.replications = run_replications(
          config, [&](std::size_t r) { return run_smallcell(config, scenario, r); });
      break;
    }
    case ExperimentKind::kStochasticBench:
    case ExperimentKind::kAdversarialBench: {
      const std::size_t M = bench_means(config).size();
      summary.action_labels = subset_labels(SubsetIndexer(M, config.plays));
      summary.replications =
          run_replications(config, [&](std::size_t r) { return run_bernoulli(config, r); });
      break;
    }
    case ExperimentKind::kGameCe: {
      const GameMatrix game = named_or_file_game(config.game);
      summary.action_labels = profile_labels(game);
      summary.replications =
          run_replications(config, [&](std::size_t r) { return run_game(config, game, r); });
      break;
    }
    case ExperimentKind::kComplexityBench:
      throw ConfigError("complexity-bench runs through bench_complexity");
  }
  return summary;
}

std::vector<std::string> subset_labels(const SubsetIndexer& indexer) {
  std::vector<std::string> labels;
  labels.reserve(indexer.count());
  for (const auto& s : indexer.all()) labels.push_back(to_string(s));
  return labels;
}

std::string emit_histogram(std::span<const std::size_t> counts,
                           std::span<const std::string> labels) {
  if (counts.size() != labels.size()) throw ArgumentError("histogram: labels do not match counts");
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  std::ostringstream out;
  out << "action_id,members,count,fraction\n";
  for (std::size_t a = 0; a < counts.size(); ++a) {
    const double fraction =
        total ? static_cast<double>(counts[a]) / static_cast<double>(total) : 0.0;
    out << a + 1 << ',' << labels[a] << ',' << counts[a] << ',' << num(fraction) << '\n';
  }
  return out.str();
}

std::string emit_histogram(const RegretLedger& ledger, const SubsetIndexer& indexer) {
  if (ledger.plays_per_round() != indexer.subset_size() ||
      ledger.num_arms() != indexer.num_arms()) {
    throw ArgumentError("histogram: ledger does not match the subset indexer");
  }
  std::vector<std::size_t> counts(indexer.count(), 0);
  std::vector<ArmIndex> sorted;
  for (std::size_t t = 0; t < ledger.rounds(); ++t) {
    const auto c = ledger.choices(t);
    sorted.assign(c.begin(), c.end());
    std::sort(sorted.begin(), sorted.end());
    ++counts[indexer.rank(sorted)];
  }
  const auto labels = subset_labels(indexer);
  return emit_histogram(counts, labels);
}

std::string emit_oracle_table(const ExperimentConfig& config, std::size_t replication) {
  config.validate();
  const Scenario scenario = build_scenario(config);
  const auto env = environment_seed(replication_seed(config.seed, replication));
  const OracleResult oracle = exhaustive_best_subset(scenario, config.plays, config.horizon, env);
  std::ostringstream out;
  out << "action_id,members,avg_utility,best\n";
  for (std::size_t s = 0; s < oracle.subsets.size(); ++s) {
    out << s + 1 << ',' << to_string(oracle.subsets[s]) << ',' << num(oracle.per_subset_avg[s])
        << ',' << (s == oracle.best_rank ? 1 : 0) << '\n';
  }
  return out.str();
}

void write_outputs(const RunSummary& summary, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::ostringstream per_round;
  per_round << "round,replication,action_id,reward,cum_reward,running_avg_utility\n";
  for (const auto& rep : summary.replications) {
    for (const auto& p : rep.series) {
      per_round << p.round << ',' << rep.replication << ',' << p.action_id << ','
                << num(p.reward) << ',' << num(p.cum_reward) << ',' << num(p.running_avg)
                << '\n';
    }
  }
  write_file(dir / "per_round.csv", per_round.str());

  std::ostringstream sum;
  sum << "replication,seed,rounds,cum_reward,final_avg_utility,oracle_avg_utility,"
         "relative_gap,settle_round,regret,pseudo_regret,modal_action_id,modal_fraction,"
         "tail_modal_action_id,tail_modal_fraction,oracle_action_id,ce_gap,"
         "max_internal_regret_per_round\n";
  for (const auto& rep : summary.replications) {
    const auto [modal, modal_frac] = modal_action(rep.action_counts);
    const auto [tail, tail_frac] = modal_action(rep.tail_action_counts);
    std::optional<double> gap;
    if (rep.oracle_avg_utility) gap = relative_gap(rep.final_avg_utility, *rep.oracle_avg_utility);
    std::optional<std::size_t> oracle_id;
    if (rep.oracle_action) oracle_id = *rep.oracle_action + 1;
    sum << rep.replication << ',' << rep.seed << ',' << rep.rounds << ',' << num(rep.cum_reward)
        << ',' << num(rep.final_avg_utility) << ',' << opt(rep.oracle_avg_utility) << ','
        << opt(gap) << ',' << opt(rep.settle_round) << ',' << num(rep.regret) << ','
        << opt(rep.pseudo_regret) << ',' << modal + 1 << ',' << num(modal_frac) << ','
        << tail + 1 << ',' << num(tail_frac) << ',' << opt(oracle_id) << ','
        << opt(rep.ce_gap) << ',' << opt(rep.max_internal_regret_per_round) << '\n';
  }
  write_file(dir / "summary.csv", sum.str());

  write_file(dir / "histogram.csv", emit_histogram(summary.histogram(), summary.action_labels));

  std::ostringstream timing;
  timing << "replication,median_round_ns,mean_round_ns\n";
  for (const auto& rep : summary.replications) {
    timing << rep.replication << ',' << num(rep.timing.median_round_ns) << ','
           << num(rep.timing.mean_round_ns) << '\n';
  }
  write_file(dir / "timing.csv", timing.str());

  if (summary.config.kind == ExperimentKind::kSmallCell && !summary.replications.empty()) {
    // Series points share rounds across replications, so average pointwise.
    const auto& first = summary.replications.front().series;
    double oracle_mean = 0.0;
    for (const auto& rep : summary.replications) oracle_mean += *rep.oracle_avg_utility;
    oracle_mean /= static_cast<double>(summary.replications.size());
    std::ostringstream cmp;
    cmp << "round,running_avg_utility,oracle_avg_utility\n";
    std::vector<std::pair<double, double>> curve;
    for (std::size_t i = 0; i < first.size(); ++i) {
      double mean = 0.0;
      for (const auto& rep : summary.replications) mean += rep.series[i].running_avg;
      mean /= static_cast<double>(summary.replications.size());
      cmp << first[i].round << ',' << num(mean) << ',' << num(oracle_mean) << '\n';
      curve.emplace_back(static_cast<double>(first[i].round), mean);
    }
    write_file(dir / "oracle_comparison.csv", cmp.str());
    if (summary.config.plot) {
      std::ostringstream title;
      title << "average utility vs oracle, M=" << summary.config.arms
            << " N=" << summary.config.plays;
      write_file(dir / "plot.svg", svg_chart(curve, oracle_mean, title.str()));
    }
  }
}

std::vector<ComplexityRow> bench_complexity(const ExperimentConfig& config) {
  std::vector<ComplexityRow> rows;
  constexpr std::size_t kBatches = 15;
  for (std::size_t M : config.m_sweep) {
    const std::size_t N = std::max<std::size_t>(1, M / 2);
    const std::size_t rounds = std::max<std::size_t>(kBatches * 4, config.bench_rounds);
    const double gamma = config.gamma.value_or(default_gamma(M, N, rounds));
    Exp3mPolicy policy(M, N, gamma);
    Rng rng(derive_seed(config.seed, M));
    std::vector<double> means(M);
    for (std::size_t m = 0; m < M; ++m) {
      means[m] = 0.2 + 0.6 * static_cast<double>(m) / static_cast<double>(M);
    }
    std::vector<double> rewards(N);
    auto step = [&] {
      const Selection& sel = policy.select(rng);
      for (std::size_t i = 0; i < N; ++i) {
        rewards[i] = bernoulli(rng, means[sel.arms[i]]) ? 1.0 : 0.0;
      }
      policy.observe(sel.arms, rewards);
    };
    const std::size_t per_batch = rounds / kBatches;
    for (std::size_t i = 0; i < per_batch; ++i) step();  // warm-up
    std::vector<double> batch_ns;
    for (std::size_t b = 0; b < kBatches; ++b) {
      const auto start = Clock::now();
      for (std::size_t i = 0; i < per_batch; ++i) step();
      batch_ns.push_back(std::chrono::duration<double, std::nano>(Clock::now() - start).count() /
                         static_cast<double>(per_batch));
    }
    std::nth_element(batch_ns.begin(), batch_ns.begin() + kBatches / 2, batch_ns.end());
    rows.push_back({M, N, policy.state_scalars(), policy.state_bytes(), batch_ns[kBatches / 2],
                    static_cast<double>(M) * (std::log2(static_cast<double>(N)) + 1.0)});
  }
  return rows;
}

std::string format_complexity(std::span<const ComplexityRow> rows) {
  std::ostringstream out;
  out << "M,N,state_scalars,state_bytes,median_round_ns,predicted_cost\n";
  for (const auto& r : rows) {
    out << r.arms << ',' << r.plays << ',' << r.state_scalars << ',' << r.state_bytes << ','
        << num(r.median_round_ns) << ',' << num(r.predicted_cost) << '\n';
  }
  return out.str();
}

std::vector<RunSummary> run_sweep(const ExperimentConfig& config) {
  std::vector<RunSummary> all;
  std::ostringstream table;
  table << "M,N,oracle_avg_utility,final_avg_utility,relative_gap,modal_is_oracle_fraction\n";
  for (const auto& [M, N] : config.sweep_pairs) {
    ExperimentConfig c = config;
    c.kind = ExperimentKind::kSmallCell;
    c.arms = M;
    c.plays = N;
    c.cells.clear();
    c.out_dir = config.out_dir / ("M" + std::to_string(M) + "_N" + std::to_string(N));
    RunSummary s = run_experiment(c);
    write_outputs(s, c.out_dir);
    double oracle = 0, final_avg = 0, hits = 0;
    for (const auto& rep : s.replications) {
      oracle += *rep.oracle_avg_utility;
      final_avg += rep.final_avg_utility;
      if (modal_action(rep.action_counts).first == *rep.oracle_action) hits += 1;
    }
    const double n = static_cast<double>(s.replications.size());
    table << M << ',' << N << ',' << num(oracle / n) << ',' << num(final_avg / n) << ','
          << num(relative_gap(final_avg / n, oracle / n)) << ',' << num(hits / n) << '\n';
    all.push_back(std::move(s));
  }
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.out_dir.string());
  write_file(config.out_dir / "sweep.csv", table.str());
  return all;
}

}  // namespace banditlab
