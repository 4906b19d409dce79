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

// Seeded experiment runner. Each replication derives its own streams from
// (base seed, replication index): one for the environment, one for the
// policy. The small-cell oracle replays the environment stream, so it sees
// exactly the snapshots the policy saw.

#ifndef BANDITLAB_HARNESS_HPP_
#define BANDITLAB_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "banditlab/config.hpp"
#include "banditlab/core.hpp"

namespace banditlab {

struct SeriesPoint {
  std::size_t round = 0;  // 1-based
  std::size_t action_id = 0;  // 1-based, lexicographic subset order
  double reward = 0.0;
  double cum_reward = 0.0;
  double running_avg = 0.0;
};

struct TimingStats {
  double median_round_ns = 0.0;
  double mean_round_ns = 0.0;
};

struct ReplicationSummary {
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  std::size_t rounds = 0;
  double cum_reward = 0.0;
  double final_avg_utility = 0.0;

  // Small-cell only.
  std::optional<double> oracle_avg_utility;
  std::optional<std::size_t> oracle_action;  // zero-based rank
  std::vector<double> oracle_per_subset_avg;
  std::optional<std::size_t> settle_round;  // 1-based

  // Realized regret against the best fixed arm or subset in hindsight.
  double regret = 0.0;
  // Bernoulli benches: regret against the per-round best means.
  std::optional<double> pseudo_regret;

  // Game runs.
  std::optional<double> ce_gap;
  std::optional<double> max_internal_regret_per_round;

  std::vector<std::size_t> action_counts;
  std::vector<std::size_t> tail_action_counts;
  std::vector<SeriesPoint> series;
  TimingStats timing;
};

struct RunSummary {
  ExperimentConfig config;
  std::vector<std::string> action_labels;
  std::vector<ReplicationSummary> replications;

  // Action counts summed over replications.
  std::vector<std::size_t> histogram() const;
};

struct ConvergenceReport {
  double relative_gap = 0.0;
  // First 1-based round from which the gap stays below the tolerance.
  std::optional<std::size_t> settle_round;
};

inline constexpr double kGapFloor = 1e-9;

double relative_gap(double running_avg, double oracle_avg);

ConvergenceReport compare_to_oracle(std::span<const double> running_avg, double oracle_avg,
                                    double tolerance = 0.05);
ConvergenceReport compare_to_oracle(const ReplicationSummary& replication);

// Most played action (lowest id on ties) and its share.
std::pair<std::size_t, double> modal_action(std::span<const std::size_t> counts);

std::unique_ptr<Policy> make_policy(const ExperimentConfig& config, std::size_t num_arms,
                                    std::size_t plays,
                                    const SubsetAction* oracle_subset = nullptr);

RunSummary run_experiment(const ExperimentConfig& config);

// Writes per_round.csv, summary.csv, histogram.csv, timing.csv and, for
// small-cell runs, oracle_comparison.csv (plus plot.svg when enabled).
void write_outputs(const RunSummary& summary, const std::filesystem::path& dir);

// CSV rows "action_id,members,count,fraction".
std::string emit_histogram(std::span<const std::size_t> counts,
                           std::span<const std::string> labels);
std::string emit_histogram(const RegretLedger& ledger, const SubsetIndexer& indexer);

std::vector<std::string> subset_labels(const SubsetIndexer& indexer);

// Every C(M, N) subset's average utility on replication `replication`'s
// snapshot stream, as CSV "action_id,members,avg_utility,best".
std::string emit_oracle_table(const ExperimentConfig& config, std::size_t replication);

struct ComplexityRow {
  std::size_t arms = 0;
  std::size_t plays = 0;
  std::size_t state_scalars = 0;
  std::size_t state_bytes = 0;
  double median_round_ns = 0.0;
  double predicted_cost = 0.0;  // M (log2 N + 1)
};

std::vector<ComplexityRow> bench_complexity(const ExperimentConfig& config);
std::string format_complexity(std::span<const ComplexityRow> rows);

// Runs the small-cell experiment for every (M, N) in config.sweep_pairs into
// out_dir/M<m>_N<n>/ and writes out_dir/sweep.csv.
std::vector<RunSummary> run_sweep(const ExperimentConfig& config);

// Seeds used by replication r.
std::uint64_t replication_seed(std::uint64_t base, std::size_t replication);
std::uint64_t environment_seed(std::uint64_t replication_seed);
std::uint64_t policy_seed(std::uint64_t replication_seed);

}  // namespace banditlab

#endif  // BANDITLAB_HARNESS_HPP_
