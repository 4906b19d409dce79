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

#ifndef BANDITLAB_CONFIG_HPP_
#define BANDITLAB_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "banditlab/smallcell.hpp"

namespace banditlab {

enum class ExperimentKind {
  kSmallCell,
  kStochasticBench,
  kAdversarialBench,
  kGameCe,
  kComplexityBench,
};

ExperimentKind parse_experiment_kind(const std::string& name);
std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSmallCell;
  std::size_t arms = 6;  // M
  std::size_t plays = 3;  // N
  std::size_t horizon = 500000;
  std::size_t replications = 20;
  std::uint64_t seed = 1;

  // Empty selects the kind's default policy.
  std::string policy;
  std::optional<double> gamma;
  double discount = 0.99;
  std::size_t window = 1000;
  double ph_lambda = 50.0;
  double ph_delta = 0.005;

  // Small-cell scenario.
  ServiceCountMode mode = ServiceCountMode::kPaperMax;
  std::string process = "uniform-iid";
  std::int64_t energy_max = 10;
  std::int64_t users_max = 6;
  std::vector<Regime> regimes;
  std::string trace_path;
  // Per-cell overrides; empty uses the default cell table.
  std::vector<SmallCellParams> cells;

  // Bernoulli bench instance. Empty arm_means puts best_mean on arm 0 and
  // other_mean on the rest. A nonzero change_round reverses the means there.
  std::vector<double> arm_means;
  double best_mean = 0.9;
  double other_mean = 0.6;
  std::size_t change_round = 0;

  std::string game = "chicken";

  std::vector<std::size_t> m_sweep = {8, 32, 128, 512, 2048};
  std::size_t bench_rounds = 20000;
  std::vector<std::pair<std::size_t, std::size_t>> sweep_pairs = {{8, 4}, {6, 3}, {4, 2}};

  std::filesystem::path out_dir = "out";
  std::size_t trace_stride = 100;
  std::size_t tail_window = 100000;
  double convergence_tolerance = 0.05;
  bool plot = false;
  // 0 reads BANDITLAB_THREADS, falling back to the hardware count.
  std::size_t threads = 0;

  std::string resolved_policy() const;
  void validate() const;
};

// Applies one key = value setting; unknown keys are a ConfigError.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

// Flat "key = value" lines ('#' comments), or a flat JSON object when the
// text starts with '{'.
void apply_config_text(ExperimentConfig& config, const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::size_t resolve_thread_count(const ExperimentConfig& config);

// Builds the configured scenario (default cells, overrides, process, trace).
Scenario build_scenario(const ExperimentConfig& config);

}  // namespace banditlab

#endif  // BANDITLAB_CONFIG_HPP_
