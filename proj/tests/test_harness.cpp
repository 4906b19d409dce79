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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "banditlab/adversarial.hpp"
#include "banditlab/config.hpp"
#include "banditlab/errors.hpp"
#include "banditlab/harness.hpp"
#include "doctest.h"

using namespace banditlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) row.push_back(field);
    if (!line.empty() && line.back() == ',') row.emplace_back();
    rows.push_back(row);
  }
  return rows;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("banditlab_test_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig small_run() {
  ExperimentConfig c;
  c.horizon = 3000;
  c.replications = 3;
  c.trace_stride = 1;
  c.tail_window = 1000;
  return c;
}

}  // namespace

TEST_CASE("config text parsing") {
  ExperimentConfig c;
  apply_config_text(c,
                    "# comment\n[run]\nkind = stochastic-bench\nM = 4\nN=1\n"
                    "horizon = 1000\npolicy = ucb1\ngamma = 0.2\narm_means = 0.1, 0.5, 0.2, 0.3\n");
  CHECK(c.kind == ExperimentKind::kStochasticBench);
  CHECK(c.arms == 4);
  CHECK(c.horizon == 1000);
  CHECK(*c.gamma == 0.2);
  CHECK(c.arm_means.size() == 4);
  CHECK_NOTHROW(c.validate());

  ExperimentConfig j;
  apply_config_text(j, R"({"kind": "smallcell", "M": 8, "N": 4, "mode": "physical-min",
                           "cells": "2:6:1:3;2:10:1:3", "regimes": "100:5:3"})");
  CHECK(j.arms == 8);
  CHECK(j.mode == ServiceCountMode::kPhysicalMin);
  CHECK(j.cells.size() == 2);
  CHECK(j.regimes.size() == 1);

  ExperimentConfig bad;
  CHECK_THROWS_AS(apply_config_text(bad, "nonsense_key = 3\n"), ConfigError);
  CHECK_THROWS_AS(apply_config_text(bad, "M = -3\n"), ConfigError);
  CHECK_THROWS_AS(apply_config_text(bad, "just words\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/banditlab.cfg"), IoError);
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  c.plays = 7;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.horizon = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.replications = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.policy = "greedy";
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.game = "no-such-game";
  c.kind = ExperimentKind::kGameCe;
  CHECK_THROWS(run_experiment(c));
}

TEST_CASE("thread count from the environment") {
  ExperimentConfig c;
  c.threads = 3;
  CHECK(resolve_thread_count(c) == 3);
  c.threads = 0;
  setenv("BANDITLAB_THREADS", "2", 1);
  CHECK(resolve_thread_count(c) == 2);
  unsetenv("BANDITLAB_THREADS");
  CHECK(resolve_thread_count(c) >= 1);
}

TEST_CASE("same config and seed give byte-identical CSVs") {
  auto c = small_run();
  const auto a = scratch("det_a"), b = scratch("det_b");
  setenv("BANDITLAB_THREADS", "1", 1);
  write_outputs(run_experiment(c), a);
  setenv("BANDITLAB_THREADS", "3", 1);
  write_outputs(run_experiment(c), b);
  unsetenv("BANDITLAB_THREADS");
  for (const char* f : {"per_round.csv", "summary.csv", "histogram.csv", "oracle_comparison.csv"}) {
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    CHECK(!slurp(a / f).empty());
  }
  c.seed = 2;
  const auto d = scratch("det_d");
  write_outputs(run_experiment(c), d);
  CHECK(slurp(a / "per_round.csv") != slurp(d / "per_round.csv"));
}

TEST_CASE("csv contents are consistent") {
  const auto c = small_run();
  const auto dir = scratch("csv");
  const auto s = run_experiment(c);
  write_outputs(s, dir);

  const auto hist = read_csv(dir / "histogram.csv");
  REQUIRE(hist.size() == 21);
  CHECK(hist[0] == std::vector<std::string>{"action_id", "members", "count", "fraction"});
  double frac = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 1; i < hist.size(); ++i) {
    CHECK(std::stoul(hist[i][0]) == i);
    frac += std::stod(hist[i][3]);
    count += std::stoul(hist[i][2]);
  }
  CHECK(std::abs(frac - 1.0) <= 1e-9);
  CHECK(count == c.horizon * c.replications);
  CHECK(hist[1][1] == "0 1 2");
  CHECK(hist[20][1] == "3 4 5");

  const auto rows = read_csv(dir / "per_round.csv");
  CHECK(rows[0] == std::vector<std::string>{"round", "replication", "action_id", "reward",
                                            "cum_reward", "running_avg_utility"});
  REQUIRE(rows.size() == 1 + c.horizon * c.replications);
  // Running means recomputed from the raw reward column.
  double cum = 0.0;
  std::size_t rep = 0;
  std::vector<std::size_t> counts(20, 0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto r = std::stoul(rows[i][1]);
    if (r != rep) {
      rep = r;
      cum = 0.0;
    }
    cum += std::stod(rows[i][3]);
    const double t = std::stod(rows[i][0]);
    CHECK(std::stod(rows[i][4]) == doctest::Approx(cum));
    CHECK(std::stod(rows[i][5]) == doctest::Approx(cum / t));
    ++counts[std::stoul(rows[i][2]) - 1];
  }
  for (std::size_t a = 0; a < 20; ++a) CHECK(counts[a] == std::stoul(hist[a + 1][2]));

  const auto sum = read_csv(dir / "summary.csv");
  CHECK(sum.size() == 1 + c.replications);
  CHECK(sum[0][0] == "replication");
}

TEST_CASE("histogram emission") {
  SUBCASE("one round gives one row with fraction 1") {
    RegretLedger ledger(1, 1, false);
    const ArmIndex a[] = {0};
    ledger.record(a, 1.0);
    CHECK(emit_histogram(ledger, SubsetIndexer(1, 1)) ==
          "action_id,members,count,fraction\n1,0,1,1\n");
  }
  SUBCASE("ledger counts match") {
    RegretLedger ledger(4, 2, false);
    const ArmIndex a[] = {3, 1};
    const ArmIndex b[] = {0, 1};
    ledger.record(a, 1.0);
    ledger.record(a, 1.0);
    ledger.record(b, 1.0);
    const auto text = emit_histogram(ledger, SubsetIndexer(4, 2));
    CHECK(text.find("1,0 1,1,") != std::string::npos);
    CHECK(text.find("5,1 3,2,") != std::string::npos);
  }
  SUBCASE("uniform policy fractions within multinomial bounds") {
    auto c = small_run();
    c.policy = "uniform";
    c.horizon = 100000;
    c.replications = 1;
    c.trace_stride = 1000;
    const auto s = run_experiment(c);
    const auto counts = s.histogram();
    REQUIRE(counts.size() == 20);
    const double sigma = std::sqrt(0.05 * 0.95 / 1e5);
    for (std::size_t n : counts) CHECK(std::abs(n / 1e5 - 0.05) <= 3 * sigma);
  }
}

TEST_CASE("compare to oracle") {
  SUBCASE("forced oracle policy has zero gap") {
    auto c = small_run();
    c.policy = "oracle";
    for (const auto& rep : run_experiment(c).replications) {
      CHECK(compare_to_oracle(rep).relative_gap == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(modal_action(rep.action_counts).first == *rep.oracle_action);
    }
  }
  SUBCASE("uniform policy gap matches the subset table") {
    auto c = small_run();
    c.policy = "uniform";
    c.horizon = 200000;
    c.replications = 1;
    c.trace_stride = 1000;
    const auto rep = run_experiment(c).replications[0];
    const auto& table = rep.oracle_per_subset_avg;
    const double population = std::accumulate(table.begin(), table.end(), 0.0) / table.size();
    const double expected = (*rep.oracle_avg_utility - population) / *rep.oracle_avg_utility;
    CHECK(compare_to_oracle(rep).relative_gap == doctest::Approx(expected).epsilon(0.02));
  }
  SUBCASE("settle round and epsilon floor") {
    const std::vector<double> series = {0.0, 0.5, 0.97, 1.02, 0.99};
    const auto r = compare_to_oracle(series, 1.0, 0.05);
    CHECK(r.settle_round == 3);
    CHECK(r.relative_gap == doctest::Approx(0.01));
    const std::vector<double> zero = {0.0};
    CHECK(compare_to_oracle(zero, 0.0).relative_gap == 0.0);
    const std::vector<double> away = {0.2, 0.0, 0.4};
    CHECK_FALSE(compare_to_oracle(away, 1.0).settle_round.has_value());
    CHECK(relative_gap(1e-10, 0.0) == doctest::Approx(0.1));
  }
}

TEST_CASE("complexity bench") {
  ExperimentConfig c;
  c.kind = ExperimentKind::kComplexityBench;
  c.m_sweep = {16};
  c.bench_rounds = 300;
  const auto one = bench_complexity(c);
  CHECK(one.size() == 1);
  CHECK(one[0].plays == 8);
  c.m_sweep = {8, 16, 32, 64};
  const auto rows = bench_complexity(c);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ratio = double(rows[i].state_scalars) / rows[i - 1].state_scalars;
    CHECK(ratio >= 1.8);
    CHECK(ratio <= 2.2);
  }
  const auto table = format_complexity(rows);
  CHECK(table.rfind("M,N,state_scalars,state_bytes,median_round_ns,predicted_cost\n", 0) == 0);
}

TEST_CASE("bernoulli and game kinds run") {
  ExperimentConfig c;
  c.kind = ExperimentKind::kStochasticBench;
  c.arms = 2;
  c.plays = 1;
  c.horizon = 2000;
  c.replications = 2;
  c.policy = "sw-ucb";
  c.change_round = 1000;
  const auto s = run_experiment(c);
  CHECK(s.replications.size() == 2);
  CHECK(s.replications[0].pseudo_regret.has_value());

  ExperimentConfig g;
  g.kind = ExperimentKind::kGameCe;
  g.game = "shapley";
  g.horizon = 2000;
  g.replications = 2;
  const auto gs = run_experiment(g);
  CHECK(gs.action_labels.size() == 9);
  CHECK(gs.replications[0].ce_gap.has_value());
  const auto dir = scratch("game");
  write_outputs(gs, dir);
  CHECK(fs::exists(dir / "summary.csv"));

  c.policy = "exp3";
  c.plays = 2;
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
}

TEST_CASE("sweep and plot output") {
  ExperimentConfig c;
  c.horizon = 500;
  c.replications = 1;
  c.plot = true;
  c.sweep_pairs = {{4, 2}, {5, 2}};
  c.out_dir = scratch("sweep");
  const auto all = run_sweep(c);
  CHECK(all.size() == 2);
  CHECK(fs::exists(c.out_dir / "sweep.csv"));
  CHECK(fs::exists(c.out_dir / "M4_N2" / "plot.svg"));
  CHECK(read_csv(c.out_dir / "M5_N2" / "histogram.csv").size() == 11);
}

TEST_CASE("cli oracle table and config file") {
  const auto dir = scratch("cli");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "M = 4\nN = 2\nhorizon = 200\nreplications = 1\n";
  }
  const std::string cmd = std::string(BANDITLAB_CLI) + " oracle --config " +
                          (dir / "run.cfg").string() + " --out " + dir.string() +
                          " > " + (dir / "stdout.txt").string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  const auto table = read_csv(dir / "oracle.csv");
  CHECK(table.size() == 7);
  CHECK(slurp(dir / "stdout.txt") == slurp(dir / "oracle.csv"));
}
