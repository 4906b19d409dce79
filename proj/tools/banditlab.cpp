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

// banditlab command line: run, oracle, bench, game, sweep.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "banditlab/config.hpp"
#include "banditlab/errors.hpp"
#include "banditlab/harness.hpp"

namespace {

using namespace banditlab;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> replications;
  std::optional<std::string> policy;
  std::optional<double> gamma;
  std::optional<std::string> mode;
  std::optional<std::size_t> arms;
  std::optional<std::size_t> plays;
  std::optional<std::size_t> horizon;
  std::optional<std::string> game;
  std::vector<std::string> settings;
  bool plot = false;
  std::size_t replication_index = 0;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "Config file (key = value lines or flat JSON)");
  app->add_option("--seed", o.seed, "Base seed");
  app->add_option("--out", o.out, "Output directory");
  app->add_option("--replications", o.replications, "Number of replications");
  app->add_option("--policy", o.policy, "Policy name");
  app->add_option("--gamma", o.gamma, "Exploration rate");
  app->add_option("--mode", o.mode, "Service count mode")
      ->check(CLI::IsMember({"paper-max", "physical-min"}));
  app->add_option("-M,--arms", o.arms, "Number of arms (cells)");
  app->add_option("-N,--plays", o.plays, "Arms played per round");
  app->add_option("-T,--horizon", o.horizon, "Rounds per replication");
  app->add_option("--set", o.settings, "Extra key=value setting (repeatable)");
}

ExperimentConfig build_config(const Overrides& o, std::optional<ExperimentKind> kind) {
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (kind) c.kind = *kind;
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out_dir = *o.out;
  if (o.replications) c.replications = *o.replications;
  if (o.policy) c.policy = *o.policy;
  if (o.gamma) c.gamma = *o.gamma;
  if (o.mode) c.mode = parse_service_mode(*o.mode);
  if (o.arms) c.arms = *o.arms;
  if (o.plays) c.plays = *o.plays;
  if (o.horizon) c.horizon = *o.horizon;
  if (o.game) c.game = *o.game;
  if (o.plot) c.plot = true;
  c.validate();
  return c;
}

void write_text(const std::filesystem::path& dir, const std::string& name,
                const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  std::ofstream out(dir / name, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + (dir / name).string());
}

void print_run(const RunSummary& s) {
  double final_avg = 0.0, oracle = 0.0, ce = 0.0, internal = 0.0;
  for (const auto& rep : s.replications) {
    final_avg += rep.final_avg_utility;
    if (rep.oracle_avg_utility) oracle += *rep.oracle_avg_utility;
    if (rep.ce_gap) ce = std::max(ce, *rep.ce_gap);
    if (rep.max_internal_regret_per_round) {
      internal = std::max(internal, *rep.max_internal_regret_per_round);
    }
  }
  const double n = static_cast<double>(s.replications.size());
  std::printf("kind=%s policy=%s replications=%zu horizon=%zu\n", to_string(s.config.kind).c_str(),
              s.config.resolved_policy().c_str(), s.replications.size(), s.config.horizon);
  std::printf("mean final avg reward: %.6g\n", final_avg / n);
  if (s.config.kind == ExperimentKind::kSmallCell) {
    std::printf("mean oracle avg utility: %.6g (relative gap %.4g)\n", oracle / n,
                relative_gap(final_avg / n, oracle / n));
  }
  if (s.config.kind == ExperimentKind::kGameCe) {
    std::printf("max CE gap: %.4g, max internal regret per round: %.4g\n", ce, internal);
  }
}

int dispatch(CLI::App& app, Overrides& o) {
  const std::string cmd = app.get_subcommands().front()->get_name();
  if (cmd == "run") {
    const ExperimentConfig c = build_config(o, std::nullopt);
    if (c.kind == ExperimentKind::kComplexityBench) {
      const auto rows = bench_complexity(c);
      const std::string table = format_complexity(rows);
      write_text(c.out_dir, "complexity.csv", table);
      std::fputs(table.c_str(), stdout);
      return kExitOk;
    }
    const RunSummary s = run_experiment(c);
    write_outputs(s, c.out_dir);
    print_run(s);
  } else if (cmd == "oracle") {
    const ExperimentConfig c = build_config(o, ExperimentKind::kSmallCell);
    const std::string table = emit_oracle_table(c, o.replication_index);
    if (o.out) write_text(c.out_dir, "oracle.csv", table);
    std::fputs(table.c_str(), stdout);
  } else if (cmd == "bench") {
    const ExperimentConfig c = build_config(o, ExperimentKind::kComplexityBench);
    const std::string table = format_complexity(bench_complexity(c));
    write_text(c.out_dir, "complexity.csv", table);
    std::fputs(table.c_str(), stdout);
  } else if (cmd == "game") {
    const ExperimentConfig c = build_config(o, ExperimentKind::kGameCe);
    const RunSummary s = run_experiment(c);
    write_outputs(s, c.out_dir);
    print_run(s);
  } else if (cmd == "sweep") {
    const ExperimentConfig c = build_config(o, ExperimentKind::kSmallCell);
    for (const auto& s : run_sweep(c)) {
      std::printf("M=%zu N=%zu: ", s.config.arms, s.config.plays);
      print_run(s);
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"banditlab: bandit policies, swap-regret games and small-cell experiments"};
  app.require_subcommand(1);
  Overrides o;
  add_common(app.add_subcommand("run", "Run the configured experiment"), o);
  auto* oracle = app.add_subcommand("oracle", "Print every subset's average utility");
  add_common(oracle, o);
  oracle->add_option("--replication", o.replication_index, "Replication whose stream is used");
  add_common(app.add_subcommand("bench", "EXP3.M time and state scaling over an M sweep"), o);
  auto* game = app.add_subcommand("game", "Swap-regret self-play and CE gap");
  add_common(game, o);
  game->add_option("--game", o.game, "chicken, shapley, matching-pennies or a game file");
  auto* sweep = app.add_subcommand("sweep", "Small-cell runs over the (M, N) sweep");
  add_common(sweep, o);
  for (auto* sub : app.get_subcommands({})) {
    if (sub->get_name() != "bench") sub->add_flag("--plot", o.plot, "Also write plot.svg");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    return dispatch(app, o);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitIo;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
}
