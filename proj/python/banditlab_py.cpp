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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "banditlab/adversarial.hpp"
#include "banditlab/config.hpp"
#include "banditlab/core.hpp"
#include "banditlab/errors.hpp"
#include "banditlab/game.hpp"
#include "banditlab/harness.hpp"
#include "banditlab/rng.hpp"
#include "banditlab/smallcell.hpp"
#include "banditlab/stochastic.hpp"

namespace py = pybind11;
using namespace banditlab;

namespace {

std::vector<double> to_vector(const MixedStrategy& p) { return {p.probs().begin(), p.probs().end()}; }

std::vector<ArmIndex> to_vector(const SubsetAction& s) {
  return {s.members().begin(), s.members().end()};
}

RewardTrace trace_from_rows(const std::vector<std::vector<double>>& rows, RewardBounds bounds) {
  if (rows.empty()) throw ArgumentError("trace needs at least one round");
  RewardTrace trace(rows.front().size(), bounds);
  for (const auto& row : rows) trace.append_round(row);
  return trace;
}

ExperimentConfig config_from(const py::dict& settings) {
  ExperimentConfig config;
  for (const auto& [key, value] : settings) {
    apply_setting(config, py::str(key), py::str(value));
  }
  return config;
}

}  // namespace

PYBIND11_MODULE(_banditlab, m) {
  m.doc() = "Multi-play bandit policies, regret accounting and the small-cell harness.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<ContractViolation>(m, "ContractViolation", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<ExperimentConfig>(m, "Config")
      .def(py::init<>())
      .def(py::init(&config_from), py::arg("settings"))
      .def_static("load", &load_config, py::arg("path"))
      .def("set", &apply_setting, py::arg("key"), py::arg("value"))
      .def("apply_text", &apply_config_text, py::arg("text"))
      .def("validate", &ExperimentConfig::validate)
      .def_property_readonly("kind", [](const ExperimentConfig& c) { return to_string(c.kind); })
      .def_property_readonly("policy", &ExperimentConfig::resolved_policy)
      .def_readwrite("arms", &ExperimentConfig::arms)
      .def_readwrite("plays", &ExperimentConfig::plays)
      .def_readwrite("horizon", &ExperimentConfig::horizon)
      .def_readwrite("replications", &ExperimentConfig::replications)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("threads", &ExperimentConfig::threads)
      .def_readwrite("trace_stride", &ExperimentConfig::trace_stride)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir);

  py::class_<SeriesPoint>(m, "SeriesPoint")
      .def_readonly("round", &SeriesPoint::round)
      .def_readonly("action_id", &SeriesPoint::action_id)
      .def_readonly("reward", &SeriesPoint::reward)
      .def_readonly("cum_reward", &SeriesPoint::cum_reward)
      .def_readonly("running_avg", &SeriesPoint::running_avg);

  py::class_<ReplicationSummary>(m, "ReplicationSummary")
      .def_readonly("replication", &ReplicationSummary::replication)
      .def_readonly("seed", &ReplicationSummary::seed)
      .def_readonly("rounds", &ReplicationSummary::rounds)
      .def_readonly("cum_reward", &ReplicationSummary::cum_reward)
      .def_readonly("final_avg_utility", &ReplicationSummary::final_avg_utility)
      .def_readonly("oracle_avg_utility", &ReplicationSummary::oracle_avg_utility)
      .def_readonly("oracle_action", &ReplicationSummary::oracle_action)
      .def_readonly("settle_round", &ReplicationSummary::settle_round)
      .def_readonly("regret", &ReplicationSummary::regret)
      .def_readonly("pseudo_regret", &ReplicationSummary::pseudo_regret)
      .def_readonly("ce_gap", &ReplicationSummary::ce_gap)
      .def_readonly("max_internal_regret_per_round",
                    &ReplicationSummary::max_internal_regret_per_round)
      .def_readonly("action_counts", &ReplicationSummary::action_counts)
      .def_readonly("tail_action_counts", &ReplicationSummary::tail_action_counts)
      .def_readonly("series", &ReplicationSummary::series);

  py::class_<RunSummary>(m, "RunSummary")
      .def_readonly("config", &RunSummary::config)
      .def_readonly("action_labels", &RunSummary::action_labels)
      .def_readonly("replications", &RunSummary::replications)
      .def("histogram", &RunSummary::histogram)
      .def("write", &write_outputs, py::arg("directory"));

  m.def("run_experiment", &run_experiment, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_sweep", &run_sweep, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("oracle_table", &emit_oracle_table, py::arg("config"), py::arg("replication") = 0);
  m.def(
      "bench_complexity",
      [](const ExperimentConfig& config) {
        py::list rows;
        for (const auto& r : bench_complexity(config)) {
          py::dict d;
          d["M"] = r.arms;
          d["N"] = r.plays;
          d["state_scalars"] = r.state_scalars;
          d["state_bytes"] = r.state_bytes;
          d["median_round_ns"] = r.median_round_ns;
          d["predicted_cost"] = r.predicted_cost;
          rows.append(d);
        }
        return rows;
      },
      py::arg("config"));
  m.def("relative_gap", &relative_gap, py::arg("running_avg"), py::arg("oracle_avg"));

  m.def(
      "exp3m_distribution",
      [](std::vector<double> weights, std::size_t plays, double gamma) {
        Exp3mState state(weights.size(), plays, gamma);
        state.weights = std::move(weights);
        return to_vector(exp3m_distribution(state));
      },
      py::arg("weights"), py::arg("plays"), py::arg("gamma"));
  m.def(
      "find_cap_threshold",
      [](const std::vector<double>& weights, double theta) {
        return find_cap_threshold(weights, theta);
      },
      py::arg("weights"), py::arg("theta"));
  m.def(
      "depround",
      [](std::vector<double> probs, std::uint64_t seed) {
        double total = 0.0;
        for (double p : probs) total += p;
        Rng rng(seed);
        return to_vector(depround(MixedStrategy(std::move(probs), std::round(total)), rng));
      },
      py::arg("probs"), py::arg("seed"));
  m.def("default_gamma", &default_gamma, py::arg("arms"), py::arg("plays"), py::arg("horizon"));

  m.def(
      "ucb1_select",
      [](const std::vector<std::size_t>& pulls, const std::vector<double>& sums) {
        if (pulls.size() != sums.size()) throw ArgumentError("pulls and sums differ in length");
        Ucb1State state(pulls.size());
        state.pulls = pulls;
        state.sums = sums;
        for (auto n : pulls) state.t += n;
        return ucb1_select(state);
      },
      py::arg("pulls"), py::arg("sums"));

  m.def(
      "external_regret",
      [](const std::vector<std::vector<double>>& rows, const std::vector<std::vector<ArmIndex>>& actions,
         double lo, double hi) {
        const auto trace = trace_from_rows(rows, {lo, hi});
        if (actions.empty()) throw ArgumentError("no actions");
        RegretLedger ledger(trace.num_arms(), actions.front().size(), false);
        for (std::size_t t = 0; t < actions.size(); ++t) {
          double reward = 0.0;
          for (ArmIndex a : actions[t]) reward += trace.at(t, a);
          ledger.record(actions[t], reward);
        }
        return external_regret(trace, ledger);
      },
      py::arg("rewards"), py::arg("actions"), py::arg("lo") = 0.0, py::arg("hi") = 1.0);
  m.def(
      "best_fixed_subset",
      [](const std::vector<std::vector<double>>& rows, std::size_t plays, double lo, double hi) {
        return to_vector(best_fixed_subset(trace_from_rows(rows, {lo, hi}), plays));
      },
      py::arg("rewards"), py::arg("plays"), py::arg("lo") = 0.0, py::arg("hi") = 1.0);

  m.def(
      "stationary_distribution",
      [](const std::vector<double>& q, std::size_t size) {
        return to_vector(stationary_distribution(q, size));
      },
      py::arg("q"), py::arg("size"));
  m.def(
      "ce_gap",
      [](const std::string& game_spec, const std::vector<std::size_t>& counts) {
        const auto game = named_or_file_game(game_spec);
        JointHistogram h(game.num_profiles());
        if (counts.size() != game.num_profiles()) throw ArgumentError("one count per profile");
        for (std::size_t p = 0; p < counts.size(); ++p) {
          for (std::size_t c = 0; c < counts[p]; ++c) h.add(p);
        }
        return ce_gap(h, game);
      },
      py::arg("game"), py::arg("counts"));

  m.def(
      "cell_utility",
      [](double energy, std::int64_t users, double alpha, double beta, double r, double kappa,
         const std::string& mode) {
        const SmallCellParams params{alpha, beta, r, kappa};
        params.validate();
        return cell_utility({energy, users}, params, parse_service_mode(mode));
      },
      py::arg("energy"), py::arg("users"), py::arg("alpha"), py::arg("beta"), py::arg("r"),
      py::arg("kappa"), py::arg("mode") = "paper-max");
  m.def(
      "exhaustive_best_subset",
      [](std::size_t cells, std::size_t plays, std::size_t horizon, std::uint64_t seed,
         const std::string& mode) {
        const auto res =
            exhaustive_best_subset(default_scenario(cells, parse_service_mode(mode)), plays,
                                   horizon, seed);
        py::dict d;
        d["best_subset"] = to_vector(res.best_subset);
        d["best_rank"] = res.best_rank;
        d["best_avg_utility"] = res.best_avg_utility;
        d["per_subset_avg"] = res.per_subset_avg;
        return d;
      },
      py::arg("cells"), py::arg("plays"), py::arg("horizon"), py::arg("seed"),
      py::arg("mode") = "paper-max");
}
