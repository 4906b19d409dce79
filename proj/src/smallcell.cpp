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

#include "banditlab/smallcell.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "banditlab/errors.hpp"
#include "banditlab/rng.hpp"

namespace banditlab {

void SmallCellParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("cell alpha must be > 0");
  if (!(beta >= 0.0 && r >= 0.0 && kappa >= 0.0) || !std::isfinite(beta) ||
      !std::isfinite(r) || !std::isfinite(kappa)) {
    throw ConfigError("cell beta, r and kappa must be finite and >= 0");
  }
}

ServiceCountMode parse_service_mode(const std::string& name) {
  if (name == "paper-max") return ServiceCountMode::kPaperMax;
  if (name == "physical-min") return ServiceCountMode::kPhysicalMin;
  throw ConfigError("unknown service-count mode '" + name + "'");
}

std::string to_string(ServiceCountMode mode) {
  return mode == ServiceCountMode::kPaperMax ? "paper-max" : "physical-min";
}

ProcessKind parse_process_kind(const std::string& name) {
  if (name == "uniform-iid") return ProcessKind::kUniformIid;
  if (name == "regime-switch") return ProcessKind::kRegimeSwitch;
  if (name == "file-trace") return ProcessKind::kFileTrace;
  throw ConfigError("unknown cell process '" + name + "'");
}

SnapshotTrace::SnapshotTrace(std::size_t num_cells, std::vector<CellSnapshot> rows)
    : num_cells_(num_cells), rows_(std::move(rows)) {
  if (num_cells == 0 || rows_.size() % num_cells != 0) {
    throw InputError("snapshot trace rows do not match the cell count");
  }
  for (const auto& s : rows_) {
    if (!(s.energy >= 0.0) || !std::isfinite(s.energy) || s.users < 0) {
      throw InputError("snapshot trace holds negative energy or users");
    }
  }
}

double SnapshotTrace::max_energy(std::size_t cell) const {
  double best = 0.0;
  for (std::size_t t = 0; t < rounds(); ++t) best = std::max(best, at(t, cell).energy);
  return best;
}

std::int64_t SnapshotTrace::max_users(std::size_t cell) const {
  std::int64_t best = 0;
  for (std::size_t t = 0; t < rounds(); ++t) best = std::max(best, at(t, cell).users);
  return best;
}

namespace {

std::vector<std::string> split_fields(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::replace(line.begin(), line.end(), ';', ',');
  std::replace(line.begin(), line.end(), '\t', ',');
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto first = field.find_first_not_of(' ');
    const auto last = field.find_last_not_of(' ');
    fields.push_back(first == std::string::npos ? "" : field.substr(first, last - first + 1));
  }
  return fields;
}

}  // namespace

SnapshotTrace parse_snapshot_trace(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InputError("snapshot trace: missing header row");
  const auto header = split_fields(line);
  if (header.empty() || header.size() % 2 != 0) {
    throw InputError("snapshot trace: header needs 2M columns (A_1, B_1, ...)");
  }
  const std::size_t cells = header.size() / 2;
  std::vector<CellSnapshot> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw InputError("snapshot trace: line " + std::to_string(line_no) +
                       " has the wrong column count");
    }
    for (std::size_t c = 0; c < cells; ++c) {
      CellSnapshot s;
      try {
        std::size_t used = 0;
        s.energy = std::stod(fields[2 * c], &used);
        if (used != fields[2 * c].size()) throw std::invalid_argument("energy");
        const double users = std::stod(fields[2 * c + 1], &used);
        if (used != fields[2 * c + 1].size() || users != std::floor(users)) {
          throw std::invalid_argument("users");
        }
        s.users = static_cast<std::int64_t>(users);
      } catch (const std::exception&) {
        throw InputError("snapshot trace: bad value on line " + std::to_string(line_no));
      }
      rows.push_back(s);
    }
  }
  return SnapshotTrace(cells, std::move(rows));
}

SnapshotTrace load_snapshot_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open snapshot trace " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_snapshot_trace(buffer.str());
}

std::string format_snapshot_trace(const SnapshotTrace& trace) {
  std::ostringstream out;
  for (std::size_t c = 0; c < trace.num_cells(); ++c) {
    out << (c ? "," : "") << "A_" << c + 1 << ",B_" << c + 1;
  }
  out << '\n';
  for (std::size_t t = 0; t < trace.rounds(); ++t) {
    for (std::size_t c = 0; c < trace.num_cells(); ++c) {
      const auto& s = trace.at(t, c);
      out << (c ? "," : "") << s.energy << ',' << s.users;
    }
    out << '\n';
  }
  return out.str();
}

void Scenario::validate() const {
  if (params.empty()) throw ConfigError("scenario needs at least one cell");
  if (processes.size() != params.size()) {
    throw ConfigError("scenario needs one process per cell");
  }
  for (const auto& p : params) p.validate();
  for (std::size_t m = 0; m < processes.size(); ++m) {
    const auto& proc = processes[m];
    if (proc.energy_max < 0 || proc.users_max < 0) {
      throw ConfigError("scenario bounds must be >= 0");
    }
    if (proc.kind == ProcessKind::kRegimeSwitch) {
      for (std::size_t i = 0; i < proc.regimes.size(); ++i) {
        if (proc.regimes[i].energy_max < 0 || proc.regimes[i].users_max < 0) {
          throw ConfigError("regime bounds must be >= 0");
        }
        if (i && proc.regimes[i].start_round <= proc.regimes[i - 1].start_round) {
          throw ConfigError("regimes must be sorted by start round");
        }
      }
    }
    if (proc.kind == ProcessKind::kFileTrace) {
      if (!trace) throw ConfigError("file-trace cell without a loaded trace");
      if (trace->num_cells() != params.size()) {
        throw ConfigError("trace column count does not match the cell count");
      }
    }
  }
}

Scenario default_scenario(std::size_t num_cells, ServiceCountMode mode,
                          std::int64_t energy_max, std::int64_t users_max) {
  // alpha, beta, r, kappa. The first M rows make the M-cell scenario; the
  // mean utilities are well separated around rank N = M / 2 for M = 4, 6, 8.
  static constexpr SmallCellParams kCells[] = {
      {2, 6, 1, 3}, {2, 10, 1, 3}, {1, 4, 1, 2}, {2, 9, 1, 4},
      {3, 12, 1, 5}, {2, 7, 1, 3}, {1, 6, 1, 1}, {3, 9, 1, 4},
  };
  constexpr std::size_t kTable = std::size(kCells);
  if (num_cells == 0) throw ConfigError("scenario needs at least one cell");
  Scenario s;
  s.mode = mode;
  for (std::size_t m = 0; m < num_cells; ++m) {
    SmallCellParams p = kCells[m % kTable];
    // Beyond the table, repeat it with a small per-lap rate discount so cells
    // stay distinct.
    p.beta = std::max(0.0, p.beta - 0.25 * static_cast<double>(m / kTable));
    s.params.push_back(p);
    s.processes.push_back({ProcessKind::kUniformIid, energy_max, users_max, {}});
  }
  return s;
}

std::int64_t service_count(const CellSnapshot& snapshot, const SmallCellParams& params,
                           ServiceCountMode mode) {
  const auto by_energy = static_cast<std::int64_t>(std::floor(snapshot.energy / params.alpha));
  return mode == ServiceCountMode::kPaperMax ? std::max(by_energy, snapshot.users)
                                             : std::min(by_energy, snapshot.users);
}

double cell_utility(const CellSnapshot& snapshot, const SmallCellParams& params,
                    ServiceCountMode mode) {
  const double served = static_cast<double>(service_count(snapshot, params, mode));
  return served * params.beta - params.r * (served * params.alpha + params.kappa);
}

double subset_utility(std::span<const CellSnapshot> snapshots,
                      std::span<const SmallCellParams> params, const SubsetAction& subset,
                      ServiceCountMode mode) {
  double total = 0.0;
  for (ArmIndex m : subset.members()) {
    if (m >= snapshots.size() || m >= params.size()) {
      throw ArgumentError("subset member outside the scenario");
    }
    total += cell_utility(snapshots[m], params[m], mode);
  }
  return total;
}

namespace {

std::pair<std::int64_t, std::int64_t> draw_bounds(const CellProcess& proc, std::size_t t) {
  std::int64_t a = proc.energy_max;
  std::int64_t b = proc.users_max;
  if (proc.kind == ProcessKind::kRegimeSwitch) {
    for (const auto& regime : proc.regimes) {
      if (regime.start_round > t) break;
      a = regime.energy_max;
      b = regime.users_max;
    }
  }
  return {a, b};
}

}  // namespace

void generate_round(const Scenario& scenario, std::size_t t, std::uint64_t seed,
                    std::span<CellSnapshot> out) {
  const std::size_t M = scenario.num_cells();
  if (out.size() != M) throw ArgumentError("generate_round: output size != cell count");
  SplitMix64 engine(derive_seed(seed, t));
  for (std::size_t m = 0; m < M; ++m) {
    const auto& proc = scenario.processes[m];
    if (proc.kind == ProcessKind::kFileTrace) {
      if (!scenario.trace || t >= scenario.trace->rounds()) {
        throw InputError("snapshot trace exhausted at round " + std::to_string(t));
      }
      out[m] = scenario.trace->at(t, m);
      continue;
    }
    const auto [a_max, b_max] = draw_bounds(proc, t);
    out[m].energy =
        static_cast<double>(uniform_below(engine, static_cast<std::uint64_t>(a_max) + 1));
    out[m].users =
        static_cast<std::int64_t>(uniform_below(engine, static_cast<std::uint64_t>(b_max) + 1));
  }
}

std::vector<CellSnapshot> generate_round(const Scenario& scenario, std::size_t t,
                                         std::uint64_t seed) {
  std::vector<CellSnapshot> out(scenario.num_cells());
  generate_round(scenario, t, seed, out);
  return out;
}

UtilityBounds utility_bounds(const Scenario& scenario) {
  UtilityBounds result;
  result.arm = {std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity()};
  for (std::size_t m = 0; m < scenario.num_cells(); ++m) {
    const auto& p = scenario.params[m];
    const auto& proc = scenario.processes[m];
    double a_max = static_cast<double>(proc.energy_max);
    std::int64_t b_max = proc.users_max;
    if (proc.kind == ProcessKind::kRegimeSwitch) {
      for (const auto& regime : proc.regimes) {
        a_max = std::max(a_max, static_cast<double>(regime.energy_max));
        b_max = std::max(b_max, regime.users_max);
      }
    } else if (proc.kind == ProcessKind::kFileTrace && scenario.trace) {
      a_max = scenario.trace->max_energy(m);
      b_max = scenario.trace->max_users(m);
    }
    const double served_max =
        static_cast<double>(service_count({a_max, b_max}, p, scenario.mode));
    // g is affine in gamma, so the extremes sit at gamma = 0 and gamma_max.
    auto g = [&](double served) { return served * p.beta - p.r * (served * p.alpha + p.kappa); };
    const double at_zero = g(0.0);
    const double at_max = g(served_max);
    // Pad by a few ulps so interior rounding never lands outside the interval.
    const double pad = 1e-12 * std::max({1.0, std::abs(at_zero), std::abs(at_max)});
    const RewardBounds cell{std::min(at_zero, at_max) - pad, std::max(at_zero, at_max) + pad};
    result.per_cell.push_back(cell);
    result.arm.lo = std::min(result.arm.lo, cell.lo);
    result.arm.hi = std::max(result.arm.hi, cell.hi);
  }
  return result;
}

RewardBounds subset_bounds(const UtilityBounds& bounds, std::size_t subset_size) {
  const std::size_t M = bounds.per_cell.size();
  if (subset_size > M) throw ArgumentError("subset_bounds: N exceeds cell count");
  std::vector<double> lows, highs;
  for (const auto& b : bounds.per_cell) {
    lows.push_back(b.lo);
    highs.push_back(b.hi);
  }
  std::sort(lows.begin(), lows.end());
  std::sort(highs.begin(), highs.end(), std::greater<>());
  RewardBounds out{0.0, 0.0};
  for (std::size_t i = 0; i < subset_size; ++i) {
    out.lo += lows[i];
    out.hi += highs[i];
  }
  return out;
}

SubsetOracle::SubsetOracle(std::size_t num_cells, std::size_t subset_size) {
  if (subset_size < 1 || subset_size > num_cells) {
    throw ArgumentError("oracle needs 1 <= N <= M");
  }
  if (binomial(num_cells, subset_size) > kMaxOracleSubsets) {
    throw ArgumentError("oracle: C(M, N) exceeds the enumeration bound");
  }
  subsets_ = SubsetIndexer(num_cells, subset_size).all();
  totals_.assign(subsets_.size(), 0.0);
}

void SubsetOracle::add_round(std::span<const double> cell_utilities) {
  for (std::size_t s = 0; s < subsets_.size(); ++s) {
    double g = 0.0;
    for (ArmIndex m : subsets_[s].members()) g += cell_utilities[m];
    totals_[s] += g;
  }
  ++rounds_;
}

OracleResult SubsetOracle::result() const {
  if (rounds_ == 0) throw ArgumentError("oracle: no rounds accumulated");
  OracleResult out;
  out.subsets = subsets_;
  out.per_subset_avg.resize(totals_.size());
  const double n = static_cast<double>(rounds_);
  for (std::size_t s = 0; s < totals_.size(); ++s) out.per_subset_avg[s] = totals_[s] / n;
  // Compare totals, not averages, so ties stay exact; first maximum wins.
  std::size_t best = 0;
  for (std::size_t s = 1; s < totals_.size(); ++s) {
    if (totals_[s] > totals_[best]) best = s;
  }
  out.best_rank = best;
  out.best_subset = subsets_[best];
  out.best_avg_utility = out.per_subset_avg[best];
  return out;
}

OracleResult exhaustive_best_subset(const Scenario& scenario, std::size_t subset_size,
                                    std::size_t horizon, std::uint64_t seed) {
  scenario.validate();
  SubsetOracle oracle(scenario.num_cells(), subset_size);
  std::vector<CellSnapshot> snaps(scenario.num_cells());
  std::vector<double> utils(scenario.num_cells());
  for (std::size_t t = 0; t < horizon; ++t) {
    generate_round(scenario, t, seed, snaps);
    for (std::size_t m = 0; m < snaps.size(); ++m) {
      utils[m] = cell_utility(snaps[m], scenario.params[m], scenario.mode);
    }
    oracle.add_round(utils);
  }
  return oracle.result();
}

OracleResult exhaustive_best_subset(const RewardTrace& utilities, std::size_t subset_size) {
  SubsetOracle oracle(utilities.num_arms(), subset_size);
  for (std::size_t t = 0; t < utilities.rounds(); ++t) oracle.add_round(utilities.round(t));
  return oracle.result();
}

RewardTrace utility_trace(const Scenario& scenario, std::size_t horizon, std::uint64_t seed) {
  scenario.validate();
  const auto bounds = utility_bounds(scenario);
  RewardTrace trace(scenario.num_cells(), bounds.arm);
  std::vector<CellSnapshot> snaps(scenario.num_cells());
  std::vector<double> utils(scenario.num_cells());
  for (std::size_t t = 0; t < horizon; ++t) {
    generate_round(scenario, t, seed, snaps);
    for (std::size_t m = 0; m < snaps.size(); ++m) {
      utils[m] = cell_utility(snaps[m], scenario.params[m], scenario.mode);
    }
    trace.append_round(utils);
  }
  return trace;
}

}  // namespace banditlab
