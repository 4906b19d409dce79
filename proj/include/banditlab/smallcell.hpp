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

// Energy-harvesting small-cell activation. Each round a macro base station
// activates N of M cells; cell m then has A_{m,t} energy units and B_{m,t}
// users, serves gamma_{m,t} users, and yields
//
//   g_{m,t} = gamma_{m,t} beta_m - r_m (gamma_{m,t} alpha_m + kappa_m).
//
// gamma_{m,t} = max{floor(A/alpha), B} by default (kPaperMax). kPhysicalMin
// uses min{...}, which respects both the energy and the user limit.

#ifndef BANDITLAB_SMALLCELL_HPP_
#define BANDITLAB_SMALLCELL_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "banditlab/core.hpp"

namespace banditlab {

struct SmallCellParams {
  double alpha = 1.0;  // energy units per served user
  double beta = 0.0;   // rate reward per served user
  double r = 0.0;      // cost per energy unit
  double kappa = 0.0;  // activation energy units

  void validate() const;
};

struct CellSnapshot {
  double energy = 0.0;       // A
  std::int64_t users = 0;    // B
};

enum class ServiceCountMode { kPaperMax, kPhysicalMin };

ServiceCountMode parse_service_mode(const std::string& name);
std::string to_string(ServiceCountMode mode);

enum class ProcessKind { kUniformIid, kRegimeSwitch, kFileTrace };

ProcessKind parse_process_kind(const std::string& name);

// From start_round on, draws use these bounds.
struct Regime {
  std::size_t start_round = 0;
  std::int64_t energy_max = 0;
  std::int64_t users_max = 0;
};

struct CellProcess {
  ProcessKind kind = ProcessKind::kUniformIid;
  std::int64_t energy_max = 10;
  std::int64_t users_max = 6;
  std::vector<Regime> regimes;  // kRegimeSwitch only, sorted by start_round
};

// Recorded (A, B) rows for every cell, read by kFileTrace cells.
class SnapshotTrace {
 public:
  SnapshotTrace(std::size_t num_cells, std::vector<CellSnapshot> rows);

  std::size_t rounds() const { return rows_.size() / num_cells_; }
  std::size_t num_cells() const { return num_cells_; }
  const CellSnapshot& at(std::size_t t, std::size_t cell) const {
    return rows_[t * num_cells_ + cell];
  }
  double max_energy(std::size_t cell) const;
  std::int64_t max_users(std::size_t cell) const;

 private:
  std::size_t num_cells_;
  std::vector<CellSnapshot> rows_;
};

// Delimited text with a header row and columns A_1, B_1, ..., A_M, B_M.
SnapshotTrace load_snapshot_trace(const std::filesystem::path& path);
SnapshotTrace parse_snapshot_trace(const std::string& text);
std::string format_snapshot_trace(const SnapshotTrace& trace);

struct Scenario {
  std::vector<SmallCellParams> params;
  std::vector<CellProcess> processes;
  std::shared_ptr<const SnapshotTrace> trace;
  ServiceCountMode mode = ServiceCountMode::kPaperMax;

  std::size_t num_cells() const { return params.size(); }
  void validate() const;
};

// Heterogeneous cells with uniform draws on [0, energy_max] x [0, users_max].
Scenario default_scenario(std::size_t num_cells,
                          ServiceCountMode mode = ServiceCountMode::kPaperMax,
                          std::int64_t energy_max = 10, std::int64_t users_max = 6);

std::int64_t service_count(const CellSnapshot& snapshot, const SmallCellParams& params,
                           ServiceCountMode mode);

double cell_utility(const CellSnapshot& snapshot, const SmallCellParams& params,
                    ServiceCountMode mode);

double subset_utility(std::span<const CellSnapshot> snapshots,
                      std::span<const SmallCellParams> params, const SubsetAction& subset,
                      ServiceCountMode mode);

// Snapshots for round t; a pure function of (scenario, seed, t).
void generate_round(const Scenario& scenario, std::size_t t, std::uint64_t seed,
                    std::span<CellSnapshot> out);
std::vector<CellSnapshot> generate_round(const Scenario& scenario, std::size_t t,
                                         std::uint64_t seed);

struct UtilityBounds {
  std::vector<RewardBounds> per_cell;
  // Common range over all cells; one affine map for every arm keeps the
  // ordering of cells and of subset totals.
  RewardBounds arm;
};

UtilityBounds utility_bounds(const Scenario& scenario);
// Sum of the N lowest lows and the N highest highs.
RewardBounds subset_bounds(const UtilityBounds& bounds, std::size_t subset_size);

struct OracleResult {
  SubsetAction best_subset;
  std::size_t best_rank = 0;  // lexicographic, zero-based
  double best_avg_utility = 0.0;
  std::vector<SubsetAction> subsets;
  std::vector<double> per_subset_avg;
};

inline constexpr std::uint64_t kMaxOracleSubsets = 1000000;

// Accumulates every subset's total utility round by round.
class SubsetOracle {
 public:
  SubsetOracle(std::size_t num_cells, std::size_t subset_size);

  void add_round(std::span<const double> cell_utilities);
  std::size_t rounds() const { return rounds_; }
  OracleResult result() const;

 private:
  std::vector<SubsetAction> subsets_;
  std::vector<double> totals_;
  std::size_t rounds_ = 0;
};

// Replays the snapshot stream of `seed` for `horizon` rounds.
OracleResult exhaustive_best_subset(const Scenario& scenario, std::size_t subset_size,
                                    std::size_t horizon, std::uint64_t seed);
// Same enumeration over a realized per-cell utility trace.
OracleResult exhaustive_best_subset(const RewardTrace& utilities, std::size_t subset_size);

// Per-cell utility matrix for `horizon` rounds of the scenario.
RewardTrace utility_trace(const Scenario& scenario, std::size_t horizon, std::uint64_t seed);

}  // namespace banditlab

#endif  // BANDITLAB_SMALLCELL_HPP_
