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

// Domain types shared by every policy and environment: reward traces,
// mixed strategies, subset actions, the regret ledger, and the
// select/observe policy contract.

#ifndef BANDITLAB_CORE_HPP_
#define BANDITLAB_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "banditlab/rng.hpp"

namespace banditlab {

using ArmIndex = std::size_t;

// Tolerance on probability mass sums.
inline constexpr double kMassTolerance = 1e-9;

struct RewardBounds {
  double lo = 0.0;
  double hi = 1.0;
};

// Full n x M reward matrix held by an environment. Row t holds g_{m,t} for
// every arm m. Policies only ever see the entries they played.
class RewardTrace {
 public:
  RewardTrace(std::size_t num_arms, RewardBounds bounds);
  RewardTrace(std::size_t rounds, std::size_t num_arms,
              std::vector<double> values, RewardBounds bounds);

  void append_round(std::span<const double> rewards);

  std::size_t rounds() const { return rounds_; }
  std::size_t num_arms() const { return num_arms_; }
  RewardBounds bounds() const { return bounds_; }

  double at(std::size_t t, ArmIndex m) const {
    return values_[t * num_arms_ + m];
  }
  std::span<const double> round(std::size_t t) const {
    return {values_.data() + t * num_arms_, num_arms_};
  }

  // Per-arm cumulative reward over all rounds.
  std::vector<double> column_sums() const;

 private:
  void check_row(std::span<const double> rewards) const;

  std::size_t rounds_ = 0;
  std::size_t num_arms_;
  std::vector<double> values_;
  RewardBounds bounds_;
};

// Probability weights over arms. target_sum is 1 for single play and N for
// an N-of-M multi-play inclusion vector.
class MixedStrategy {
 public:
  MixedStrategy() = default;
  // Validates 0 <= p_m <= 1 and sum(p) == target_sum within kMassTolerance.
  MixedStrategy(std::vector<double> probs, double target_sum);

  static MixedStrategy uniform(std::size_t num_arms, double target_sum = 1.0);
  static MixedStrategy point_mass(std::size_t num_arms, ArmIndex arm);

  std::span<const double> probs() const { return probs_; }
  double operator[](ArmIndex m) const { return probs_[m]; }
  std::size_t size() const { return probs_.size(); }
  double target_sum() const { return target_sum_; }

 private:
  std::vector<double> probs_;
  double target_sum_ = 1.0;
};

// Exactly N distinct arms, kept in ascending order.
class SubsetAction {
 public:
  SubsetAction() = default;
  explicit SubsetAction(std::vector<ArmIndex> members);

  std::span<const ArmIndex> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(ArmIndex m) const;

  friend bool operator==(const SubsetAction&, const SubsetAction&) = default;

 private:
  std::vector<ArmIndex> members_;
};

std::string to_string(const SubsetAction& subset);

// Enumerates the C(M, N) subsets in lexicographic member order. Ranks are
// zero-based here; CSV output adds one.
class SubsetIndexer {
 public:
  SubsetIndexer(std::size_t num_arms, std::size_t subset_size);

  std::size_t count() const { return count_; }
  std::size_t num_arms() const { return num_arms_; }
  std::size_t subset_size() const { return subset_size_; }

  std::size_t rank(std::span<const ArmIndex> sorted_members) const;
  SubsetAction unrank(std::size_t rank) const;
  std::vector<SubsetAction> all() const;

 private:
  std::size_t num_arms_;
  std::size_t subset_size_;
  std::size_t count_;
  // binom_[n][k] for n <= M, k <= N.
  std::vector<std::vector<std::uint64_t>> binom_;
};

// Saturates at UINT64_MAX instead of overflowing.
std::uint64_t binomial(std::size_t n, std::size_t k);

// Per-round choices and realized rewards of one run. Choices are flattened
// with plays_per_round entries per round.
class RegretLedger {
 public:
  RegretLedger(std::size_t num_arms, std::size_t plays_per_round,
               bool keep_strategies);

  // reward is the realized total over the chosen arms.
  void record(std::span<const ArmIndex> arms, double reward,
              const MixedStrategy* strategy = nullptr);

  std::size_t rounds() const { return received_.size(); }
  std::size_t num_arms() const { return num_arms_; }
  std::size_t plays_per_round() const { return plays_; }
  bool has_strategies() const { return keep_strategies_; }

  std::span<const ArmIndex> choices(std::size_t t) const {
    return {choices_.data() + t * plays_, plays_};
  }
  std::span<const double> strategy(std::size_t t) const {
    return {strategies_.data() + t * num_arms_, num_arms_};
  }
  std::span<const double> received() const { return received_; }
  double cum_reward() const { return cum_reward_; }

  // Number of times each arm was chosen.
  std::vector<std::size_t> arm_counts() const;

 private:
  std::size_t num_arms_;
  std::size_t plays_;
  bool keep_strategies_;
  std::vector<ArmIndex> choices_;
  std::vector<double> received_;
  std::vector<double> strategies_;
  double cum_reward_ = 0.0;
};

// max_m sum_t g_{m,t} - sum_t g_{I_t,t}, realized on one run.
double external_regret(const RewardTrace& trace, const RegretLedger& ledger);

// max_{m,l} sum_t p_{m,t} (g_{l,t} - g_{m,t}). The m == l terms are zero, so
// the result is never negative.
double internal_regret(const RegretLedger& ledger, const RewardTrace& trace);

// Multi-play regret against the best fixed subset of the ledger's size.
double subset_regret(const RewardTrace& trace, const RegretLedger& ledger);

// Regret against the per-round best arm of a mean-reward matrix:
// sum_t max_m mu_{m,t} - mu_{I_t,t}. Used for non-stationary instances.
double dynamic_regret(const RewardTrace& means, const RegretLedger& ledger);

// N arms with the largest cumulative reward, ties to the lowest index.
SubsetAction best_fixed_subset(const RewardTrace& trace, std::size_t subset_size);

// Affine map of bounds onto [0, 1]. Values outside are clamped with a
// warning on stderr.
double normalize_reward(double g, RewardBounds bounds);

void log_warning(std::string_view message);

// Outcome of one select() call.
struct Selection {
  std::vector<ArmIndex> arms;
  MixedStrategy strategy;
};

// Interaction protocol between a policy and its environment. select() and
// observe() must strictly alternate; the base class enforces it.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  virtual std::size_t num_arms() const = 0;
  virtual std::size_t plays_per_round() const { return 1; }

  const Selection& select(Rng& rng);
  // rewards[i] belongs to arms[i] of the last selection.
  void observe(std::span<const ArmIndex> arms, std::span<const double> rewards);
  // Single-play convenience.
  void observe(ArmIndex arm, double reward);

  // Bytes of resident policy state, including heap-held buffers.
  virtual std::size_t state_bytes() const = 0;
  // Number of stored scalars; the count-of-fields view of state size.
  virtual std::size_t state_scalars() const = 0;

 protected:
  virtual Selection do_select(Rng& rng) = 0;
  virtual void do_observe(std::span<const ArmIndex> arms,
                          std::span<const double> rewards) = 0;

 private:
  bool awaiting_observe_ = false;
  Selection last_;
};

}  // namespace banditlab

#endif  // BANDITLAB_CORE_HPP_
