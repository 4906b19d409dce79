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

#include "banditlab/core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

#include "banditlab/errors.hpp"

namespace banditlab {

RewardTrace::RewardTrace(std::size_t num_arms, RewardBounds bounds)
    : num_arms_(num_arms), bounds_(bounds) {
  if (num_arms == 0) throw ArgumentError("RewardTrace needs at least one arm");
  if (!(bounds.lo <= bounds.hi)) {
    throw ArgumentError("RewardTrace bounds must satisfy lo <= hi");
  }
}

RewardTrace::RewardTrace(std::size_t rounds, std::size_t num_arms,
                         std::vector<double> values, RewardBounds bounds)
    : RewardTrace(num_arms, bounds) {
  if (values.size() != rounds * num_arms) {
    throw ContractViolation("RewardTrace values size != rounds * arms");
  }
  for (std::size_t t = 0; t < rounds; ++t) {
    check_row({values.data() + t * num_arms, num_arms});
  }
  values_ = std::move(values);
  rounds_ = rounds;
}

void RewardTrace::check_row(std::span<const double> rewards) const {
  if (rewards.size() != num_arms_) {
    throw ContractViolation("reward row has wrong arm count");
  }
  for (double g : rewards) {
    if (!std::isfinite(g) || g < bounds_.lo || g > bounds_.hi) {
      std::ostringstream msg;
      msg << "reward " << g << " outside declared bounds [" << bounds_.lo
          << ", " << bounds_.hi << "]";
      throw ContractViolation(msg.str());
    }
  }
}

void RewardTrace::append_round(std::span<const double> rewards) {
  check_row(rewards);
  values_.insert(values_.end(), rewards.begin(), rewards.end());
  ++rounds_;
}

std::vector<double> RewardTrace::column_sums() const {
  std::vector<double> sums(num_arms_, 0.0);
  for (std::size_t t = 0; t < rounds_; ++t) {
    for (std::size_t m = 0; m < num_arms_; ++m) sums[m] += at(t, m);
  }
  return sums;
}

MixedStrategy::MixedStrategy(std::vector<double> probs, double target_sum)
    : probs_(std::move(probs)), target_sum_(target_sum) {
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= -kMassTolerance && p <= 1.0 + kMassTolerance)) {
      throw ContractViolation("mixed strategy weight outside [0, 1]");
    }
    total += p;
  }
  if (std::abs(total - target_sum) > kMassTolerance * std::max(1.0, target_sum)) {
    std::ostringstream msg;
    msg << "mixed strategy sums to " << total << ", expected " << target_sum;
    throw ContractViolation(msg.str());
  }
}

MixedStrategy MixedStrategy::uniform(std::size_t num_arms, double target_sum) {
  return MixedStrategy(
      std::vector<double>(num_arms, target_sum / static_cast<double>(num_arms)),
      target_sum);
}

MixedStrategy MixedStrategy::point_mass(std::size_t num_arms, ArmIndex arm) {
  std::vector<double> probs(num_arms, 0.0);
  probs.at(arm) = 1.0;
  return MixedStrategy(std::move(probs), 1.0);
}

SubsetAction::SubsetAction(std::vector<ArmIndex> members)
    : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw ContractViolation("subset action has repeated arms");
  }
}

bool SubsetAction::contains(ArmIndex m) const {
  return std::binary_search(members_.begin(), members_.end(), m);
}

std::string to_string(const SubsetAction& subset) {
  std::string out;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(subset.members()[i]);
  }
  return out;
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::uint64_t num = n - k + i;
    // result * num / i is exact at every step.
    const std::uint64_t g = std::gcd(result, static_cast<std::uint64_t>(i));
    const std::uint64_t r = result / g;
    const std::uint64_t d = i / g;
    if (r > std::numeric_limits<std::uint64_t>::max() / num) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = r * num / d;
  }
  return result;
}

SubsetIndexer::SubsetIndexer(std::size_t num_arms, std::size_t subset_size)
    : num_arms_(num_arms), subset_size_(subset_size) {
  if (subset_size > num_arms) {
    throw ArgumentError("subset size exceeds arm count");
  }
  binom_.assign(num_arms + 1, std::vector<std::uint64_t>(subset_size + 1, 0));
  for (std::size_t n = 0; n <= num_arms; ++n) {
    for (std::size_t k = 0; k <= subset_size; ++k) binom_[n][k] = binomial(n, k);
  }
  count_ = static_cast<std::size_t>(binom_[num_arms][subset_size]);
}

// Lexicographic rank: for each position, count the subsets that start with a
// smaller member at that position.
std::size_t SubsetIndexer::rank(std::span<const ArmIndex> sorted_members) const {
  if (sorted_members.size() != subset_size_) {
    throw ArgumentError("subset rank: wrong subset size");
  }
  std::size_t r = 0;
  ArmIndex next = 0;
  for (std::size_t i = 0; i < subset_size_; ++i) {
    const ArmIndex c = sorted_members[i];
    if (c >= num_arms_ || c < next) throw ArgumentError("subset rank: bad member");
    const std::size_t remaining = subset_size_ - i - 1;
    for (ArmIndex j = next; j < c; ++j) {
      r += static_cast<std::size_t>(binom_[num_arms_ - j - 1][remaining]);
    }
    next = c + 1;
  }
  return r;
}

SubsetAction SubsetIndexer::unrank(std::size_t rank) const {
  if (rank >= count_) throw ArgumentError("subset unrank: rank out of range");
  std::vector<ArmIndex> members;
  members.reserve(subset_size_);
  ArmIndex j = 0;
  for (std::size_t i = 0; i < subset_size_; ++i) {
    const std::size_t remaining = subset_size_ - i - 1;
    for (;; ++j) {
      const auto block = static_cast<std::size_t>(binom_[num_arms_ - j - 1][remaining]);
      if (rank < block) break;
      rank -= block;
    }
    members.push_back(j++);
  }
  return SubsetAction(std::move(members));
}

std::vector<SubsetAction> SubsetIndexer::all() const {
  std::vector<SubsetAction> out;
  out.reserve(count_);
  if (subset_size_ == 0) {
    out.emplace_back();
    return out;
  }
  std::vector<ArmIndex> cur(subset_size_);
  std::iota(cur.begin(), cur.end(), ArmIndex{0});
  while (true) {
    out.emplace_back(cur);
    std::size_t i = subset_size_;
    while (i > 0 && cur[i - 1] == num_arms_ - subset_size_ + i - 1) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t k = i; k < subset_size_; ++k) cur[k] = cur[k - 1] + 1;
  }
  return out;
}

RegretLedger::RegretLedger(std::size_t num_arms, std::size_t plays_per_round,
                           bool keep_strategies)
    : num_arms_(num_arms), plays_(plays_per_round), keep_strategies_(keep_strategies) {
  if (plays_per_round > num_arms) {
    throw ArgumentError("ledger plays per round exceeds arm count");
  }
}

void RegretLedger::record(std::span<const ArmIndex> arms, double reward,
                          const MixedStrategy* strategy) {
  if (arms.size() != plays_) throw ContractViolation("ledger: wrong play count");
  for (ArmIndex a : arms) {
    if (a >= num_arms_) throw ContractViolation("ledger: arm out of range");
  }
  if (keep_strategies_) {
    if (strategy == nullptr || strategy->size() != num_arms_) {
      throw ContractViolation("ledger: strategy required for every round");
    }
    strategies_.insert(strategies_.end(), strategy->probs().begin(),
                       strategy->probs().end());
  }
  choices_.insert(choices_.end(), arms.begin(), arms.end());
  received_.push_back(reward);
  cum_reward_ += reward;
}

std::vector<std::size_t> RegretLedger::arm_counts() const {
  std::vector<std::size_t> counts(num_arms_, 0);
  for (ArmIndex a : choices_) ++counts[a];
  return counts;
}

namespace {

void check_aligned(const RewardTrace& trace, const RegretLedger& ledger) {
  if (trace.rounds() != ledger.rounds()) {
    throw ContractViolation("trace and ledger cover different round counts");
  }
  if (trace.num_arms() != ledger.num_arms()) {
    throw ContractViolation("trace and ledger disagree on arm count");
  }
}

double received_from_trace(const RewardTrace& trace, const RegretLedger& ledger) {
  double total = 0.0;
  for (std::size_t t = 0; t < ledger.rounds(); ++t) {
    for (ArmIndex a : ledger.choices(t)) total += trace.at(t, a);
  }
  return total;
}

}  // namespace

double external_regret(const RewardTrace& trace, const RegretLedger& ledger) {
  check_aligned(trace, ledger);
  if (ledger.plays_per_round() != 1) {
    throw ContractViolation("external regret needs a single-play ledger");
  }
  const auto sums = trace.column_sums();
  return *std::max_element(sums.begin(), sums.end()) -
         received_from_trace(trace, ledger);
}

double internal_regret(const RegretLedger& ledger, const RewardTrace& trace) {
  check_aligned(trace, ledger);
  if (!ledger.has_strategies()) {
    throw ContractViolation("internal regret needs the strategy history");
  }
  const std::size_t M = trace.num_arms();
  // cross[m][l] = sum_t p_{m,t} g_{l,t}
  std::vector<double> cross(M * M, 0.0);
  for (std::size_t t = 0; t < trace.rounds(); ++t) {
    const auto p = ledger.strategy(t);
    const auto g = trace.round(t);
    for (std::size_t m = 0; m < M; ++m) {
      if (p[m] == 0.0) continue;
      for (std::size_t l = 0; l < M; ++l) cross[m * M + l] += p[m] * g[l];
    }
  }
  double best = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t l = 0; l < M; ++l) {
      best = std::max(best, cross[m * M + l] - cross[m * M + m]);
    }
  }
  return best;
}

double subset_regret(const RewardTrace& trace, const RegretLedger& ledger) {
  check_aligned(trace, ledger);
  const auto best = best_fixed_subset(trace, ledger.plays_per_round());
  const auto sums = trace.column_sums();
  double best_total = 0.0;
  for (ArmIndex m : best.members()) best_total += sums[m];
  return best_total - received_from_trace(trace, ledger);
}

double dynamic_regret(const RewardTrace& means, const RegretLedger& ledger) {
  check_aligned(means, ledger);
  if (ledger.plays_per_round() != 1) {
    throw ContractViolation("dynamic regret needs a single-play ledger");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < means.rounds(); ++t) {
    const auto row = means.round(t);
    total += *std::max_element(row.begin(), row.end()) - row[ledger.choices(t)[0]];
  }
  return total;
}

SubsetAction best_fixed_subset(const RewardTrace& trace, std::size_t subset_size) {
  if (subset_size < 1 || subset_size > trace.num_arms()) {
    throw ArgumentError("best_fixed_subset: N must lie in [1, M]");
  }
  const auto sums = trace.column_sums();
  std::vector<ArmIndex> order(sums.size());
  std::iota(order.begin(), order.end(), ArmIndex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](ArmIndex a, ArmIndex b) { return sums[a] > sums[b]; });
  order.resize(subset_size);
  return SubsetAction(std::move(order));
}

void log_warning(std::string_view message) {
  // Clamping can fire every round on a misdeclared scenario; cap the noise.
  static std::atomic<int> emitted{0};
  constexpr int kMaxWarnings = 20;
  const int n = emitted.fetch_add(1);
  if (n < kMaxWarnings) {
    std::cerr << "banditlab: warning: " << message << '\n';
  } else if (n == kMaxWarnings) {
    std::cerr << "banditlab: warning: further warnings suppressed\n";
  }
}

double normalize_reward(double g, RewardBounds bounds) {
  if (!(bounds.lo < bounds.hi)) {
    throw ConfigError("normalize_reward: bounds need g_min < g_max");
  }
  if (g < bounds.lo || g > bounds.hi) {
    std::ostringstream msg;
    msg << "reward " << g << " clamped to [" << bounds.lo << ", " << bounds.hi << "]";
    log_warning(msg.str());
    g = std::clamp(g, bounds.lo, bounds.hi);
  }
  return (g - bounds.lo) / (bounds.hi - bounds.lo);
}

const Selection& Policy::select(Rng& rng) {
  if (awaiting_observe_) {
    throw ContractViolation(name() + ": select called twice without observe");
  }
  last_ = do_select(rng);
  if (last_.arms.size() != plays_per_round()) {
    throw InternalError(name() + ": selection has wrong play count");
  }
  awaiting_observe_ = true;
  return last_;
}

void Policy::observe(std::span<const ArmIndex> arms, std::span<const double> rewards) {
  if (!awaiting_observe_) {
    throw ContractViolation(name() + ": observe called without a pending select");
  }
  if (arms.size() != rewards.size() ||
      !std::equal(arms.begin(), arms.end(), last_.arms.begin(), last_.arms.end())) {
    throw ContractViolation(name() + ": observed arms differ from the selection");
  }
  do_observe(arms, rewards);
  awaiting_observe_ = false;
}

void Policy::observe(ArmIndex arm, double reward) {
  observe(std::span<const ArmIndex>(&arm, 1), std::span<const double>(&reward, 1));
}

}  // namespace banditlab
