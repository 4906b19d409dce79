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

#include "banditlab/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "banditlab/errors.hpp"

namespace banditlab {
namespace {

void check_unit_reward(double reward) {
  if (!(reward >= 0.0 && reward <= 1.0)) {
    throw ContractViolation("stochastic policies expect rewards in [0, 1]");
  }
}

double ucb_index(double mean, double log_t, double n) {
  return mean + std::sqrt(2.0 * log_t / n);
}

Selection single(std::size_t num_arms, ArmIndex arm) {
  return {{arm}, MixedStrategy::point_mass(num_arms, arm)};
}

}  // namespace

ArmIndex ucb1_select(const Ucb1State& state) {
  const std::size_t M = state.pulls.size();
  for (ArmIndex m = 0; m < M; ++m) {
    if (state.pulls[m] == 0) return m;
  }
  const double log_t = std::log(static_cast<double>(state.t + 1));
  ArmIndex best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (ArmIndex m = 0; m < M; ++m) {
    const double n = static_cast<double>(state.pulls[m]);
    const double index = ucb_index(state.sums[m] / n, log_t, n);
    if (index > best_index) {
      best_index = index;
      best = m;
    }
  }
  return best;
}

void ucb1_observe(Ucb1State& state, ArmIndex arm, double reward) {
  check_unit_reward(reward);
  if (arm >= state.pulls.size()) throw ArgumentError("ucb1: arm out of range");
  ++state.pulls[arm];
  state.sums[arm] += reward;
  ++state.t;
}

DiscountedUcbState::DiscountedUcbState(std::size_t num_arms, double discount)
    : discount(discount), weighted_pulls(num_arms, 0.0), weighted_sums(num_arms, 0.0) {
  if (!(discount > 0.0 && discount <= 1.0)) {
    throw ConfigError("discounted UCB needs discount in (0, 1]");
  }
}

ArmIndex discounted_ucb_select(const DiscountedUcbState& state) {
  const std::size_t M = state.weighted_pulls.size();
  for (ArmIndex m = 0; m < M; ++m) {
    // A long-unplayed arm may underflow to zero; it is unexplored again.
    if (state.weighted_pulls[m] == 0.0) return m;
  }
  const double effective_t = std::accumulate(state.weighted_pulls.begin(),
                                             state.weighted_pulls.end(), 0.0);
  const double log_t = std::log(effective_t + 1.0);
  ArmIndex best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (ArmIndex m = 0; m < M; ++m) {
    const double n = state.weighted_pulls[m];
    const double index = ucb_index(state.weighted_sums[m] / n, log_t, n);
    if (index > best_index) {
      best_index = index;
      best = m;
    }
  }
  return best;
}

void discounted_ucb_observe(DiscountedUcbState& state, ArmIndex arm, double reward) {
  check_unit_reward(reward);
  if (arm >= state.weighted_pulls.size()) {
    throw ArgumentError("discounted UCB: arm out of range");
  }
  if (state.discount != 1.0) {
    for (double& n : state.weighted_pulls) n *= state.discount;
    for (double& s : state.weighted_sums) s *= state.discount;
  }
  state.weighted_pulls[arm] += 1.0;
  state.weighted_sums[arm] += reward;
}

SlidingWindowState::SlidingWindowState(std::size_t num_arms, std::size_t window)
    : window_(window), counts_(num_arms, 0), sums_(num_arms, 0.0) {
  if (window == 0) throw ConfigError("sliding window length must be positive");
}

void SlidingWindowState::push(ArmIndex arm, double reward) {
  check_unit_reward(reward);
  if (arm >= counts_.size()) throw ArgumentError("sliding window: arm out of range");
  buffer_.emplace_back(arm, reward);
  ++counts_[arm];
  sums_[arm] += reward;
  if (buffer_.size() > window_) {
    const auto [old_arm, old_reward] = buffer_.front();
    buffer_.pop_front();
    --counts_[old_arm];
    sums_[old_arm] -= old_reward;
  }
  ++t_;
  // Incremental add/subtract drifts for non-dyadic rewards; rebuild the sums
  // from the buffer once per window turnover.
  if (++pushes_since_resum_ >= window_) resum();
}

void SlidingWindowState::resum() {
  std::fill(sums_.begin(), sums_.end(), 0.0);
  for (const auto& [arm, reward] : buffer_) sums_[arm] += reward;
  pushes_since_resum_ = 0;
}

ArmIndex sliding_window_ucb_select(const SlidingWindowState& state) {
  const std::size_t M = state.num_arms();
  for (ArmIndex m = 0; m < M; ++m) {
    if (state.count(m) == 0) return m;
  }
  const std::size_t round = state.t() + 1;
  const double log_t = std::log(static_cast<double>(std::min(round, state.window())));
  ArmIndex best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (ArmIndex m = 0; m < M; ++m) {
    const double n = static_cast<double>(state.count(m));
    const double index = ucb_index(state.sum(m) / n, log_t, n);
    if (index > best_index) {
      best_index = index;
      best = m;
    }
  }
  return best;
}

void PageHinkleyState::reset() {
  running_mean = 0.0;
  samples = 0;
  deviation = 0.0;
  min_deviation = 0.0;
  min_round = round;
}

PageHinkleyResult page_hinkley_step(PageHinkleyState& state, double x) {
  if (!std::isfinite(x)) throw ArgumentError("page_hinkley_step: sample not finite");
  const std::size_t now = state.round++;
  ++state.samples;
  state.running_mean += (x - state.running_mean) / static_cast<double>(state.samples);
  const double centred = x - state.running_mean;
  state.deviation +=
      (state.direction == ChangeDirection::kIncrease ? centred : -centred) - state.drift;
  if (state.samples == 1 || state.deviation < state.min_deviation) {
    state.min_deviation = state.deviation;
    state.min_round = now;
  }
  PageHinkleyResult result;
  if (state.deviation - state.min_deviation > state.threshold) {
    result.alarm = true;
    result.change_round = state.min_round;
    state.reset();
  }
  return result;
}

Ucb1Policy::Ucb1Policy(std::size_t num_arms) : state_(num_arms) {
  if (num_arms == 0) throw ArgumentError("ucb1 needs at least one arm");
}

Selection Ucb1Policy::do_select(Rng&) { return single(num_arms(), ucb1_select(state_)); }

void Ucb1Policy::do_observe(std::span<const ArmIndex> arms,
                            std::span<const double> rewards) {
  ucb1_observe(state_, arms[0], rewards[0]);
}

std::size_t Ucb1Policy::state_bytes() const {
  return sizeof(*this) + state_.pulls.capacity() * sizeof(std::size_t) +
         state_.sums.capacity() * sizeof(double);
}

std::size_t Ucb1Policy::state_scalars() const { return 2 * num_arms() + 1; }

DiscountedUcbPolicy::DiscountedUcbPolicy(std::size_t num_arms, double discount)
    : state_(num_arms, discount) {
  if (num_arms == 0) throw ArgumentError("discounted UCB needs at least one arm");
}

Selection DiscountedUcbPolicy::do_select(Rng&) {
  return single(num_arms(), discounted_ucb_select(state_));
}

void DiscountedUcbPolicy::do_observe(std::span<const ArmIndex> arms,
                                     std::span<const double> rewards) {
  discounted_ucb_observe(state_, arms[0], rewards[0]);
}

std::size_t DiscountedUcbPolicy::state_bytes() const {
  return sizeof(*this) + 2 * state_.weighted_pulls.capacity() * sizeof(double);
}

std::size_t DiscountedUcbPolicy::state_scalars() const { return 2 * num_arms() + 1; }

SlidingWindowUcbPolicy::SlidingWindowUcbPolicy(std::size_t num_arms, std::size_t window)
    : state_(num_arms, window) {
  if (num_arms == 0) throw ArgumentError("sliding-window UCB needs at least one arm");
}

Selection SlidingWindowUcbPolicy::do_select(Rng&) {
  return single(num_arms(), sliding_window_ucb_select(state_));
}

void SlidingWindowUcbPolicy::do_observe(std::span<const ArmIndex> arms,
                                        std::span<const double> rewards) {
  state_.push(arms[0], rewards[0]);
}

std::size_t SlidingWindowUcbPolicy::state_bytes() const {
  return sizeof(*this) + state_.buffer().size() * sizeof(std::pair<ArmIndex, double>) +
         num_arms() * (sizeof(std::size_t) + sizeof(double));
}

std::size_t SlidingWindowUcbPolicy::state_scalars() const {
  return 2 * state_.buffer().size() + 2 * num_arms() + 2;
}

PageHinkleyUcbPolicy::PageHinkleyUcbPolicy(std::size_t num_arms, double threshold,
                                           double drift)
    : ucb_(num_arms), threshold_(threshold), drift_(drift) {
  if (num_arms == 0) throw ArgumentError("ph-ucb needs at least one arm");
  detectors_.reserve(2 * num_arms);
  for (std::size_t m = 0; m < num_arms; ++m) {
    detectors_.emplace_back(threshold, drift, ChangeDirection::kIncrease);
    detectors_.emplace_back(threshold, drift, ChangeDirection::kDecrease);
  }
}

Selection PageHinkleyUcbPolicy::do_select(Rng&) {
  return single(num_arms(), ucb1_select(ucb_));
}

void PageHinkleyUcbPolicy::do_observe(std::span<const ArmIndex> arms,
                                      std::span<const double> rewards) {
  const ArmIndex arm = arms[0];
  ucb1_observe(ucb_, arm, rewards[0]);
  const bool up = page_hinkley_step(detectors_[2 * arm], rewards[0]).alarm;
  const bool down = page_hinkley_step(detectors_[2 * arm + 1], rewards[0]).alarm;
  if (up || down) {
    ucb_ = Ucb1State(num_arms());
    for (auto& d : detectors_) d = PageHinkleyState(threshold_, drift_, d.direction);
    ++restarts_;
  }
}

std::size_t PageHinkleyUcbPolicy::state_bytes() const {
  return sizeof(*this) + ucb_.pulls.capacity() * sizeof(std::size_t) +
         ucb_.sums.capacity() * sizeof(double) +
         detectors_.capacity() * sizeof(PageHinkleyState);
}

std::size_t PageHinkleyUcbPolicy::state_scalars() const { return 2 * num_arms() + 1 + 2 * num_arms() * 7; }

}  // namespace banditlab
