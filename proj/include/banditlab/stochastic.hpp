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

// Index policies for stochastic rewards in [0, 1]: UCB1, discounted UCB,
// sliding-window UCB, and the Page-Hinkley change detector.
//
// All indices share the shape mean + sqrt(2 ln t / n). The round number t
// counts the round being decided, so after k observations t = k + 1.

#ifndef BANDITLAB_STOCHASTIC_HPP_
#define BANDITLAB_STOCHASTIC_HPP_

#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "banditlab/core.hpp"

namespace banditlab {

struct Ucb1State {
  explicit Ucb1State(std::size_t num_arms)
      : pulls(num_arms, 0), sums(num_arms, 0.0) {}

  std::vector<std::size_t> pulls;
  std::vector<double> sums;
  std::size_t t = 0;  // observations so far
};

ArmIndex ucb1_select(const Ucb1State& state);
void ucb1_observe(Ucb1State& state, ArmIndex arm, double reward);

struct DiscountedUcbState {
  DiscountedUcbState(std::size_t num_arms, double discount);

  double discount;
  std::vector<double> weighted_pulls;
  std::vector<double> weighted_sums;
};

ArmIndex discounted_ucb_select(const DiscountedUcbState& state);
void discounted_ucb_observe(DiscountedUcbState& state, ArmIndex arm, double reward);

class SlidingWindowState {
 public:
  SlidingWindowState(std::size_t num_arms, std::size_t window);

  void push(ArmIndex arm, double reward);

  std::size_t window() const { return window_; }
  std::size_t t() const { return t_; }
  std::size_t num_arms() const { return counts_.size(); }
  const std::deque<std::pair<ArmIndex, double>>& buffer() const { return buffer_; }
  std::size_t count(ArmIndex m) const { return counts_[m]; }
  double sum(ArmIndex m) const { return sums_[m]; }

 private:
  void resum();

  std::size_t window_;
  std::size_t t_ = 0;
  std::deque<std::pair<ArmIndex, double>> buffer_;
  std::vector<std::size_t> counts_;
  std::vector<double> sums_;
  std::size_t pushes_since_resum_ = 0;
};

ArmIndex sliding_window_ucb_select(const SlidingWindowState& state);

enum class ChangeDirection { kIncrease, kDecrease };

// Page-Hinkley test for a shift of the stream mean. For kIncrease the
// cumulative deviation is m_t = sum (x_s - mean_s - delta); kDecrease
// mirrors the deviation sign.
struct PageHinkleyState {
  PageHinkleyState(double threshold, double drift,
                   ChangeDirection direction = ChangeDirection::kIncrease)
      : threshold(threshold), drift(drift), direction(direction) {}

  double threshold;  // lambda
  double drift;      // delta
  ChangeDirection direction;

  double running_mean = 0.0;
  std::size_t samples = 0;  // since the last reset
  double deviation = 0.0;   // m_t
  double min_deviation = 0.0;  // M_t
  std::size_t min_round = 0;   // round achieving M_t
  std::size_t round = 0;       // global, survives resets

  void reset();
};

struct PageHinkleyResult {
  bool alarm = false;
  // Estimated change round (zero-based global index) when alarm is set.
  std::size_t change_round = 0;
};

PageHinkleyResult page_hinkley_step(PageHinkleyState& state, double x);

class Ucb1Policy final : public Policy {
 public:
  explicit Ucb1Policy(std::size_t num_arms);

  std::string name() const override { return "ucb1"; }
  std::size_t num_arms() const override { return state_.pulls.size(); }
  std::size_t state_bytes() const override;
  std::size_t state_scalars() const override;
  const Ucb1State& state() const { return state_; }

 protected:
  Selection do_select(Rng& rng) override;
  void do_observe(std::span<const ArmIndex> arms,
                  std::span<const double> rewards) override;

 private:
  Ucb1State state_;
};

class DiscountedUcbPolicy final : public Policy {
 public:
  DiscountedUcbPolicy(std::size_t num_arms, double discount);

  std::string name() const override { return "discounted-ucb"; }
  std::size_t num_arms() const override { return state_.weighted_pulls.size(); }
  std::size_t state_bytes() const override;
  std::size_t state_scalars() const override;

 protected:
  Selection do_select(Rng& rng) override;
  void do_observe(std::span<const ArmIndex> arms,
                  std::span<const double> rewards) override;

 private:
  DiscountedUcbState state_;
};

class SlidingWindowUcbPolicy final : public Policy {
 public:
  SlidingWindowUcbPolicy(std::size_t num_arms, std::size_t window);

  std::string name() const override { return "sw-ucb"; }
  std::size_t num_arms() const override { return state_.num_arms(); }
  std::size_t state_bytes() const override;
  std::size_t state_scalars() const override;

 protected:
  Selection do_select(Rng& rng) override;
  void do_observe(std::span<const ArmIndex> arms,
                  std::span<const double> rewards) override;

 private:
  SlidingWindowState state_;
};

// UCB1 restarted whenever a two-sided Page-Hinkley detector on any arm's
// observed rewards alarms. The restart clears all arms and all detectors.
class PageHinkleyUcbPolicy final : public Policy {
 public:
  PageHinkleyUcbPolicy(std::size_t num_arms, double threshold, double drift);

  std::string name() const override { return "ph-ucb"; }
  std::size_t num_arms() const override { return ucb_.pulls.size(); }
  std::size_t state_bytes() const override;
  std::size_t state_scalars() const override;
  std::size_t restarts() const { return restarts_; }

 protected:
  Selection do_select(Rng& rng) override;
  void do_observe(std::span<const ArmIndex> arms,
                  std::span<const double> rewards) override;

 private:
  Ucb1State ucb_;
  // Two detectors (increase, decrease) per arm.
  std::vector<PageHinkleyState> detectors_;
  double threshold_;
  double drift_;
  std::size_t restarts_ = 0;
};

}  // namespace banditlab

#endif  // BANDITLAB_STOCHASTIC_HPP_
