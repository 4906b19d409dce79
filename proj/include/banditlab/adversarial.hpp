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

// Exponential-weights policies for adversarial rewards in [0, 1].
//
// Exp3 plays one arm per round. Exp3M plays N of M arms: weights that would
// push an inclusion probability above one are capped at a common level
// alpha, the resulting marginals are rounded to a concrete N-subset by
// dependent rounding, and capped arms skip the update that round.
//
// Per round, Exp3M costs O(M) for the cap test and the rounding plus
// O(M log N) for locating alpha (only the top ~N weights can be capped);
// state is O(M).

#ifndef BANDITLAB_ADVERSARIAL_HPP_
#define BANDITLAB_ADVERSARIAL_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "banditlab/core.hpp"

namespace banditlab {

// Weights are rescaled by their maximum once any exceeds this.
inline constexpr double kWeightCeiling = 1e100;

struct Exp3State {
  Exp3State(std::size_t num_arms, double gamma);

  std::vector<double> weights;
  double gamma;

  std::size_t num_arms() const { return weights.size(); }
};

// p_m = (1 - gamma) w_m / sum(w) + gamma / M.
MixedStrategy exp3_distribution(const Exp3State& state);

// w_arm *= exp(gamma * (reward01 / p_arm) / M).
void exp3_update(Exp3State& state, ArmIndex arm, double reward01, double p_arm);

struct Exp3mState {
  Exp3mState(std::size_t num_arms, std::size_t plays, double gamma);

  std::vector<double> weights;
  double gamma;
  std::size_t plays;  // N
  // capped[m] != 0 when arm m was capped by the latest distribution call.
  std::vector<char> capped;

  std::size_t num_arms() const { return weights.size(); }
};

// theta = (1/N - gamma/M) / (1 - gamma), the weight share at which an
// inclusion probability reaches one.
double exp3m_cap_share(std::size_t num_arms, std::size_t plays, double gamma);

// p_m = N [(1 - gamma) w'_m / sum(w') + gamma / M] with w' = min(w, alpha*)
// when the largest weight holds at least a theta share; refreshes
// state.capped. Sum is N and every p_m <= 1.
MixedStrategy exp3m_distribution(Exp3mState& state);

// alpha* with alpha* / (c alpha* + sum_{w_m < alpha*} w_m) = theta, where c
// counts the weights >= alpha*. Capping every such weight at alpha* sets
// their inclusion probability to exactly one.
double find_cap_threshold(std::span<const double> weights, double theta);

// Samples exactly N arms whose inclusion frequencies equal the marginals p.
SubsetAction depround(const MixedStrategy& p, Rng& rng);

// For non-capped selected arms: w_m *= exp(N gamma (r_m / p_m) / M).
// rewards01[i] belongs to subset.members()[i].
void exp3m_update(Exp3mState& state, const SubsetAction& subset,
                  std::span<const double> rewards01, const MixedStrategy& p);

// min{1, sqrt(M ln(M/N) / ((e - 1) N T))}.
double default_gamma(std::size_t num_arms, std::size_t plays, std::size_t horizon);

class Exp3Policy final : public Policy {
 public:
  Exp3Policy(std::size_t num_arms, double gamma);

  std::string name() const override { return "exp3"; }
  std::size_t num_arms() const override { return state_.num_arms(); }
  std::size_t state_bytes() const override;
  std::size_t state_scalars() const override;
  const Exp3State& state() const { return state_; }

 protected:
  Selection do_select(Rng& rng) override;
  void do_observe(std::span<const ArmIndex> arms,
                  std::span<const double> rewards) override;

 private:
  Exp3State state_;
  MixedStrategy current_;
};

class Exp3mPolicy final : public Policy {
 public:
  Exp3mPolicy(std::size_t num_arms, std::size_t plays, double gamma);

  std::string name() const override { return "exp3m"; }
  std::size_t num_arms() const override { return state_.num_arms(); }
  std::size_t plays_per_round() const override { return state_.plays; }
  std::size_t state_bytes() const override;
  std::size_t state_scalars() const override;
  const Exp3mState& state() const { return state_; }

 protected:
  Selection do_select(Rng& rng) override;
  void do_observe(std::span<const ArmIndex> arms,
                  std::span<const double> rewards) override;

 private:
  Exp3mState state_;
  MixedStrategy current_;
};

// Plays a uniformly random N-subset every round.
class UniformSubsetPolicy final : public Policy {
 public:
  UniformSubsetPolicy(std::size_t num_arms, std::size_t plays);

  std::string name() const override { return "uniform"; }
  std::size_t num_arms() const override { return num_arms_; }
  std::size_t plays_per_round() const override { return plays_; }
  std::size_t state_bytes() const override { return sizeof(*this); }
  std::size_t state_scalars() const override { return 2; }

 protected:
  Selection do_select(Rng& rng) override;
  void do_observe(std::span<const ArmIndex>, std::span<const double>) override {}

 private:
  std::size_t num_arms_;
  std::size_t plays_;
};

// Always plays the same subset; the forced-oracle baseline.
class FixedSubsetPolicy final : public Policy {
 public:
  FixedSubsetPolicy(std::size_t num_arms, SubsetAction subset);

  std::string name() const override { return "fixed"; }
  std::size_t num_arms() const override { return num_arms_; }
  std::size_t plays_per_round() const override { return subset_.size(); }
  std::size_t state_bytes() const override {
    return sizeof(*this) + subset_.size() * sizeof(ArmIndex);
  }
  std::size_t state_scalars() const override { return subset_.size() + 1; }

 protected:
  Selection do_select(Rng& rng) override;
  void do_observe(std::span<const ArmIndex>, std::span<const double>) override {}

 private:
  std::size_t num_arms_;
  SubsetAction subset_;
};

}  // namespace banditlab

#endif  // BANDITLAB_ADVERSARIAL_HPP_
