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

#include "banditlab/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>

#include "banditlab/errors.hpp"

namespace banditlab {
namespace {

// Entries this close to 0 or 1 count as integral during rounding.
constexpr double kIntegralSlack = 1e-12;

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ConfigError("exploration rate gamma must lie in [0, 1]");
  }
}

void check_reward01(double r) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw ContractViolation("adversarial policies expect rewards in [0, 1]");
  }
}

void rescale_if_needed(std::vector<double>& weights) {
  const double top = *std::max_element(weights.begin(), weights.end());
  if (top > kWeightCeiling) {
    for (double& w : weights) w /= top;
  }
}

ArmIndex sample_index(std::span<const double> probs, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  ArmIndex last_positive = 0;
  for (ArmIndex m = 0; m < probs.size(); ++m) {
    if (probs[m] <= 0.0) continue;
    acc += probs[m];
    last_positive = m;
    if (u < acc) return m;
  }
  return last_positive;
}

bool is_fractional(double x) {
  return x > kIntegralSlack && x < 1.0 - kIntegralSlack;
}

double snap(double x) {
  if (x <= kIntegralSlack) return 0.0;
  if (x >= 1.0 - kIntegralSlack) return 1.0;
  return x;
}

}  // namespace

Exp3State::Exp3State(std::size_t num_arms, double gamma)
    : weights(num_arms, 1.0), gamma(gamma) {
  if (num_arms == 0) throw ArgumentError("exp3 needs at least one arm");
  check_gamma(gamma);
}

MixedStrategy exp3_distribution(const Exp3State& state) {
  const std::size_t M = state.num_arms();
  const double total = std::accumulate(state.weights.begin(), state.weights.end(), 0.0);
  if (!std::isfinite(total) || !(total > 0.0)) {
    throw NumericalError("exp3: weights are not finite and positive");
  }
  std::vector<double> probs(M);
  const double floor = state.gamma / static_cast<double>(M);
  for (std::size_t m = 0; m < M; ++m) {
    probs[m] = (1.0 - state.gamma) * state.weights[m] / total + floor;
  }
  return MixedStrategy(std::move(probs), 1.0);
}

void exp3_update(Exp3State& state, ArmIndex arm, double reward01, double p_arm) {
  if (arm >= state.num_arms()) throw ArgumentError("exp3: arm out of range");
  check_reward01(reward01);
  if (!(p_arm > 0.0)) {
    throw ContractViolation("exp3: played arm has zero probability");
  }
  const double estimate = reward01 / p_arm;
  state.weights[arm] *=
      std::exp(state.gamma * estimate / static_cast<double>(state.num_arms()));
  rescale_if_needed(state.weights);
}

Exp3mState::Exp3mState(std::size_t num_arms, std::size_t plays, double gamma)
    : weights(num_arms, 1.0), gamma(gamma), plays(plays), capped(num_arms, 0) {
  if (plays == 0 || plays > num_arms) {
    throw ArgumentError("exp3m needs 1 <= N <= M");
  }
  check_gamma(gamma);
}

double exp3m_cap_share(std::size_t num_arms, std::size_t plays, double gamma) {
  return (1.0 / static_cast<double>(plays) - gamma / static_cast<double>(num_arms)) /
         (1.0 - gamma);
}

double find_cap_threshold(std::span<const double> weights, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ArgumentError("find_cap_threshold: theta must lie in (0, 1)");
  }
  const std::size_t M = weights.size();
  if (M == 0) throw ArgumentError("find_cap_threshold: no weights");
  // At most ceil(1/theta) - 1 weights can be capped (c theta < 1), so only
  // the top k need ordering.
  const std::size_t k = std::min(M, static_cast<std::size_t>(std::ceil(1.0 / theta)));
  std::vector<double> sorted(weights.begin(), weights.end());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k),
                    sorted.end(), std::greater<>());
  // rest[c] = sum of everything below the top c, summed from the small end
  // so a dominant weight does not swamp the remainder.
  const double tail = std::accumulate(sorted.begin() + static_cast<std::ptrdiff_t>(k),
                                      sorted.end(), 0.0);
  std::vector<double> rest(k + 1);
  rest[k] = tail;
  for (std::size_t c = k; c-- > 0;) rest[c] = rest[c + 1] + sorted[c];

  for (std::size_t c = 1; c <= k; ++c) {
    const double denom = 1.0 - static_cast<double>(c) * theta;
    if (denom <= 0.0) break;
    const double alpha = theta * rest[c] / denom;
    const double next = c < M ? sorted[c] : 0.0;
    const double slack = 1e-12;
    if (alpha >= next * (1.0 - slack) && alpha <= sorted[c - 1] * (1.0 + slack)) {
      return alpha;
    }
  }
  std::ostringstream msg;
  msg << "find_cap_threshold: no cap level for theta = " << theta;
  throw InternalError(msg.str());
}

MixedStrategy exp3m_distribution(Exp3mState& state) {
  const std::size_t M = state.num_arms();
  const std::size_t N = state.plays;
  const double n = static_cast<double>(N);
  std::fill(state.capped.begin(), state.capped.end(), 0);
  if (N == M) return MixedStrategy(std::vector<double>(M, 1.0), n);
  if (state.gamma == 1.0) return MixedStrategy::uniform(M, n);

  const double theta = exp3m_cap_share(M, N, state.gamma);
  if (!(theta > 0.0)) {
    throw ConfigError("exp3m: gamma too large for N/M (cap share <= 0)");
  }
  double total = 0.0;
  double top = 0.0;
  for (double w : state.weights) {
    total += w;
    top = std::max(top, w);
  }
  if (!std::isfinite(total) || !(total > 0.0)) {
    throw NumericalError("exp3m: weights are not finite and positive");
  }

  std::vector<double> probs(M);
  const double floor = state.gamma / static_cast<double>(M);
  if (top >= theta * total) {
    const double alpha = find_cap_threshold(state.weights, theta);
    double capped_total = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      if (state.weights[m] >= alpha) {
        state.capped[m] = 1;
        capped_total += alpha;
      } else {
        capped_total += state.weights[m];
      }
    }
    for (std::size_t m = 0; m < M; ++m) {
      probs[m] = state.capped[m]
                     ? 1.0
                     : n * ((1.0 - state.gamma) * state.weights[m] / capped_total + floor);
    }
  } else {
    for (std::size_t m = 0; m < M; ++m) {
      probs[m] = n * ((1.0 - state.gamma) * state.weights[m] / total + floor);
    }
  }
  return MixedStrategy(std::move(probs), n);
}

SubsetAction depround(const MixedStrategy& p, Rng& rng) {
  const double target = p.target_sum();
  const double rounded = std::round(target);
  if (std::abs(target - rounded) > kMassTolerance || rounded < 0.0) {
    throw ContractViolation("depround: marginals must sum to an integer N");
  }
  const auto N = static_cast<std::size_t>(rounded);
  const std::size_t M = p.size();
  std::vector<double> x(p.probs().begin(), p.probs().end());
  for (double& v : x) v = snap(v);

  auto next_fractional = [&](std::size_t from) {
    while (from < M && !is_fractional(x[from])) ++from;
    return from;
  };
  std::size_t i = next_fractional(0);
  std::size_t j = next_fractional(i + 1);
  while (i < M && j < M) {
    const double beta = std::min(1.0 - x[i], x[j]);
    const double delta = std::min(x[i], 1.0 - x[j]);
    if (uniform01(rng) * (beta + delta) < delta) {
      x[i] += beta;
      x[j] -= beta;
    } else {
      x[i] -= delta;
      x[j] += delta;
    }
    x[i] = snap(x[i]);
    x[j] = snap(x[j]);
    const bool i_frac = is_fractional(x[i]);
    const bool j_frac = is_fractional(x[j]);
    if (i_frac) {
      j = next_fractional(j + 1);
    } else if (j_frac) {
      i = j;
      j = next_fractional(j + 1);
    } else {
      i = next_fractional(j + 1);
      j = next_fractional(i + 1);
    }
  }

  std::vector<ArmIndex> members;
  members.reserve(N);
  for (std::size_t m = 0; m < M; ++m) {
    // A lone leftover fraction is rounding noise around 0 or 1.
    if (x[m] > 0.5) members.push_back(m);
  }
  if (members.size() != N) {
    throw InternalError("depround: rounding produced the wrong subset size");
  }
  return SubsetAction(std::move(members));
}

void exp3m_update(Exp3mState& state, const SubsetAction& subset,
                  std::span<const double> rewards01, const MixedStrategy& p) {
  if (rewards01.size() != subset.size()) {
    throw ContractViolation("exp3m: one reward per selected arm required");
  }
  const double scale = static_cast<double>(state.plays) * state.gamma /
                       static_cast<double>(state.num_arms());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    const ArmIndex m = subset.members()[i];
    if (m >= state.num_arms()) throw ArgumentError("exp3m: arm out of range");
    check_reward01(rewards01[i]);
    if (!(p[m] > 0.0)) {
      throw ContractViolation("exp3m: played arm has zero probability");
    }
    if (state.capped[m]) continue;
    state.weights[m] *= std::exp(scale * rewards01[i] / p[m]);
  }
  rescale_if_needed(state.weights);
}

double default_gamma(std::size_t num_arms, std::size_t plays, std::size_t horizon) {
  if (horizon == 0) throw ArgumentError("default_gamma: horizon must be positive");
  if (plays == 0 || plays > num_arms) throw ArgumentError("default_gamma: need 1 <= N <= M");
  const double M = static_cast<double>(num_arms);
  const double N = static_cast<double>(plays);
  const double T = static_cast<double>(horizon);
  return std::min(1.0, std::sqrt(M * std::log(M / N) /
                                 ((std::numbers::e - 1.0) * N * T)));
}

Exp3Policy::Exp3Policy(std::size_t num_arms, double gamma) : state_(num_arms, gamma) {}

Selection Exp3Policy::do_select(Rng& rng) {
  current_ = exp3_distribution(state_);
  const ArmIndex arm = sample_index(current_.probs(), rng);
  return {{arm}, current_};
}

void Exp3Policy::do_observe(std::span<const ArmIndex> arms,
                            std::span<const double> rewards) {
  exp3_update(state_, arms[0], rewards[0], current_[arms[0]]);
}

std::size_t Exp3Policy::state_bytes() const {
  return sizeof(*this) + (state_.weights.capacity() + current_.size()) * sizeof(double);
}

std::size_t Exp3Policy::state_scalars() const { return 2 * num_arms() + 2; }

Exp3mPolicy::Exp3mPolicy(std::size_t num_arms, std::size_t plays, double gamma)
    : state_(num_arms, plays, gamma) {}

Selection Exp3mPolicy::do_select(Rng& rng) {
  current_ = exp3m_distribution(state_);
  SubsetAction subset = depround(current_, rng);
  return {{subset.members().begin(), subset.members().end()}, current_};
}

void Exp3mPolicy::do_observe(std::span<const ArmIndex> arms,
                             std::span<const double> rewards) {
  exp3m_update(state_, SubsetAction({arms.begin(), arms.end()}), rewards, current_);
}

std::size_t Exp3mPolicy::state_bytes() const {
  return sizeof(*this) + (state_.weights.capacity() + current_.size()) * sizeof(double) +
         state_.capped.capacity() * sizeof(char);
}

// weights, capped flags, current marginals, plus gamma, N and M.
std::size_t Exp3mPolicy::state_scalars() const { return 3 * num_arms() + 3; }

UniformSubsetPolicy::UniformSubsetPolicy(std::size_t num_arms, std::size_t plays)
    : num_arms_(num_arms), plays_(plays) {
  if (plays == 0 || plays > num_arms) throw ArgumentError("uniform policy needs 1 <= N <= M");
}

Selection UniformSubsetPolicy::do_select(Rng& rng) {
  std::vector<ArmIndex> arms(num_arms_);
  std::iota(arms.begin(), arms.end(), ArmIndex{0});
  for (std::size_t i = 0; i < plays_; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(rng, num_arms_ - i));
    std::swap(arms[i], arms[j]);
  }
  arms.resize(plays_);
  std::sort(arms.begin(), arms.end());
  return {std::move(arms), MixedStrategy::uniform(num_arms_, static_cast<double>(plays_))};
}

FixedSubsetPolicy::FixedSubsetPolicy(std::size_t num_arms, SubsetAction subset)
    : num_arms_(num_arms), subset_(std::move(subset)) {
  if (subset_.size() == 0) throw ArgumentError("fixed policy needs a non-empty subset");
  for (ArmIndex m : subset_.members()) {
    if (m >= num_arms) throw ArgumentError("fixed policy: arm out of range");
  }
}

Selection FixedSubsetPolicy::do_select(Rng&) {
  std::vector<double> probs(num_arms_, 0.0);
  for (ArmIndex m : subset_.members()) probs[m] = 1.0;
  return {{subset_.members().begin(), subset_.members().end()},
          MixedStrategy(std::move(probs), static_cast<double>(subset_.size()))};
}

}  // namespace banditlab
