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

// Repeated normal-form games under bandit feedback, swap-regret learners,
// and the correlated-equilibrium gap of an empirical play distribution.

#ifndef BANDITLAB_GAME_HPP_
#define BANDITLAB_GAME_HPP_

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "banditlab/adversarial.hpp"
#include "banditlab/core.hpp"

namespace banditlab {

// Utilities for every joint action profile. Profiles are indexed row-major
// with player 0 most significant; utilities are stored per profile, one per
// player, and lie in [0, 1].
class GameMatrix {
 public:
  GameMatrix(std::vector<std::size_t> action_counts, std::vector<double> utilities);

  std::size_t num_players() const { return action_counts_.size(); }
  std::size_t num_actions(std::size_t player) const { return action_counts_[player]; }
  std::span<const std::size_t> action_counts() const { return action_counts_; }
  std::size_t num_profiles() const { return num_profiles_; }

  std::size_t profile_index(std::span<const ArmIndex> actions) const;
  std::vector<ArmIndex> profile(std::size_t index) const;

  double utility(std::size_t player, std::size_t profile_index) const {
    return utilities_[profile_index * num_players() + player];
  }
  double utility(std::size_t player, std::span<const ArmIndex> actions) const {
    return utility(player, profile_index(actions));
  }
  // Profile index after replacing one player's action.
  std::size_t deviate(std::size_t profile_index, std::size_t player, ArmIndex action) const;

 private:
  std::vector<std::size_t> action_counts_;
  std::vector<std::size_t> strides_;
  std::size_t num_profiles_;
  std::vector<double> utilities_;
};

// Parses "K, action counts, utilities" from whitespace-separated text; '#'
// starts a comment. Utilities are listed profile by profile, K per profile.
GameMatrix parse_game(std::string_view text);
GameMatrix load_game_file(const std::filesystem::path& path);

// Two-player chicken scaled to [0, 1]: (dare, swerve) per player.
GameMatrix chicken_game();
// Shapley's 3x3 cyclic game.
GameMatrix shapley_game();
// Matching pennies shifted to [0, 1].
GameMatrix matching_pennies();
// Every constant game with utility c.
GameMatrix constant_game(std::vector<std::size_t> action_counts, double c);
// K players each choose one of R resources; resource r pays value[r] split
// equally among the players choosing it.
GameMatrix congestion_game(std::size_t num_players, std::vector<double> resource_values);
// Dispatch on "chicken", "shapley", "pennies" or a file path.
GameMatrix named_or_file_game(const std::string& spec);

struct StationaryOptions {
  double tolerance = 1e-8;
  std::size_t max_iterations = 10000;
  double damping = 1e-3;
};

// p with ||pQ - p||_1 <= tolerance for a row-stochastic M x M matrix stored
// row-major. Power iteration from `start` (uniform when empty); on failure the
// matrix is mixed with the uniform matrix and iteration restarts once.
MixedStrategy stationary_distribution(std::span<const double> q, std::size_t size,
                                      const StationaryOptions& options = {},
                                      std::span<const double> start = {});

// Turns M external-regret learners into a vanishing swap-regret learner:
// row m of Q is sub-learner m's distribution, the agent plays the stationary
// distribution p of Q, and sub-learner m is credited p_m times the
// importance-weighted reward of the played action.
class SwapRegretAgent final : public Policy {
 public:
  SwapRegretAgent(std::size_t num_actions, double gamma);

  std::string name() const override { return "swap-exp3"; }
  std::size_t num_arms() const override { return learners_.size(); }
  std::size_t state_bytes() const override;
  std::size_t state_scalars() const override;

  const MixedStrategy& strategy() const { return current_; }
  // Row-stochastic Q assembled at the latest select().
  std::span<const double> transition() const { return q_; }

 protected:
  Selection do_select(Rng& rng) override;
  void do_observe(std::span<const ArmIndex> arms,
                  std::span<const double> rewards) override;

 private:
  std::vector<Exp3State> learners_;
  std::vector<double> q_;
  MixedStrategy current_;
  std::vector<double> warm_start_;
};

class JointHistogram {
 public:
  explicit JointHistogram(std::size_t num_profiles) : counts_(num_profiles, 0) {}

  void add(std::size_t profile_index) {
    ++counts_.at(profile_index);
    ++total_;
  }
  std::span<const std::size_t> counts() const { return counts_; }
  std::size_t total() const { return total_; }

 private:
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
};

struct PlayerRecord {
  RegretLedger ledger;
  // Utilities of each own action against the realized opponent actions.
  RewardTrace counterfactual;
};

struct GameResult {
  JointHistogram histogram;
  std::vector<PlayerRecord> players;
  std::vector<std::size_t> profile_sequence;
};

// T simultaneous rounds; each agent sees only its own realized utility.
GameResult play_game(const GameMatrix& game, std::span<Policy* const> agents,
                     std::size_t rounds, Rng& rng);

// max over players k and own actions (m, l) of
// sum_{a : a_k = m} pi(a) [u_k(l, a_-k) - u_k(a)]. At most 0 for an exact
// correlated equilibrium.
double ce_gap(const JointHistogram& histogram, const GameMatrix& game);

}  // namespace banditlab

#endif  // BANDITLAB_GAME_HPP_
