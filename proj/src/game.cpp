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

#include "banditlab/game.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "banditlab/errors.hpp"

namespace banditlab {

GameMatrix::GameMatrix(std::vector<std::size_t> action_counts, std::vector<double> utilities)
    : action_counts_(std::move(action_counts)), utilities_(std::move(utilities)) {
  if (action_counts_.empty()) throw ArgumentError("game needs at least one player");
  const std::size_t K = action_counts_.size();
  strides_.assign(K, 1);
  num_profiles_ = 1;
  for (std::size_t k = K; k-- > 0;) {
    if (action_counts_[k] == 0) throw ArgumentError("every player needs an action");
    strides_[k] = num_profiles_;
    num_profiles_ *= action_counts_[k];
  }
  if (utilities_.size() != num_profiles_ * K) {
    std::ostringstream msg;
    msg << "game utility table has " << utilities_.size() << " entries, expected "
        << num_profiles_ * K;
    throw ArgumentError(msg.str());
  }
  for (double u : utilities_) {
    if (!(u >= 0.0 && u <= 1.0)) throw ArgumentError("game utilities must lie in [0, 1]");
  }
}

std::size_t GameMatrix::profile_index(std::span<const ArmIndex> actions) const {
  if (actions.size() != num_players()) throw ArgumentError("profile has wrong player count");
  std::size_t index = 0;
  for (std::size_t k = 0; k < actions.size(); ++k) {
    if (actions[k] >= action_counts_[k]) throw ArgumentError("profile action out of range");
    index += actions[k] * strides_[k];
  }
  return index;
}

std::vector<ArmIndex> GameMatrix::profile(std::size_t index) const {
  std::vector<ArmIndex> actions(num_players());
  for (std::size_t k = 0; k < num_players(); ++k) {
    actions[k] = (index / strides_[k]) % action_counts_[k];
  }
  return actions;
}

std::size_t GameMatrix::deviate(std::size_t profile_index, std::size_t player,
                                ArmIndex action) const {
  const std::size_t own = (profile_index / strides_[player]) % action_counts_[player];
  return profile_index - own * strides_[player] + action * strides_[player];
}

GameMatrix parse_game(std::string_view text) {
  std::istringstream lines{std::string(text)};
  std::vector<double> tokens;
  std::string line;
  while (std::getline(lines, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::string word;
    while (words >> word) {
      try {
        std::size_t used = 0;
        tokens.push_back(std::stod(word, &used));
        if (used != word.size()) throw std::invalid_argument(word);
      } catch (const std::exception&) {
        throw InputError("game file: bad number '" + word + "'");
      }
    }
  }
  auto as_count = [](double v, const char* what) {
    if (!(v >= 1.0) || v != std::floor(v)) {
      throw InputError(std::string("game file: ") + what + " must be a positive integer");
    }
    return static_cast<std::size_t>(v);
  };
  if (tokens.empty()) throw InputError("game file is empty");
  const std::size_t K = as_count(tokens[0], "player count");
  if (tokens.size() < 1 + K) throw InputError("game file: missing action counts");
  std::vector<std::size_t> counts;
  std::size_t profiles = 1;
  for (std::size_t k = 0; k < K; ++k) {
    counts.push_back(as_count(tokens[1 + k], "action count"));
    profiles *= counts.back();
  }
  if (tokens.size() != 1 + K + profiles * K) {
    std::ostringstream msg;
    msg << "game file: expected " << profiles * K << " utilities, found "
        << tokens.size() - 1 - K;
    throw InputError(msg.str());
  }
  try {
    return GameMatrix(std::move(counts), {tokens.begin() + 1 + static_cast<std::ptrdiff_t>(K),
                                          tokens.end()});
  } catch (const ArgumentError& e) {
    throw InputError(std::string("game file: ") + e.what());
  }
}

GameMatrix load_game_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open game file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_game(buffer.str());
}

GameMatrix chicken_game() {
  // Actions: 0 = dare, 1 = swerve. Raw payoffs 0/2/6/7 divided by 7.
  const double s = 1.0 / 7.0;
  return GameMatrix({2, 2}, {0.0, 0.0,          // dare, dare
                             7 * s, 2 * s,      // dare, swerve
                             2 * s, 7 * s,      // swerve, dare
                             6 * s, 6 * s});    // swerve, swerve
}

GameMatrix shapley_game() {
  const double a[3][3] = {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}};
  const double b[3][3] = {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
  std::vector<double> u;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      u.push_back(a[i][j]);
      u.push_back(b[i][j]);
    }
  }
  return GameMatrix({3, 3}, std::move(u));
}

GameMatrix matching_pennies() {
  return GameMatrix({2, 2}, {1, 0, 0, 1, 0, 1, 1, 0});
}

GameMatrix constant_game(std::vector<std::size_t> action_counts, double c) {
  std::size_t profiles = 1;
  for (std::size_t n : action_counts) profiles *= n;
  const std::size_t K = action_counts.size();
  return GameMatrix(std::move(action_counts), std::vector<double>(profiles * K, c));
}

GameMatrix congestion_game(std::size_t num_players, std::vector<double> resource_values) {
  if (num_players == 0 || resource_values.empty()) {
    throw ArgumentError("congestion game needs players and resources");
  }
  const std::size_t R = resource_values.size();
  std::vector<std::size_t> counts(num_players, R);
  std::size_t profiles = 1;
  for (std::size_t k = 0; k < num_players; ++k) profiles *= R;
  std::vector<double> u;
  u.reserve(profiles * num_players);
  std::vector<std::size_t> load(R);
  // Same ordering as GameMatrix: player 0 most significant.
  std::vector<std::size_t> choice(num_players, 0);
  for (std::size_t p = 0; p < profiles; ++p) {
    std::size_t rem = p;
    for (std::size_t k = num_players; k-- > 0;) {
      choice[k] = rem % R;
      rem /= R;
    }
    std::fill(load.begin(), load.end(), 0);
    for (std::size_t c : choice) ++load[c];
    for (std::size_t k = 0; k < num_players; ++k) {
      u.push_back(resource_values[choice[k]] / static_cast<double>(load[choice[k]]));
    }
  }
  return GameMatrix(std::move(counts), std::move(u));
}

GameMatrix named_or_file_game(const std::string& spec) {
  if (spec == "chicken") return chicken_game();
  if (spec == "shapley") return shapley_game();
  if (spec == "pennies" || spec == "matching-pennies") return matching_pennies();
  return load_game_file(spec);
}

namespace {

double residual_of(std::span<const double> q, std::size_t M, const std::vector<double>& p) {
  double residual = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < M; ++i) v += p[i] * q[i * M + j];
    residual += std::abs(v - p[j]);
  }
  return residual;
}

bool iterate(std::span<const double> q, std::size_t M, const StationaryOptions& options,
             std::vector<double>& p) {
  std::vector<double> next(M);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < M; ++i) {
      const double pi = p[i];
      if (pi == 0.0) continue;
      const double* row = q.data() + i * M;
      for (std::size_t j = 0; j < M; ++j) next[j] += pi * row[j];
    }
    double residual = 0.0;
    double total = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      residual += std::abs(next[j] - p[j]);
      total += next[j];
    }
    // p itself meets the tolerance; keep it rather than the untested step.
    if (residual <= options.tolerance) return true;
    for (std::size_t j = 0; j < M; ++j) next[j] /= total;
    p.swap(next);
  }
  return residual_of(q, M, p) <= options.tolerance;
}

}  // namespace

MixedStrategy stationary_distribution(std::span<const double> q, std::size_t M,
                                      const StationaryOptions& options,
                                      std::span<const double> start) {
  if (M == 0 || q.size() != M * M) {
    throw ArgumentError("stationary_distribution: matrix must be M x M");
  }
  for (std::size_t i = 0; i < M; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      const double v = q[i * M + j];
      if (!(v >= 0.0)) throw ArgumentError("stationary_distribution: negative entry");
      row += v;
    }
    if (std::abs(row - 1.0) > 1e-9) {
      throw ArgumentError("stationary_distribution: rows must sum to 1");
    }
  }
  const double uniform = 1.0 / static_cast<double>(M);
  std::vector<double> p(M, uniform);
  if (start.size() == M) p.assign(start.begin(), start.end());

  if (iterate(q, M, options, p)) return MixedStrategy(std::move(p), 1.0);

  std::vector<double> damped(q.begin(), q.end());
  for (double& v : damped) v = (1.0 - options.damping) * v + options.damping * uniform;
  p.assign(M, uniform);
  if (iterate(damped, M, options, p)) return MixedStrategy(std::move(p), 1.0);
  throw NumericalError("stationary_distribution: power iteration did not converge");
}

SwapRegretAgent::SwapRegretAgent(std::size_t num_actions, double gamma)
    : q_(num_actions * num_actions, 0.0) {
  if (num_actions == 0) throw ArgumentError("swap agent needs at least one action");
  learners_.reserve(num_actions);
  for (std::size_t m = 0; m < num_actions; ++m) learners_.emplace_back(num_actions, gamma);
  current_ = MixedStrategy::uniform(num_actions);
}

Selection SwapRegretAgent::do_select(Rng& rng) {
  const std::size_t M = num_arms();
  for (std::size_t m = 0; m < M; ++m) {
    const MixedStrategy row = exp3_distribution(learners_[m]);
    std::copy(row.probs().begin(), row.probs().end(), q_.begin() + static_cast<std::ptrdiff_t>(m * M));
  }
  // Q moves slowly between rounds, so last round's p is a close start.
  current_ = stationary_distribution(q_, M, {}, warm_start_);
  warm_start_.assign(current_.probs().begin(), current_.probs().end());

  const double u = uniform01(rng);
  double acc = 0.0;
  ArmIndex action = M - 1;
  for (ArmIndex m = 0; m < M; ++m) {
    acc += current_[m];
    if (u < acc) {
      action = m;
      break;
    }
  }
  while (current_[action] <= 0.0 && action > 0) --action;
  return {{action}, current_};
}

void SwapRegretAgent::do_observe(std::span<const ArmIndex> arms,
                                 std::span<const double> rewards) {
  const ArmIndex played = arms[0];
  const double reward = rewards[0];
  if (!(reward >= 0.0 && reward <= 1.0)) {
    throw ContractViolation("swap agent expects rewards in [0, 1]");
  }
  const double p_played = current_[played];
  for (std::size_t m = 0; m < learners_.size(); ++m) {
    const double share = current_[m] * reward;
    if (share == 0.0) continue;
    exp3_update(learners_[m], played, share, p_played);
  }
}

std::size_t SwapRegretAgent::state_bytes() const {
  const std::size_t M = num_arms();
  return sizeof(*this) + M * (sizeof(Exp3State) + M * sizeof(double)) +
         (q_.capacity() + current_.size() + warm_start_.capacity()) * sizeof(double);
}

std::size_t SwapRegretAgent::state_scalars() const {
  const std::size_t M = num_arms();
  return M * (M + 1) + M * M + 2 * M;
}

GameResult play_game(const GameMatrix& game, std::span<Policy* const> agents,
                     std::size_t rounds, Rng& rng) {
  const std::size_t K = game.num_players();
  if (agents.size() != K) throw ArgumentError("play_game: one agent per player required");
  for (std::size_t k = 0; k < K; ++k) {
    if (agents[k] == nullptr || agents[k]->num_arms() != game.num_actions(k) ||
        agents[k]->plays_per_round() != 1) {
      throw ArgumentError("play_game: agent action count does not match the game");
    }
  }
  GameResult result{JointHistogram(game.num_profiles()), {}, {}};
  result.players.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    result.players.push_back({RegretLedger(game.num_actions(k), 1, true),
                              RewardTrace(game.num_actions(k), {0.0, 1.0})});
  }
  result.profile_sequence.reserve(rounds);

  std::vector<ArmIndex> actions(K);
  std::vector<const Selection*> selections(K);
  std::vector<double> row;
  for (std::size_t t = 0; t < rounds; ++t) {
    for (std::size_t k = 0; k < K; ++k) {
      selections[k] = &agents[k]->select(rng);
      actions[k] = selections[k]->arms[0];
    }
    const std::size_t profile = game.profile_index(actions);
    for (std::size_t k = 0; k < K; ++k) {
      const double u = game.utility(k, profile);
      auto& record = result.players[k];
      record.ledger.record(std::span<const ArmIndex>(&actions[k], 1), u,
                           &selections[k]->strategy);
      row.resize(game.num_actions(k));
      for (ArmIndex l = 0; l < row.size(); ++l) {
        row[l] = game.utility(k, game.deviate(profile, k, l));
      }
      record.counterfactual.append_round(row);
      agents[k]->observe(actions[k], u);
    }
    result.histogram.add(profile);
    result.profile_sequence.push_back(profile);
  }
  return result;
}

double ce_gap(const JointHistogram& histogram, const GameMatrix& game) {
  if (histogram.total() == 0) throw ArgumentError("ce_gap: empty histogram");
  if (histogram.counts().size() != game.num_profiles()) {
    throw ArgumentError("ce_gap: histogram does not match the game");
  }
  const double n = static_cast<double>(histogram.total());
  double gap = -std::numeric_limits<double>::infinity();
  bool any_pair = false;
  for (std::size_t k = 0; k < game.num_players(); ++k) {
    const std::size_t A = game.num_actions(k);
    // gain[m * A + l] = sum over profiles recommending m of pi(a) (u(l) - u(a))
    std::vector<double> gain(A * A, 0.0);
    for (std::size_t a = 0; a < game.num_profiles(); ++a) {
      const std::size_t c = histogram.counts()[a];
      if (c == 0) continue;
      const double pi = static_cast<double>(c) / n;
      const ArmIndex m = game.profile(a)[k];
      const double base = game.utility(k, a);
      for (ArmIndex l = 0; l < A; ++l) {
        gain[m * A + l] += pi * (game.utility(k, game.deviate(a, k, l)) - base);
      }
    }
    for (ArmIndex m = 0; m < A; ++m) {
      for (ArmIndex l = 0; l < A; ++l) {
        if (m == l) continue;
        any_pair = true;
        gap = std::max(gap, gain[m * A + l]);
      }
    }
  }
  return any_pair ? gap : 0.0;
}

}  // namespace banditlab
