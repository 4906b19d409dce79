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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "banditlab/core.hpp"
#include "banditlab/errors.hpp"
#include "doctest.h"

using namespace banditlab;

namespace {

RewardTrace trace_of(std::size_t M, std::vector<double> values, RewardBounds b = {0.0, 1.0}) {
  const std::size_t rounds = values.size() / M;
  return RewardTrace(rounds, M, std::move(values), b);
}

RegretLedger single_ledger(std::size_t M, const RewardTrace& trace,
                           const std::vector<ArmIndex>& choices,
                           const std::vector<MixedStrategy>* strategies = nullptr) {
  RegretLedger ledger(M, 1, strategies != nullptr);
  for (std::size_t t = 0; t < choices.size(); ++t) {
    const ArmIndex a = choices[t];
    ledger.record(std::span(&a, 1), trace.at(t, a), strategies ? &(*strategies)[t] : nullptr);
  }
  return ledger;
}

}  // namespace

TEST_CASE("reward trace rejects values outside the declared bounds") {
  RewardTrace trace(2, {0.0, 1.0});
  const double ok[] = {0.2, 1.0};
  trace.append_round(ok);
  CHECK(trace.rounds() == 1);
  const double bad[] = {0.2, 1.5};
  CHECK_THROWS_AS(trace.append_round(bad), ContractViolation);
  const double nan_row[] = {NAN, 0.0};
  CHECK_THROWS_AS(trace.append_round(nan_row), ContractViolation);
}

TEST_CASE("mixed strategy validates mass and range") {
  CHECK_NOTHROW(MixedStrategy({0.25, 0.75}, 1.0));
  CHECK_THROWS_AS(MixedStrategy({0.5, 0.6}, 1.0), ContractViolation);
  CHECK_THROWS_AS(MixedStrategy({1.2, 0.8}, 2.0), ContractViolation);
  CHECK_NOTHROW(MixedStrategy({1.0, 0.5, 0.5}, 2.0));
  const auto u = MixedStrategy::uniform(4, 2.0);
  for (double p : u.probs()) CHECK(p == doctest::Approx(0.5));
}

TEST_CASE("external regret examples") {
  SUBCASE("identical columns give zero") {
    const auto trace = trace_of(3, {0.4, 0.4, 0.4, 1, 1, 1, 0, 0, 0});
    CHECK(external_regret(trace, single_ledger(3, trace, {0, 2, 1})) == 0.0);
  }
  SUBCASE("choosing the hindsight-best arm") {
    const auto trace = trace_of(2, {1, 0, 1, 0, 0, 1});
    CHECK(external_regret(trace, single_ledger(2, trace, {0, 0, 0})) == 0.0);
  }
  SUBCASE("hand enumeration of both fixed arms") {
    const auto trace = trace_of(2, {1, 0, 0, 1, 0, 1});
    CHECK(external_regret(trace, single_ledger(2, trace, {0, 0, 0})) == 1.0);
  }
  SUBCASE("length mismatch") {
    const auto trace = trace_of(2, {1, 0, 0, 1});
    CHECK_THROWS_AS(external_regret(trace, single_ledger(2, trace, {0})), ContractViolation);
  }
}

TEST_CASE("external regret dominates the deficit against every fixed arm") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t M = 2 + rep % 4, n = 30;
    std::vector<double> v(M * n);
    for (double& x : v) x = u(gen);
    const auto trace = trace_of(M, v);
    std::vector<ArmIndex> choices(n);
    for (auto& c : choices) c = gen() % M;
    const auto ledger = single_ledger(M, trace, choices);
    const double regret = external_regret(trace, ledger);
    const auto sums = trace.column_sums();
    double tight = -1e300;
    for (std::size_t m = 0; m < M; ++m) {
      const double deficit = sums[m] - ledger.cum_reward();
      CHECK(regret >= deficit - 1e-12);
      tight = std::max(tight, deficit);
    }
    CHECK(regret == doctest::Approx(tight));
    const ArmIndex best = static_cast<ArmIndex>(
        std::max_element(sums.begin(), sums.end()) - sums.begin());
    CHECK(external_regret(trace, single_ledger(M, trace, std::vector<ArmIndex>(n, best))) ==
          doctest::Approx(0.0));
  }
}

TEST_CASE("internal regret examples") {
  SUBCASE("two arms, one round, half-half") {
    const auto trace = trace_of(2, {1, 0});
    const std::vector<MixedStrategy> s = {MixedStrategy({0.5, 0.5}, 1.0)};
    CHECK(internal_regret(single_ledger(2, trace, {0}, &s), trace) == doctest::Approx(0.5));
  }
  SUBCASE("identical columns") {
    const auto trace = trace_of(3, {0.3, 0.3, 0.3, 0.9, 0.9, 0.9});
    const std::vector<MixedStrategy> s(2, MixedStrategy({0.2, 0.3, 0.5}, 1.0));
    CHECK(internal_regret(single_ledger(3, trace, {0, 1}, &s), trace) == doctest::Approx(0.0));
  }
  SUBCASE("point mass on the per-round maximal arm") {
    const auto trace = trace_of(2, {0.9, 0.1, 0.2, 0.8, 0.7, 0.7});
    const std::vector<MixedStrategy> s = {MixedStrategy::point_mass(2, 0),
                                          MixedStrategy::point_mass(2, 1),
                                          MixedStrategy::point_mass(2, 0)};
    CHECK(internal_regret(single_ledger(2, trace, {0, 1, 0}, &s), trace) <= 1e-12);
  }
  SUBCASE("missing strategy history") {
    const auto trace = trace_of(2, {1, 0});
    CHECK_THROWS_AS(internal_regret(single_ledger(2, trace, {0}), trace), ContractViolation);
  }
}

TEST_CASE("internal regret is positive when mass sits on a dominated arm") {
  // Arm 1 is never pointwise maximal; any mass on it gives a positive swap.
  const auto trace = trace_of(2, {0.8, 0.1, 0.6, 0.5});
  const std::vector<MixedStrategy> s(2, MixedStrategy({0.7, 0.3}, 1.0));
  const double expected = 0.3 * (0.8 - 0.1) + 0.3 * (0.6 - 0.5);
  CHECK(internal_regret(single_ledger(2, trace, {0, 0}, &s), trace) == doctest::Approx(expected));
}

TEST_CASE("best fixed subset") {
  SUBCASE("N = M returns all arms") {
    const auto trace = trace_of(3, {0.1, 0.5, 0.2});
    CHECK(best_fixed_subset(trace, 3) == SubsetAction({0, 1, 2}));
  }
  SUBCASE("ties go to the lowest index") {
    const auto trace = trace_of(3, {5, 9, 9}, {0.0, 10.0});
    CHECK(best_fixed_subset(trace, 2) == SubsetAction({1, 2}));
    CHECK(best_fixed_subset(trace, 1) == SubsetAction({1}));
  }
  SUBCASE("out of range") {
    const auto trace = trace_of(3, {0.1, 0.5, 0.2});
    CHECK_THROWS_AS(best_fixed_subset(trace, 0), ArgumentError);
    CHECK_THROWS_AS(best_fixed_subset(trace, 4), ArgumentError);
  }
  SUBCASE("brute force over all pairs of four arms") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<double> v(4 * 20);
      for (double& x : v) x = u(gen);
      const auto trace = trace_of(4, v);
      const auto sums = trace.column_sums();
      const SubsetIndexer idx(4, 2);
      double best = -1.0;
      SubsetAction arg;
      for (const auto& s : idx.all()) {
        const double total = sums[s.members()[0]] + sums[s.members()[1]];
        if (total > best) {
          best = total;
          arg = s;
        }
      }
      CHECK(best_fixed_subset(trace, 2) == arg);
    }
  }
}

TEST_CASE("normalize reward") {
  CHECK(normalize_reward(-3, {-3, 57}) == 0.0);
  CHECK(normalize_reward(57, {-3, 57}) == 1.0);
  CHECK(normalize_reward(21, {-3, 57}) == doctest::Approx(0.4));
  CHECK(normalize_reward(100, {-3, 57}) == 1.0);
  CHECK_THROWS_AS(normalize_reward(0, {1, 1}), ConfigError);
  CHECK_THROWS_AS(normalize_reward(0, {2, 1}), ConfigError);
}

TEST_CASE("normalization preserves argmax") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-10.0, 40.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> g(6), n(6);
    for (double& x : g) x = u(gen);
    for (std::size_t i = 0; i < g.size(); ++i) n[i] = normalize_reward(g[i], {-10, 40});
    CHECK(std::max_element(g.begin(), g.end()) - g.begin() ==
          std::max_element(n.begin(), n.end()) - n.begin());
  }
}

TEST_CASE("subset indexer enumerates in lexicographic order") {
  const SubsetIndexer idx(6, 3);
  CHECK(idx.count() == 20);
  const auto all = idx.all();
  CHECK(all.front() == SubsetAction({0, 1, 2}));
  CHECK(all.back() == SubsetAction({3, 4, 5}));
  for (std::size_t r = 0; r < all.size(); ++r) {
    CHECK(idx.rank(all[r].members()) == r);
    CHECK(idx.unrank(r) == all[r]);
    if (r > 0) {
      CHECK(std::lexicographical_compare(all[r - 1].members().begin(), all[r - 1].members().end(),
                                         all[r].members().begin(), all[r].members().end()));
    }
  }
  CHECK(SubsetIndexer(8, 4).count() == 70);
  CHECK(binomial(8, 4) == 70);
}

TEST_CASE("ledger lengths and cumulative reward agree") {
  RegretLedger ledger(4, 2, false);
  const ArmIndex a[] = {0, 3};
  const ArmIndex b[] = {1, 2};
  ledger.record(a, 1.5);
  ledger.record(b, 0.25);
  CHECK(ledger.rounds() == 2);
  CHECK(ledger.cum_reward() == 1.75);
  const auto received = ledger.received();
  CHECK(std::accumulate(received.begin(), received.end(), 0.0) == ledger.cum_reward());
  const auto counts = ledger.arm_counts();
  CHECK(counts == std::vector<std::size_t>{1, 1, 1, 1});
}
