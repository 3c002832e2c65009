// Copyright 2026 The ilsim Authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <vector>

#include "ilsim/interaction.hpp"
#include "ilsim/signal_space.hpp"
#include "oracles.hpp"

using namespace ilsim;
using testing::binomial_within;

namespace {

BeliefState one_hot(const SignalSpace& space, int index) {
  std::vector<double> probs(space.num_hypotheses(), 0.0);
  probs[index] = 1.0;
  return BeliefState::from_probs(space.id(), probs);
}

// Analytic success probability for one-hot speaker/listener beliefs under
// the sampled-hypothesis decode, by exhaustive (x, y, x') enumeration.
double exact_success_rate(const SignalSpace& space, int h_a, int h_b,
                          double epsilon) {
  double total = 0.0;
  for (int x = 0; x < 4; ++x) {
    for (int y = 0; y < 4; ++y) {
      const double p_y = space.apply(h_a, x) == y ? 1.0 - epsilon
                                                  : epsilon / 3.0;
      std::vector<int> maximizers;
      for (int cand = 0; cand < 4; ++cand)
        if (space.apply(h_b, cand) == y) maximizers.push_back(cand);
      double p_correct;
      if (maximizers.empty()) {
        p_correct = 0.25;
      } else {
        p_correct = 0.0;
        for (int cand : maximizers)
          if (cand == x) p_correct = 1.0 / maximizers.size();
      }
      total += 0.25 * p_y * p_correct;
    }
  }
  return total;
}

}  // namespace

TEST_CASE("membership filters") {
  Rng rng(5);
  const EffectiveSet full = EffectiveSet::full();
  for (std::size_t h = 0; h < 16; ++h)
    CHECK(filter_membership(full, h, rng));

  const EffectiveSet even =
      EffectiveSet::from_predicate([](std::size_t h) { return h % 2 == 0; });
  CHECK(filter_membership(even, 4, rng));
  CHECK_FALSE(filter_membership(even, 5, rng));

  const EffectiveSet data = EffectiveSet::data_weighting(
      [](const Example&) { return 1.0; });
  CHECK_THROWS_AS(filter_membership(data, 0, rng), MisuseError);

  CHECK_THROWS_AS(
      EffectiveSet::noisy([](std::size_t) { return true; }, 0.5),
      DomainError);
}

TEST_CASE("noisy membership agrees with the predicate at the flip rate") {
  Rng rng(7);
  const EffectiveSet noisy =
      EffectiveSet::noisy([](std::size_t h) { return h % 2 == 0; }, 0.2);
  const std::size_t n = 10000;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = rng.next_index(100);
    if (filter_membership(noisy, h, rng) == (h % 2 == 0)) ++agree;
  }
  CHECK(binomial_within(agree, n, 0.8));

  // flip_prob zero must reduce to the exact predicate.
  const EffectiveSet sharp =
      EffectiveSet::noisy([](std::size_t h) { return h < 50; }, 0.0);
  for (std::size_t h = 0; h < 100; ++h)
    CHECK(filter_membership(sharp, h, rng) == (h < 50));
}

TEST_CASE("shared bijection communicates perfectly without noise") {
  const SignalSpace space;
  const BeliefState b = one_hot(space, SignalMapping{{0, 1, 2, 3}}.index());
  Rng rng(11);
  const LikelihoodModel model{0.0, 4};
  for (int round = 0; round < 500; ++round)
    CHECK(lewis_round(space, b, b, model, rng).success);
}

TEST_CASE("shared degenerate mapping succeeds at the tie-break rate") {
  const SignalSpace space;
  const BeliefState b = one_hot(space, 0);  // everything -> "00"
  Rng rng(13);
  const LikelihoodModel model{0.0, 4};
  const std::size_t n = 20000;
  std::size_t successes = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (lewis_round(space, b, b, model, rng).success) ++successes;
  CHECK(binomial_within(successes, n, 0.25));
}

TEST_CASE("disjoint bijections match the exhaustive-enumeration rate") {
  const SignalSpace space;
  const int h_a = SignalMapping{{0, 1, 2, 3}}.index();
  const int h_b = SignalMapping{{1, 0, 3, 2}}.index();
  const double epsilon = 0.05;
  const double expected = exact_success_rate(space, h_a, h_b, epsilon);

  Rng rng(17);
  const LikelihoodModel model{epsilon, 4};
  const BeliefState alice = one_hot(space, h_a), bob = one_hot(space, h_b);
  const std::size_t n = 50000;
  std::size_t successes = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (lewis_round(space, alice, bob, model, rng).success) ++successes;
  CHECK(binomial_within(successes, n, expected));
}

TEST_CASE("a one-hot belief is a fixed point of the game") {
  const SignalSpace space;
  const BeliefState b = one_hot(space, SignalMapping{{2, 3, 0, 1}}.index());
  Rng rng(19);
  const BeliefState after =
      run_interaction_game(space, b, 100, LikelihoodModel{0.0, 4}, rng);
  CHECK(after.probs() == b.probs());
  CHECK_THROWS_AS(
      run_interaction_game(space, b, 0, LikelihoodModel{0.0, 4}, rng),
      DomainError);
}

TEST_CASE("ambiguity loses posterior mass in the game") {
  // A half-and-half mixture of a bijection and a degenerate mapping: the
  // bijection communicates reliably, the degenerate one mostly fails, so
  // the game's buffer shifts mass toward the bijection.
  const SignalSpace space;
  const int bijection = SignalMapping{{0, 1, 2, 3}}.index();
  const int degenerate = 0;
  std::vector<double> probs(256, 0.0);
  probs[bijection] = 0.5;
  probs[degenerate] = 0.5;
  const BeliefState mixed = BeliefState::from_probs(space.id(), probs);
  const LikelihoodModel model{0.05, 4};

  std::vector<double> gains;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    Rng rng(derive_seed(77, seed));
    const BeliefState after =
        run_interaction_game(space, mixed, 200, model, rng);
    gains.push_back(after.prob(bijection));
  }
  CHECK(testing::median(gains) > 0.5);
}

TEST_CASE("game statistics report rounds and successes") {
  const SignalSpace space;
  const BeliefState b = one_hot(space, SignalMapping{{0, 1, 2, 3}}.index());
  Rng rng(23);
  InteractionStats stats;
  run_interaction_game(space, b, 50, LikelihoodModel{0.0, 4}, rng, &stats);
  CHECK(stats.rounds == 50);
  CHECK(stats.successes == 50);
}

TEST_CASE("uniform weighting samples the pool uniformly (chi-square)") {
  std::vector<Example> pool;
  for (int i = 0; i < 8; ++i) pool.push_back(Example{i, 0});
  const EffectiveSet eff =
      EffectiveSet::data_weighting([](const Example&) { return 1.0; });
  Rng rng(29);
  const std::size_t trials = 10000;
  std::vector<std::size_t> counts(8, 0);
  for (std::size_t t = 0; t < trials; ++t)
    for (const Example& e : weighted_pool_sample(pool, eff, 3, rng))
      ++counts[static_cast<std::size_t>(e.x)];
  // Inclusion probability is 3/8 per element; chi-square over 8 cells with
  // the 99th percentile bound for 7 degrees of freedom.
  const double expected = trials * 3.0 / 8.0;
  double chi2 = 0.0;
  for (std::size_t k = 0; k < 8; ++k) {
    const double diff = static_cast<double>(counts[k]) - expected;
    chi2 += diff * diff / expected;
  }
  CHECK(chi2 < 18.48);
}

TEST_CASE("indicator weighting excludes everything else") {
  std::vector<Example> pool;
  for (int i = 0; i < 10; ++i) pool.push_back(Example{i, i % 2});
  const EffectiveSet hard_only = EffectiveSet::data_weighting(
      [](const Example& e) { return e.y == 1 ? 1.0 : 0.0; });
  Rng rng(31);
  const auto picked = weighted_pool_sample(pool, hard_only, 4, rng);
  REQUIRE(picked.size() == 4);
  for (const Example& e : picked) CHECK(e.y == 1);
}

TEST_CASE("length weighting matches an exhaustive expectation oracle") {
  // Pool of ten examples whose x doubles as a "length"; weight linear in
  // length. The oracle enumerates all ordered draws of size 3.
  std::vector<Example> pool;
  for (int i = 0; i < 10; ++i) pool.push_back(Example{i + 1, 0});
  auto weight = [](const Example& e) { return static_cast<double>(e.x); };

  double oracle_mean_length = 0.0;
  double pool_mean = 0.0;
  for (const Example& e : pool) pool_mean += e.x;
  pool_mean /= 10.0;
  for (int a = 0; a < 10; ++a) {
    for (int b = 0; b < 10; ++b) {
      if (b == a) continue;
      for (int c = 0; c < 10; ++c) {
        if (c == a || c == b) continue;
        const double wa = pool[a].x, wb = pool[b].x, wc = pool[c].x;
        const double total = 55.0;
        const double p = (wa / total) * (wb / (total - wa)) *
                         (wc / (total - wa - wb));
        oracle_mean_length += p * (wa + wb + wc) / 3.0;
      }
    }
  }
  CHECK(oracle_mean_length > pool_mean);

  Rng rng(37);
  const EffectiveSet eff = EffectiveSet::data_weighting(weight);
  const std::size_t trials = 20000;
  double observed = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    double mean = 0.0;
    for (const Example& e : weighted_pool_sample(pool, eff, 3, rng))
      mean += e.x;
    observed += mean / 3.0;
  }
  observed /= static_cast<double>(trials);
  // Sampled means live in [2, 9]; three sigma of the Monte Carlo average
  // is comfortably below 0.1.
  CHECK(observed == doctest::Approx(oracle_mean_length).epsilon(0.02));
}

TEST_CASE("weighted sampling shortfall and misuse errors") {
  std::vector<Example> pool;
  for (int i = 0; i < 6; ++i) pool.push_back(Example{i, i < 2 ? 1 : 0});
  Rng rng(41);

  const EffectiveSet two_live = EffectiveSet::data_weighting(
      [](const Example& e) { return e.y == 1 ? 1.0 : 0.0; });
  const auto short_sample = weighted_pool_sample(pool, two_live, 5, rng);
  CHECK(short_sample.size() == 2);  // only the positive-weight examples

  const EffectiveSet none = EffectiveSet::data_weighting(
      [](const Example&) { return 0.0; });
  CHECK_THROWS_AS(weighted_pool_sample(pool, none, 2, rng), MisuseError);

  const EffectiveSet wrong_kind =
      EffectiveSet::from_predicate([](std::size_t) { return true; });
  CHECK_THROWS_AS(weighted_pool_sample(pool, wrong_kind, 2, rng), MisuseError);

  CHECK_THROWS_AS(
      weighted_pool_sample(std::span<const Example>{}, two_live, 2, rng),
      DomainError);
}

TEST_CASE("samples are sub-multisets of the pool") {
  std::vector<Example> pool;
  for (int i = 0; i < 12; ++i) pool.push_back(Example{i % 4, i % 3});
  const EffectiveSet eff = EffectiveSet::data_weighting(
      [](const Example& e) { return 1.0 + e.x; });
  Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const auto sample = weighted_pool_sample(pool, eff, 7, rng);
    std::map<std::pair<int, int>, int> pool_counts, sample_counts;
    for (const Example& e : pool) ++pool_counts[{e.x, e.y}];
    for (const Example& e : sample) ++sample_counts[{e.x, e.y}];
    for (const auto& [key, count] : sample_counts)
      CHECK(count <= pool_counts[key]);
  }
}
