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

#include <cstdio>
#include <filesystem>
#include <numeric>
#include <set>

#include "ilsim/acre.hpp"
#include "oracles.hpp"

using namespace ilsim;

namespace {

// Masks for objects A=0, B=1, C=2, ...
constexpr std::uint32_t kA = 1u << 0;
constexpr std::uint32_t kB = 1u << 1;
constexpr std::uint32_t kC = 1u << 2;

AcreRule rule_of(std::initializer_list<LightState> states) {
  AcreRule r;
  r.states.assign(states);
  return r;
}

}  // namespace

TEST_CASE("light semantics on the worked example") {
  const AcreRule h =
      rule_of({LightState::kOn, LightState::kOff, LightState::kUnd});
  CHECK(evaluate_rule(h, kA | kB | kC) == LightState::kOn);
  CHECK(evaluate_rule(h, kB) == LightState::kOff);
  CHECK(evaluate_rule(h, kB | kC) == LightState::kUnd);
  CHECK_THROWS_AS(evaluate_rule(h, 0), DomainError);
}

TEST_CASE("activation dominance: adding an on-object never turns it off") {
  const AcreSpace space(4);
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    AcreRule rule = space.rule(rng.next_index(space.num_hypotheses()));
    // Force one object on and check all inputs containing it.
    const std::size_t on_obj = rng.next_index(4);
    rule.states[on_obj] = LightState::kOn;
    for (std::uint32_t mask = 1; mask < 16; ++mask)
      if (mask & (1u << on_obj))
        CHECK(evaluate_rule(rule, mask) == LightState::kOn);
  }
}

TEST_CASE("rule indexing round-trips and the space sizes are powers of 3") {
  const AcreSpace space(5);
  CHECK(space.num_hypotheses() == 243);
  CHECK(space.num_inputs() == 31);
  CHECK(space.num_outputs() == 3);
  for (std::size_t h = 0; h < 243; h += 17)
    CHECK(space.rule(h).index() == h);
  CHECK(AcreSpace(3).num_hypotheses() == 27);
  CHECK_THROWS_AS(AcreSpace(0), DomainError);
}

TEST_CASE("uniform prior over nine rules for two objects") {
  const AcreSpace space(2);
  const BeliefState prior = acre_prior(space, std::nullopt);
  for (std::size_t h = 0; h < 9; ++h)
    CHECK(prior.prob(h) == doctest::Approx(1.0 / 9.0));
}

TEST_CASE("bias reweights the target state mass") {
  const AcreSpace space(1);
  const BeliefState prior =
      acre_prior(space, BiasSpec{0, LightState::kOff, 2.0});
  // Three rules: on, off, und; the off rule carries twice the weight.
  CHECK(prior.prob(AcreRule{{LightState::kOff}}.index()) ==
        doctest::Approx(0.5));
  CHECK(prior.prob(AcreRule{{LightState::kOn}}.index()) ==
        doctest::Approx(0.25));
  CHECK(prior.prob(AcreRule{{LightState::kUnd}}.index()) ==
        doctest::Approx(0.25));
}

TEST_CASE("aggregated target-off mass increases strictly with beta") {
  const AcreSpace space(3);
  double previous = 0.0;
  for (double beta : {1.0, 1.25, 2.0, 4.0, 8.0, 16.0}) {
    const BeliefState prior =
        acre_prior(space, BiasSpec{2, LightState::kOff, beta});
    double off_mass = 0.0;
    for (std::size_t h = 0; h < space.num_hypotheses(); ++h)
      if (space.rule(h).states[2] == LightState::kOff)
        off_mass += prior.prob(h);
    CHECK(off_mass > previous);
    previous = off_mass;
  }
  CHECK_THROWS_AS(acre_prior(space, BiasSpec{9, LightState::kOff, 2.0}),
                  DomainError);
}

TEST_CASE("posterior support equals the brute-force consistent set") {
  const AcreSpace space(3);
  const std::vector<AcreExample> data{{kB | kC, LightState::kUnd},
                                      {kB, LightState::kOff},
                                      {kA | kB | kC, LightState::kOn}};
  const BeliefState post =
      acre_posterior(space, acre_prior(space, std::nullopt), data);

  std::set<std::size_t> support;
  for (std::size_t h = 0; h < 27; ++h)
    if (post.prob(h) > 0.0) support.insert(h);

  std::set<std::size_t> oracle;
  for (std::size_t h = 0; h < 27; ++h) {
    const AcreRule rule = space.rule(h);
    bool consistent = true;
    for (const AcreExample& e : data)
      if (evaluate_rule(rule, e.input_mask) != e.output) consistent = false;
    if (consistent) oracle.insert(h);
  }
  CHECK(support == oracle);
  CHECK_FALSE(support.empty());

  // Empty data returns the prior unchanged.
  const BeliefState prior = acre_prior(space, std::nullopt);
  CHECK(acre_posterior(space, prior, {}).probs() == prior.probs());
}

TEST_CASE("data silent about the target leaves its aggregate no lower") {
  const AcreSpace space(3);
  const std::size_t target = 2;
  const BeliefState prior =
      acre_prior(space, BiasSpec{target, LightState::kOff, 4.0});
  auto off_mass = [&](const BeliefState& b) {
    double mass = 0.0;
    for (std::size_t h = 0; h < space.num_hypotheses(); ++h)
      if (space.rule(h).states[target] == LightState::kOff)
        mass += b.prob(h);
    return mass;
  };
  const double before = off_mass(prior);
  // Every non-empty subset of {A, B} with every achievable labeling.
  for (std::size_t h = 0; h < space.num_hypotheses(); ++h) {
    std::vector<AcreExample> data;
    for (std::uint32_t mask : {kA, kB, kA | kB})
      data.push_back(AcreExample{mask, evaluate_rule(space.rule(h), mask)});
    const double after = off_mass(acre_posterior(space, prior, data));
    CHECK(after >= before - 1e-12);
  }
}

TEST_CASE("contradictions identify the failing example") {
  const AcreSpace space(2);
  const std::vector<AcreExample> data{{kA, LightState::kOn},
                                      {kA, LightState::kOff}};
  try {
    acre_posterior(space, acre_prior(space, std::nullopt), data);
    FAIL("expected ContradictionError");
  } catch (const ContradictionError& e) {
    CHECK(e.example_index() == 1);
  }
}

TEST_CASE("run metrics count correct predictions and the target state") {
  const AcreSpace space(5);
  Rng rng(11);
  const PairedRules pair = sample_paired_rules(space, 4, rng);
  CHECK(pair.h_star.states[4] == LightState::kOff);
  CHECK(pair.h_hat.states[4] != LightState::kOff);
  for (std::size_t obj = 0; obj < 4; ++obj)
    CHECK(pair.h_star.states[obj] == pair.h_hat.states[obj]);

  const std::vector<AcreExample> d0 =
      sample_consistent_d0(space, pair.h_star, 4, 8, rng);
  REQUIRE(d0.size() == 8);
  std::set<std::uint32_t> inputs;
  for (const AcreExample& e : d0) {
    CHECK((e.input_mask & (1u << 4)) == 0);  // target-free by construction
    CHECK(evaluate_rule(pair.h_star, e.input_mask) == e.output);
    CHECK(evaluate_rule(pair.h_hat, e.input_mask) == e.output);
    inputs.insert(e.input_mask);
  }
  CHECK(inputs.size() == 8);  // distinct inputs

  const AcreRunMetrics star = acre_metrics(pair.h_star, d0, 4);
  CHECK(star.corr_d0 == 8);
  CHECK(star.screen_off);
  CHECK(star.both);

  const AcreRunMetrics hat = acre_metrics(pair.h_hat, d0, 4);
  CHECK(hat.corr_d0 == 8);
  CHECK_FALSE(hat.screen_off);
  CHECK_FALSE(hat.both);

  // A random rule scores exactly its per-example agreement.
  const AcreRule random_rule = space.rule(rng.next_index(243));
  std::size_t expected = 0;
  for (const AcreExample& e : d0)
    if (evaluate_rule(random_rule, e.input_mask) == e.output) ++expected;
  CHECK(acre_metrics(random_rule, d0, 4).corr_d0 == expected);
}

TEST_CASE("interaction construction realizes the consistency predicate") {
  const AcreSpace space(5);
  Rng rng(13);
  const PairedRules pair = sample_paired_rules(space, 4, rng);
  const std::vector<AcreExample> d0 =
      sample_consistent_d0(space, pair.h_star, 4, 8, rng);

  const EffectiveSet search = make_interaction(
      AcreInteractionKind::kHypoSearch, space, d0, 0.0);
  CHECK(search.kind == EffectiveSet::Kind::kPredicate);
  CHECK(filter_membership(search, pair.h_star.index(), rng));
  CHECK(filter_membership(search, pair.h_hat.index(), rng));

  const EffectiveSet refine_sharp = make_interaction(
      AcreInteractionKind::kSelfRefine, space, d0, 0.0);
  for (std::size_t h = 0; h < 243; h += 7)
    CHECK(filter_membership(refine_sharp, h, rng) ==
          filter_membership(search, h, rng));

  const EffectiveSet refine = make_interaction(
      AcreInteractionKind::kSelfRefine, space, d0, 0.25);
  const std::size_t n = 10000;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = rng.next_index(243);
    if (filter_membership(refine, h, rng) ==
        filter_membership(search, h, rng))
      ++agree;
  }
  CHECK(testing::binomial_within(agree, n, 0.75));

  CHECK_THROWS_AS(
      make_interaction(AcreInteractionKind::kHypoSearch, space, {}, 0.0),
      DomainError);
}

TEST_CASE("the decoy pool has 162 candidates") {
  // Rules with the target away from off: 3^4 * 2.
  const AcreSpace space(5);
  std::size_t count = 0;
  for (std::size_t h = 0; h < space.num_hypotheses(); ++h)
    if (space.rule(h).states[4] != LightState::kOff) ++count;
  CHECK(count == 162);
}

TEST_CASE("ground-truth construction places the requested on-objects") {
  const AcreSpace space(5);
  const AcreRule weak = make_ground_truth(space, 4, 1);
  CHECK(weak.states[4] == LightState::kUnd);
  std::size_t on_count = 0;
  for (std::size_t obj = 0; obj < 4; ++obj)
    if (weak.states[obj] == LightState::kOn) ++on_count;
  CHECK(on_count == 1);

  const AcreRule strong = make_ground_truth(space, 4, 4);
  for (std::size_t obj = 0; obj < 4; ++obj)
    CHECK(strong.states[obj] == LightState::kOn);
  CHECK_THROWS_AS(make_ground_truth(space, 4, 5), DomainError);
}

TEST_CASE("seed-data files round-trip through JSON") {
  const AcreSpace space(3);
  const auto names = default_object_names(3, 2);
  CHECK(names == std::vector<std::string>{"A", "B", "screen"});

  const std::vector<AcreExample> examples{{kA | kC, LightState::kOn},
                                          {kB, LightState::kOff}};
  const std::string path =
      (std::filesystem::temp_directory_path() / "ilsim_d0_test.json").string();
  write_acre_examples_json(path, examples, names);
  const std::vector<AcreExample> loaded =
      load_acre_examples_json(path, names);
  CHECK(loaded == examples);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(load_acre_examples_json("/nonexistent/d0.json", names),
                  IoError);
}

TEST_CASE("bias levels parse and order their factors") {
  double previous = 1.0;
  for (const char* name :
       {"very_low", "low", "mild", "medium", "high", "very_high"}) {
    const BiasLevel level = parse_bias_level(name);
    CHECK(std::string(to_string(level)) == name);
    CHECK(bias_beta(level) > previous);
    previous = bias_beta(level);
  }
  CHECK_THROWS_AS(parse_bias_level("enormous"), ConfigError);
  CHECK_THROWS_AS(parse_light_state("dim"), ConfigError);
  CHECK(parse_light_state("undetermined") == LightState::kUnd);
}
