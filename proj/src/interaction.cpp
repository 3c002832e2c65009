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

#include "ilsim/interaction.hpp"

#include <cmath>
#include <utility>

namespace ilsim {

EffectiveSet EffectiveSet::full() { return EffectiveSet{}; }

EffectiveSet EffectiveSet::from_predicate(
    std::function<bool(std::size_t)> pred) {
  EffectiveSet eff;
  eff.kind = Kind::kPredicate;
  eff.predicate = std::move(pred);
  return eff;
}

EffectiveSet EffectiveSet::noisy(std::function<bool(std::size_t)> pred,
                                 double flip_prob) {
  if (!(flip_prob >= 0.0 && flip_prob < 0.5))
    throw DomainError("EffectiveSet: flip_prob must lie in [0, 0.5)");
  EffectiveSet eff;
  eff.kind = Kind::kNoisyPredicate;
  eff.predicate = std::move(pred);
  eff.flip_prob = flip_prob;
  return eff;
}

EffectiveSet EffectiveSet::data_weighting(
    std::function<double(const Example&)> weighting) {
  EffectiveSet eff;
  eff.kind = Kind::kDataWeighting;
  eff.weighting = std::move(weighting);
  return eff;
}

bool filter_membership(const EffectiveSet& eff, std::size_t h, Rng& rng) {
  switch (eff.kind) {
    case EffectiveSet::Kind::kFull:
      return true;
    case EffectiveSet::Kind::kPredicate:
      return eff.predicate(h);
    case EffectiveSet::Kind::kNoisyPredicate: {
      const bool member = eff.predicate(h);
      return rng.bernoulli(eff.flip_prob) ? !member : member;
    }
    case EffectiveSet::Kind::kDataWeighting:
      throw MisuseError(
          "filter_membership: data-weighting sets filter examples, not "
          "hypotheses");
  }
  return false;
}

std::vector<bool> realize_membership(const EffectiveSet& eff,
                                     std::size_t space_size, Rng& rng) {
  std::vector<bool> member(space_size);
  for (std::size_t h = 0; h < space_size; ++h)
    member[h] = filter_membership(eff, h, rng);
  return member;
}

LewisRoundResult lewis_round(const MappingSpace& space,
                             const BeliefState& alice, const BeliefState& bob,
                             const LikelihoodModel& model, Rng& rng,
                             ListenerDecode decode) {
  const std::vector<double> alice_probs = alice.probs();

  // Speaker: pick a hypothesis, an object, and a (possibly corrupted) name.
  const std::size_t h_a = rng.categorical(alice_probs);
  const int x = static_cast<int>(rng.next_index(space.num_inputs()));
  int y = space.apply(h_a, x);
  if (model.epsilon > 0.0 && rng.bernoulli(model.epsilon)) {
    const std::size_t k = rng.next_index(space.num_outputs() - 1);
    const int other = static_cast<int>(k);
    y = other >= y ? other + 1 : other;
  }

  int x_hat = 0;
  if (decode == ListenerDecode::kSampleHypothesis) {
    // Likelihood argmax over objects for one drawn hypothesis. Under the
    // noise channel every object mapping to y ties at 1-epsilon; if none
    // does, all objects tie at the noise floor.
    const std::size_t h_b = rng.categorical(bob.probs());
    std::vector<int> maximizers;
    for (int cand = 0; cand < static_cast<int>(space.num_inputs()); ++cand)
      if (space.apply(h_b, cand) == y) maximizers.push_back(cand);
    if (maximizers.empty()) {
      x_hat = static_cast<int>(rng.next_index(space.num_inputs()));
    } else {
      x_hat = maximizers[rng.next_index(maximizers.size())];
    }
  } else {
    // Belief-marginal decode: x' ~ P(x | y) with x uniform a priori.
    std::vector<double> posterior_x(space.num_inputs(), 0.0);
    double total = 0.0;
    for (std::size_t h = 0; h < bob.size(); ++h) {
      const double ph = bob.prob(h);
      if (ph <= 0.0) continue;
      for (int cand = 0; cand < static_cast<int>(space.num_inputs());
           ++cand) {
        const double w = ph * likelihood(space, h, cand, y, model);
        posterior_x[cand] += w;
        total += w;
      }
    }
    if (total <= 0.0) {
      x_hat = static_cast<int>(rng.next_index(space.num_inputs()));
    } else if (decode == ListenerDecode::kMarginal) {
      for (double& p : posterior_x) p /= total;
      x_hat = static_cast<int>(rng.categorical(posterior_x));
    } else {
      for (std::size_t cand = 1; cand < posterior_x.size(); ++cand)
        if (posterior_x[cand] > posterior_x[x_hat])
          x_hat = static_cast<int>(cand);
    }
  }

  return LewisRoundResult{Example{x, y}, x_hat == x};
}

BeliefState run_interaction_game(const MappingSpace& space,
                                 const BeliefState& alice, std::size_t rounds,
                                 const LikelihoodModel& model, Rng& rng,
                                 InteractionStats* stats, double decode_tau,
                                 ListenerDecode decode,
                                 std::size_t max_examples) {
  if (rounds == 0)
    throw DomainError("run_interaction_game: rounds must be >= 1");
  const BeliefState play =
      decode_tau == 1.0 ? alice : apply_temperature(alice, decode_tau);
  const BeliefState bob = play;  // listener copies the speaker's belief
  CommBuffer buffer;
  for (std::size_t r = 0; r < rounds; ++r) {
    const LewisRoundResult round =
        lewis_round(space, play, bob, model, rng, decode);
    if (round.success) buffer.examples.push_back(round.example);
  }
  if (stats) {
    stats->rounds = rounds;
    stats->successes = buffer.examples.size();
  }
  if (buffer.examples.empty()) return alice;
  if (max_examples > 0 && buffer.examples.size() > max_examples) {
    // Uniform prefix of a seeded shuffle keeps the learning bottleneck.
    for (std::size_t i = 0; i < max_examples; ++i) {
      const std::size_t j =
          i + rng.next_index(buffer.examples.size() - i);
      std::swap(buffer.examples[i], buffer.examples[j]);
    }
    buffer.examples.resize(max_examples);
  }
  return posterior_update(space, alice, buffer.examples, model);
}

std::vector<Example> weighted_pool_sample(std::span<const Example> pool,
                                          const EffectiveSet& eff,
                                          std::size_t k, Rng& rng) {
  if (eff.kind != EffectiveSet::Kind::kDataWeighting)
    throw MisuseError(
        "weighted_pool_sample: effective set does not weight examples");
  return weighted_pool_sample<Example>(pool, eff.weighting, k, rng);
}

}  // namespace ilsim
