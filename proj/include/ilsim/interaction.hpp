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

#ifndef ILSIM_INTERACTION_HPP_
#define ILSIM_INTERACTION_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "ilsim/bayes.hpp"
#include "ilsim/rng.hpp"

namespace ilsim {

// Realization of the effective hypothesis set: either a (possibly noisy)
// binary filter on hypotheses, or a weighting over examples when the
// filtering happens at the data level instead.
struct EffectiveSet {
  enum class Kind { kFull, kPredicate, kNoisyPredicate, kDataWeighting };

  Kind kind = Kind::kFull;
  std::function<bool(std::size_t)> predicate;       // hypothesis -> admissible
  double flip_prob = 0.0;                           // kNoisyPredicate, < 0.5
  std::function<double(const Example&)> weighting;  // kDataWeighting

  static EffectiveSet full();
  static EffectiveSet from_predicate(std::function<bool(std::size_t)> pred);
  static EffectiveSet noisy(std::function<bool(std::size_t)> pred,
                            double flip_prob);
  static EffectiveSet data_weighting(
      std::function<double(const Example&)> weighting);
};

// Membership of hypothesis `h`: full -> true, predicate -> predicate(h),
// noisy predicate -> predicate(h) XOR Bernoulli(flip_prob). Throws
// MisuseError for data-weighting sets, which filter examples, not
// hypotheses.
bool filter_membership(const EffectiveSet& eff, std::size_t h, Rng& rng);

// Membership for every hypothesis of a space, realized in index order
// (one coin per hypothesis for noisy predicates).
std::vector<bool> realize_membership(const EffectiveSet& eff,
                                     std::size_t space_size, Rng& rng);

// Examples accumulated from successful referential-game rounds. The
// invariant: every stored pair comes from a round where the listener's
// reconstruction matched the speaker's input.
struct CommBuffer {
  std::vector<Example> examples;
};

struct LewisRoundResult {
  Example example;
  bool success = false;
};

// How the listener turns a received message back into an object.
enum class ListenerDecode {
  // Draw one hypothesis from the listener belief, then take the
  // likelihood argmax over objects (uniform tie-break over maximizers).
  kSampleHypothesis,
  // Sample the object from the belief-marginal P(x | y).
  kMarginal,
  // Deterministic consensus: the argmax of P(x | y), lowest index on ties.
  kMarginalArgmax,
};

// One referential-game round. The speaker draws a hypothesis from `alice`
// and names a uniformly chosen object; the listener reconstructs it from
// `bob` per the decode mode.
LewisRoundResult lewis_round(
    const MappingSpace& space, const BeliefState& alice,
    const BeliefState& bob, const LikelihoodModel& model, Rng& rng,
    ListenerDecode decode = ListenerDecode::kSampleHypothesis);

struct InteractionStats {
  std::size_t rounds = 0;
  std::size_t successes = 0;
};

// Plays `rounds` rounds of the game against a copy of `alice`, collects
// the successes, and returns alice's belief updated on that buffer. An
// empty buffer returns `alice` unchanged. `decode_tau` is the temperature
// at which both players draw hypotheses during play; the knowledge update
// itself stays at full strength. `max_examples` bottlenecks the update to
// a uniform subsample of the buffer (0 means unlimited).
BeliefState run_interaction_game(
    const MappingSpace& space, const BeliefState& alice, std::size_t rounds,
    const LikelihoodModel& model, Rng& rng, InteractionStats* stats = nullptr,
    double decode_tau = 1.0,
    ListenerDecode decode = ListenerDecode::kSampleHypothesis,
    std::size_t max_examples = 0);

// Draws up to `k` pool elements without replacement, each draw
// proportional to the remaining weights. When fewer than `k` elements
// carry positive weight, all positive-weight elements are returned (the
// shortfall is the caller's to observe via the result size). Throws
// DomainError when the pool is empty and MisuseError when every weight is
// zero, which means the filter excludes the entire pool.
template <class T>
std::vector<T> weighted_pool_sample(std::span<const T> pool,
                                    const std::function<double(const T&)>& weighting,
                                    std::size_t k, Rng& rng) {
  if (pool.empty()) throw DomainError("weighted_pool_sample: empty pool");
  std::vector<double> weights(pool.size());
  std::size_t positive = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const double w = weighting(pool[i]);
    if (w < 0.0 || !std::isfinite(w))
      throw DomainError("weighted_pool_sample: weights must be finite and >= 0");
    weights[i] = w;
    if (w > 0.0) ++positive;
  }
  if (positive == 0)
    throw MisuseError("weighted_pool_sample: filter excludes entire pool");

  const std::size_t take = std::min(k, positive);
  std::vector<T> out;
  out.reserve(take);
  double total = 0.0;
  for (double w : weights) total += w;
  for (std::size_t n = 0; n < take; ++n) {
    double u = rng.next_unit() * total;
    std::size_t chosen = pool.size();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      chosen = i;
      u -= weights[i];
      if (u < 0.0) break;
    }
    out.push_back(pool[chosen]);
    total -= weights[chosen];
    weights[chosen] = 0.0;
  }
  return out;
}

// Data-weighting effective sets applied to generic examples. Throws
// MisuseError when `eff` is not a data-weighting set.
std::vector<Example> weighted_pool_sample(std::span<const Example> pool,
                                          const EffectiveSet& eff,
                                          std::size_t k, Rng& rng);

}  // namespace ilsim

#endif  // ILSIM_INTERACTION_HPP_
