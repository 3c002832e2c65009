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

#include "ilsim/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace ilsim {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

double log_sum_exp(std::span<const double> v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

BeliefState BeliefState::uniform(const MappingSpace& space) {
  return uniform(space.id(), space.num_hypotheses());
}

BeliefState BeliefState::uniform(std::string space_id, std::size_t size) {
  if (size == 0) throw DomainError("BeliefState: empty hypothesis space");
  BeliefState b;
  b.space_id_ = std::move(space_id);
  b.log_probs_.assign(size, -std::log(static_cast<double>(size)));
  return b;
}

BeliefState BeliefState::from_probs(std::string space_id,
                                    std::span<const double> probs) {
  if (probs.empty()) throw DomainError("BeliefState: empty hypothesis space");
  std::vector<double> logw(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < 0.0 || !std::isfinite(probs[i]))
      throw DomainError("BeliefState: probabilities must be non-negative");
    logw[i] = probs[i] > 0.0 ? std::log(probs[i]) : kNegInf;
  }
  return from_log_weights(std::move(space_id), std::move(logw));
}

BeliefState BeliefState::from_log_weights(std::string space_id,
                                          std::vector<double> log_weights) {
  if (log_weights.empty())
    throw DomainError("BeliefState: empty hypothesis space");
  const double lz = log_sum_exp(log_weights);
  if (!std::isfinite(lz))
    throw DomainError("BeliefState: total mass is zero or non-finite");
  for (double& lw : log_weights) lw -= lz;
  BeliefState b;
  b.space_id_ = std::move(space_id);
  b.log_probs_ = std::move(log_weights);
  return b;
}

double BeliefState::prob(std::size_t h) const {
  const double lp = log_probs_[h];
  return std::isfinite(lp) ? std::exp(lp) : 0.0;
}

std::vector<double> BeliefState::probs() const {
  std::vector<double> out(log_probs_.size());
  for (std::size_t i = 0; i < log_probs_.size(); ++i) out[i] = prob(i);
  return out;
}

std::size_t BeliefState::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < log_probs_.size(); ++i)
    if (log_probs_[i] > log_probs_[best]) best = i;
  return best;
}

double likelihood(const MappingSpace& space, std::size_t h, int x, int y,
                  const LikelihoodModel& model) {
  if (model.output_cardinality < 2 && model.epsilon > 0.0)
    throw DomainError("likelihood: epsilon noise needs at least two outputs");
  if (space.apply(h, x) == y) return 1.0 - model.epsilon;
  return model.epsilon /
         static_cast<double>(model.output_cardinality - 1);
}

BeliefState posterior_update(const MappingSpace& space,
                             const BeliefState& prior,
                             std::span<const Example> data,
                             const LikelihoodModel& model) {
  if (prior.space_id() != space.id())
    throw MisuseError("posterior_update: belief bound to space '" +
                      prior.space_id() + "', expected '" + space.id() + "'");
  if (data.empty()) return prior;

  const std::size_t n = space.num_hypotheses();
  std::vector<double> logw(prior.log_probs().begin(),
                           prior.log_probs().end());
  const double log_match = std::log1p(-model.epsilon);
  const double log_miss =
      model.epsilon > 0.0
          ? std::log(model.epsilon /
                     static_cast<double>(model.output_cardinality - 1))
          : kNegInf;

  for (std::size_t h = 0; h < n; ++h) {
    if (logw[h] == kNegInf) continue;
    for (const Example& d : data) {
      logw[h] += (space.apply(h, d.x) == d.y) ? log_match : log_miss;
      if (logw[h] == kNegInf) break;
    }
  }

  if (!std::isfinite(log_sum_exp(logw))) {
    // Identify the first prefix at which every hypothesis died, which is
    // the most useful thing to report back to the caller.
    std::vector<double> running(prior.log_probs().begin(),
                                prior.log_probs().end());
    for (std::size_t i = 0; i < data.size(); ++i) {
      bool alive = false;
      for (std::size_t h = 0; h < n; ++h) {
        if (running[h] == kNegInf) continue;
        running[h] +=
            (space.apply(h, data[i].x) == data[i].y) ? log_match : log_miss;
        if (running[h] != kNegInf) alive = true;
      }
      if (!alive)
        throw ContradictionError(
            "posterior_update: data contradicts every supported hypothesis "
            "at example " +
                std::to_string(i),
            i);
    }
    throw ContradictionError(
        "posterior_update: data contradicts every supported hypothesis",
        data.size() - 1);
  }

  return BeliefState::from_log_weights(space.id(), std::move(logw));
}

std::size_t map_select(const BeliefState& belief) { return belief.argmax(); }

std::size_t map_select(const BeliefState& belief,
                       const std::vector<bool>& admissible) {
  bool found = false;
  std::size_t best = 0;
  for (std::size_t h = 0; h < belief.size(); ++h) {
    if (!admissible[h]) continue;
    if (!found || belief.log_prob(h) > belief.log_prob(best)) {
      best = h;
      found = true;
    }
  }
  if (!found)
    throw InfeasibleEffectiveSetError("map_select: infeasible effective set");
  return best;
}

namespace {

int sample_output(const MappingSpace& space, std::size_t h, int x,
                  const LikelihoodModel& model, Rng& rng) {
  const int mapped = space.apply(h, x);
  if (model.epsilon <= 0.0 || !rng.bernoulli(model.epsilon)) return mapped;
  // Uniform over the |Y|-1 other outputs.
  const std::size_t k =
      rng.next_index(space.num_outputs() - 1);
  const int y = static_cast<int>(k);
  return y >= mapped ? y + 1 : y;
}

}  // namespace

std::vector<Example> sample_transmission(const MappingSpace& space,
                                         std::size_t h, std::size_t count,
                                         const LikelihoodModel& model,
                                         Rng& rng) {
  if (count == 0) throw DomainError("sample_transmission: count must be >= 1");
  std::vector<Example> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int x = static_cast<int>(rng.next_index(space.num_inputs()));
    out.push_back(Example{x, sample_output(space, h, x, model, rng)});
  }
  return out;
}

std::vector<Example> sample_marginal(const MappingSpace& space,
                                     const BeliefState& belief,
                                     std::size_t count,
                                     const LikelihoodModel& model, Rng& rng) {
  if (count == 0) throw DomainError("sample_marginal: count must be >= 1");
  const std::vector<double> probs = belief.probs();
  std::vector<Example> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t h = rng.categorical(probs);
    const int x = static_cast<int>(rng.next_index(space.num_inputs()));
    out.push_back(Example{x, sample_output(space, h, x, model, rng)});
  }
  return out;
}

double entropy(const BeliefState& belief) {
  double h = 0.0;
  for (std::size_t i = 0; i < belief.size(); ++i) {
    const double lp = belief.log_prob(i);
    if (std::isfinite(lp)) h -= std::exp(lp) * lp;
  }
  return h < 0.0 ? 0.0 : h;
}

BeliefState apply_temperature(const BeliefState& belief, double tau) {
  if (!(tau > 0.0)) throw DomainError("apply_temperature: tau must be > 0");
  if (tau == 1.0) return belief;
  std::vector<double> logw(belief.size());
  for (std::size_t i = 0; i < belief.size(); ++i)
    logw[i] = belief.log_prob(i) / tau;
  return BeliefState::from_log_weights(belief.space_id(), std::move(logw));
}

BeliefState restrict_belief(const BeliefState& belief,
                            const std::vector<bool>& admissible) {
  std::vector<double> logw(belief.size(), kNegInf);
  bool any = false;
  for (std::size_t i = 0; i < belief.size(); ++i) {
    if (!admissible[i]) continue;
    logw[i] = belief.log_prob(i);
    if (std::isfinite(logw[i])) any = true;
  }
  if (!any)
    throw InfeasibleEffectiveSetError(
        "restrict_belief: no admissible hypothesis keeps positive mass");
  return BeliefState::from_log_weights(belief.space_id(), std::move(logw));
}

}  // namespace ilsim
