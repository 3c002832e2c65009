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

#ifndef ILSIM_BAYES_HPP_
#define ILSIM_BAYES_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ilsim/errors.hpp"
#include "ilsim/rng.hpp"

namespace ilsim {

// One data pair d = (x, y). Inputs and outputs are indices into the bound
// task's enumerated X and Y.
struct Example {
  int x = 0;
  int y = 0;
  bool operator==(const Example&) const = default;
};

// A finite hypothesis space whose hypotheses each map every input to a
// single output. Implementations fix the enumeration order of hypotheses,
// inputs and outputs; everything downstream (tie-breaking, serialization,
// seeds) relies on that order being stable across runs.
class MappingSpace {
 public:
  virtual ~MappingSpace() = default;

  virtual std::string id() const = 0;
  virtual std::size_t num_hypotheses() const = 0;
  virtual std::size_t num_inputs() const = 0;
  virtual std::size_t num_outputs() const = 0;

  // Output index assigned to input `x` by hypothesis `h`.
  virtual int apply(std::size_t h, int x) const = 0;
};

// Noise channel for producing y from h(x): the mapped output keeps mass
// 1-epsilon, the remaining epsilon is spread uniformly over the other
// |Y|-1 outputs. epsilon == 0 is the deterministic limit.
struct LikelihoodModel {
  double epsilon = 0.0;
  std::size_t output_cardinality = 0;
};

// Normalized probability distribution over the hypotheses of one space.
// Stored in log-space to keep long likelihood products away from
// underflow; exposed values are linear-space. Immutable after
// construction, so belief states can be shared across concurrent runs.
class BeliefState {
 public:
  BeliefState() = default;

  static BeliefState uniform(const MappingSpace& space);
  static BeliefState uniform(std::string space_id, std::size_t size);

  // `probs` must be non-negative with positive total; they are normalized.
  static BeliefState from_probs(std::string space_id,
                                std::span<const double> probs);

  // Normalizes arbitrary log-weights (-inf allowed for zero mass).
  static BeliefState from_log_weights(std::string space_id,
                                      std::vector<double> log_weights);

  const std::string& space_id() const { return space_id_; }
  std::size_t size() const { return log_probs_.size(); }
  bool empty() const { return log_probs_.empty(); }

  double prob(std::size_t h) const;
  double log_prob(std::size_t h) const { return log_probs_[h]; }
  std::span<const double> log_probs() const { return log_probs_; }

  // Materialized linear-space vector; sums to 1 within 1e-12.
  std::vector<double> probs() const;

  // Highest-probability hypothesis; ties resolved to the lowest index.
  std::size_t argmax() const;

 private:
  std::string space_id_;
  std::vector<double> log_probs_;
};

// log(sum(exp(v))) with the usual max-shift; -inf for all -inf input.
double log_sum_exp(std::span<const double> v);

// p(y | h, x): 1-epsilon when h maps x to y, epsilon/(|Y|-1) otherwise.
// Throws DomainError when |Y| < 2 with epsilon > 0.
double likelihood(const MappingSpace& space, std::size_t h, int x, int y,
                  const LikelihoodModel& model);

// Exact Bayesian update P(h | d) over the whole space. Computation runs in
// log-space; with epsilon == 0 an impossible hypothesis ends at exactly
// zero mass. Throws ContradictionError when no hypothesis with prior
// support explains the data.
BeliefState posterior_update(const MappingSpace& space,
                             const BeliefState& prior,
                             std::span<const Example> data,
                             const LikelihoodModel& model);

// MAP selection over the full space; ties go to the lowest index.
std::size_t map_select(const BeliefState& belief);

// MAP selection restricted to `admissible` (one flag per hypothesis).
// Throws InfeasibleEffectiveSetError when the restriction is empty.
std::size_t map_select(const BeliefState& belief,
                       const std::vector<bool>& admissible);

// `count` examples with x uniform over X and y drawn from the noise
// channel around h(x).
std::vector<Example> sample_transmission(const MappingSpace& space,
                                         std::size_t h, std::size_t count,
                                         const LikelihoodModel& model,
                                         Rng& rng);

// Posterior-predictive sampling: h is redrawn from `belief` for every
// example, then y is drawn as in sample_transmission.
std::vector<Example> sample_marginal(const MappingSpace& space,
                                     const BeliefState& belief,
                                     std::size_t count,
                                     const LikelihoodModel& model, Rng& rng);

// Shannon entropy in nats, with 0 * log(0) = 0.
double entropy(const BeliefState& belief);

// Normalization of probs^(1/tau). tau > 1 flattens, tau < 1 sharpens;
// tau == 1 is the identity. Throws DomainError for tau <= 0.
BeliefState apply_temperature(const BeliefState& belief, double tau);

// Zeroes the mass outside `admissible` and renormalizes. Throws
// InfeasibleEffectiveSetError when no admissible hypothesis keeps any mass.
BeliefState restrict_belief(const BeliefState& belief,
                            const std::vector<bool>& admissible);

}  // namespace ilsim

#endif  // ILSIM_BAYES_HPP_
