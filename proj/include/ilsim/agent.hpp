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

#ifndef ILSIM_AGENT_HPP_
#define ILSIM_AGENT_HPP_

#include <memory>
#include <span>
#include <vector>

#include "ilsim/bayes.hpp"
#include "ilsim/rng.hpp"

namespace ilsim {

// The agent surface the generation loop drives. Both the exact Bayesian
// mock and the chat-backed adapter implement it, so the loop never needs
// to know which one it is running.
class Agent {
 public:
  virtual ~Agent() = default;

  // Forget everything learned and return to the prior.
  virtual void reset() = 0;

  // Imitation: absorb predecessor data into the current belief.
  virtual void observe(std::span<const Example> data) = 0;

  // Whether an explicit belief over the hypothesis space is available.
  // Chat-backed agents may only have one when token probabilities were
  // returned on the last call.
  virtual bool has_belief() const = 0;
  virtual const BeliefState& belief() const = 0;
  virtual void set_belief(BeliefState b) = 0;

  // MAP selection, optionally restricted to an admissible mask.
  virtual std::size_t select(const std::vector<bool>* admissible) = 0;

  // Transmission from a fixed hypothesis.
  virtual std::vector<Example> generate(std::size_t h, std::size_t count,
                                        Rng& rng) = 0;

  // Posterior-predictive transmission (hypothesis redrawn per example).
  virtual std::vector<Example> generate_marginal(std::size_t count,
                                                 Rng& rng) = 0;
};

// Exact Bayesian agent over an explicit finite space. Stateless apart from
// its belief; all operations delegate to the bayes primitives, so its
// propose-then-generate behavior is exactly MAP selection followed by
// sampling from the transmission channel.
class MockBayesianAgent final : public Agent {
 public:
  MockBayesianAgent(const MappingSpace& space, BeliefState prior,
                    LikelihoodModel model);

  void reset() override;
  void observe(std::span<const Example> data) override;
  bool has_belief() const override { return true; }
  const BeliefState& belief() const override { return belief_; }
  void set_belief(BeliefState b) override { belief_ = std::move(b); }
  std::size_t select(const std::vector<bool>* admissible) override;
  std::vector<Example> generate(std::size_t h, std::size_t count,
                                Rng& rng) override;
  std::vector<Example> generate_marginal(std::size_t count, Rng& rng) override;

  const MappingSpace& space() const { return space_; }
  const LikelihoodModel& model() const { return model_; }

 private:
  const MappingSpace& space_;
  BeliefState prior_;
  BeliefState belief_;
  LikelihoodModel model_;
};

}  // namespace ilsim

#endif  // ILSIM_AGENT_HPP_
