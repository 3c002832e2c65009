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

#include "ilsim/agent.hpp"

#include <utility>

namespace ilsim {

MockBayesianAgent::MockBayesianAgent(const MappingSpace& space,
                                     BeliefState prior, LikelihoodModel model)
    : space_(space),
      prior_(std::move(prior)),
      belief_(prior_),
      model_(model) {
  if (prior_.space_id() != space.id())
    throw MisuseError("MockBayesianAgent: prior bound to '" +
                      prior_.space_id() + "', expected '" + space.id() + "'");
}

void MockBayesianAgent::reset() { belief_ = prior_; }

void MockBayesianAgent::observe(std::span<const Example> data) {
  belief_ = posterior_update(space_, belief_, data, model_);
}

std::size_t MockBayesianAgent::select(const std::vector<bool>* admissible) {
  if (admissible == nullptr) return map_select(belief_);
  return map_select(belief_, *admissible);
}

std::vector<Example> MockBayesianAgent::generate(std::size_t h,
                                                 std::size_t count, Rng& rng) {
  return sample_transmission(space_, h, count, model_, rng);
}

std::vector<Example> MockBayesianAgent::generate_marginal(std::size_t count,
                                                          Rng& rng) {
  return sample_marginal(space_, belief_, count, model_, rng);
}

}  // namespace ilsim
