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

#ifndef ILSIM_EM_HPP_
#define ILSIM_EM_HPP_

#include <functional>
#include <string>
#include <vector>

#include "ilsim/bayes.hpp"
#include "ilsim/engine.hpp"

namespace ilsim {

// Reference EM machinery over the same finite spaces as the generation
// loop. Each M-step maximizes
//   (1/m) * log P0(h) + E_{d ~ p(d | h_prev)}[ log p(d | h) ]
// which is the exact-expectation form of selecting the posterior argmax
// after observing m samples from the previous hypothesis.
struct EmConfig {
  std::size_t m = 1;                 // sample count per E-step
  std::size_t max_iterations = 200;
  double epsilon = 0.05;
  std::uint64_t seed = 0;
  // A stochastic chain is declared converged after this many consecutive
  // identical selections.
  std::size_t patience = 10;
};

struct EmRunResult {
  std::size_t fixed_point = 0;
  std::vector<std::size_t> iterates;  // includes the start hypothesis
  bool cycle_detected = false;
  std::vector<std::size_t> cycle;     // populated when a cycle is reported
};

// The single M-step objective from state h_prev, evaluated at h;
// -infinity marks impossible hypotheses under epsilon == 0.
double em_step_objective(const MappingSpace& space, const BeliefState& prior,
                         const EmConfig& config, std::size_t h_prev,
                         std::size_t h);

// One exact-expectation M-step: the objective argmax over the space,
// optionally restricted; ties go to the lowest index.
std::size_t em_step(const MappingSpace& space, const BeliefState& prior,
                    const EmConfig& config, std::size_t h_prev,
                    const std::vector<bool>* restrict_to = nullptr);

// Iterates em_step from a prior-sampled start until a fixed point. Cycles
// are reported in the result rather than thrown; they cannot occur when
// objective values strictly improve, but a finite space only guarantees
// eventual repetition.
EmRunResult em_reference(const MappingSpace& space, const BeliefState& prior,
                         const EmConfig& config,
                         const std::vector<bool>* restrict_to = nullptr);

// Same loop with the E-step expectation replaced by m Monte Carlo samples;
// returns the visited hypothesis chain (a Markov chain over the space).
std::vector<std::size_t> stochastic_em(
    const MappingSpace& space, const BeliefState& prior,
    const EmConfig& config, Rng& rng,
    const std::vector<bool>* restrict_to = nullptr);

struct AgreementReport {
  std::size_t seeds = 0;
  double class_agreement = 0.0;     // same final class label
  double exact_agreement = 0.0;     // same final hypothesis
  double il_prior_argmax_rate = 0.0;
  double em_prior_argmax_rate = 0.0;
  bool config_consistent = true;
  std::string inconsistency;
};

// Runs imitation-only iterated learning and the stochastic EM chain over
// matched derived seeds and reports how often they land in the same place.
// Flags (rather than silently accepts) mismatched epsilon or m between the
// two configs.
AgreementReport il_em_agreement(
    const MappingSpace& space, const BeliefState& prior,
    const GenerationConfig& il_config, const EmConfig& em_config,
    std::size_t n_seeds,
    const std::function<std::string(std::size_t)>& class_of);

}  // namespace ilsim

#endif  // ILSIM_EM_HPP_
