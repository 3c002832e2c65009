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

#ifndef ILSIM_ACRE_HPP_
#define ILSIM_ACRE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ilsim/bayes.hpp"
#include "ilsim/interaction.hpp"

namespace ilsim {

// The blicket-detector style task: M objects each carry a latent state,
// and placing a subset of them on the machine determines a light. A rule
// assigns one state per object, so the space has 3^M rules.

enum class LightState { kOn = 0, kOff = 1, kUnd = 2 };

const char* to_string(LightState s);
LightState parse_light_state(const std::string& s);  // throws ConfigError

struct AcreRule {
  std::vector<LightState> states;  // one per object

  // Rule index in [0, 3^M): base-3 digits with object 0 least significant.
  std::size_t index() const;
  static AcreRule from_index(std::size_t idx, std::size_t num_objects);

  bool operator==(const AcreRule&) const = default;
};

struct AcreExample {
  std::uint32_t input_mask = 0;  // non-empty subset of the objects
  LightState output = LightState::kOff;

  bool operator==(const AcreExample&) const = default;
};

// The light semantics: on if any present object is on; otherwise
// undetermined if any present object is undetermined; otherwise off.
// Throws DomainError on an empty input.
LightState evaluate_rule(const AcreRule& rule, std::uint32_t input_mask);

// The rule space as a mapping space: input index = mask - 1 (masks run
// 1..2^M-1), output index = LightState value.
class AcreSpace final : public MappingSpace {
 public:
  explicit AcreSpace(std::size_t num_objects);

  std::string id() const override;
  std::size_t num_hypotheses() const override { return num_hypotheses_; }
  std::size_t num_inputs() const override { return (1u << num_objects_) - 1; }
  std::size_t num_outputs() const override { return 3; }
  int apply(std::size_t h, int x) const override;

  std::size_t num_objects() const { return num_objects_; }
  AcreRule rule(std::size_t h) const {
    return AcreRule::from_index(h, num_objects_);
  }

 private:
  std::size_t num_objects_;
  std::size_t num_hypotheses_;
};

Example to_example(const AcreExample& e);
AcreExample from_example(const Example& e);

// Named bias strengths; the multiplicative factors are defaults, tunable
// per experiment config.
enum class BiasLevel { kVeryLow = 0, kLow, kMild, kMedium, kHigh, kVeryHigh };
const char* to_string(BiasLevel level);
BiasLevel parse_bias_level(const std::string& s);
double bias_beta(BiasLevel level);

// Multiplicative prior reweighting toward one object-state pair.
struct BiasSpec {
  std::size_t target_object = 0;
  LightState target_state = LightState::kOff;
  double beta = 1.0;  // > 1

  static BiasSpec from_level(std::size_t target_object, BiasLevel level);
};

// Uniform prior over the rules, with rules matching the bias target
// multiplied by beta and the whole thing renormalized.
BeliefState acre_prior(const AcreSpace& space,
                       const std::optional<BiasSpec>& bias);

// Exact update with the deterministic 0/1 likelihood. Throws
// ContradictionError (with the offending example index) when the data is
// jointly unsatisfiable.
BeliefState acre_posterior(const AcreSpace& space, const BeliefState& prior,
                           std::span<const AcreExample> data);

struct AcreRunMetrics {
  std::size_t corr_d0 = 0;  // examples of d0 the rule predicts correctly
  bool screen_off = false;
  bool both = false;
};

AcreRunMetrics acre_metrics(const AcreRule& final_h,
                            std::span<const AcreExample> d0,
                            std::size_t target_object);

enum class AcreInteractionKind { kSelfRefine, kHypoSearch };

// hypo_search: exact predicate "consistent with all of d0".
// self_refine: the same predicate behind an independent flip with the
// given probability, modeling imperfect self-evaluation.
EffectiveSet make_interaction(AcreInteractionKind kind, const AcreSpace& space,
                              std::vector<AcreExample> d0, double flip_prob);

// A ground-truth rule h* paired with the decoy it was built from: h_hat is
// drawn with the target object not off, and h* is h_hat with the target
// forced to off. Any example avoiding the target is explained by both.
struct PairedRules {
  AcreRule h_star;
  AcreRule h_hat;
};

PairedRules sample_paired_rules(const AcreSpace& space,
                                std::size_t target_object, Rng& rng);

// `count` distinct inputs drawn from the non-empty subsets avoiding the
// target object, labeled by h_star. Throws DomainError when count exceeds
// the number of such subsets.
std::vector<AcreExample> sample_consistent_d0(const AcreSpace& space,
                                              const AcreRule& h_star,
                                              std::size_t target_object,
                                              std::size_t count, Rng& rng);

// Weak/strong ground-truth construction: `on_objects` non-target objects
// are on, the remainder off, the target undetermined.
AcreRule make_ground_truth(const AcreSpace& space, std::size_t target_object,
                           std::size_t on_objects);

// d0 file format: a JSON list of {"input": [object names], "output":
// "on"|"off"|"und"}.
std::vector<AcreExample> load_acre_examples_json(
    const std::string& path, std::span<const std::string> object_names);
void write_acre_examples_json(const std::string& path,
                              std::span<const AcreExample> examples,
                              std::span<const std::string> object_names);

// Default object names: A, B, C, ... with the target called "screen".
std::vector<std::string> default_object_names(std::size_t num_objects,
                                              std::size_t target_object);

}  // namespace ilsim

#endif  // ILSIM_ACRE_HPP_
