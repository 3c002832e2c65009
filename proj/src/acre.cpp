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

#include "ilsim/acre.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <utility>

#include "json.hpp"

namespace ilsim {

using nlohmann::json;

const char* to_string(LightState s) {
  switch (s) {
    case LightState::kOn: return "on";
    case LightState::kOff: return "off";
    case LightState::kUnd: return "und";
  }
  return "und";
}

LightState parse_light_state(const std::string& s) {
  if (s == "on") return LightState::kOn;
  if (s == "off") return LightState::kOff;
  if (s == "und" || s == "undetermined") return LightState::kUnd;
  throw ConfigError("unknown light state '" + s + "'");
}

std::size_t AcreRule::index() const {
  std::size_t idx = 0;
  for (std::size_t obj = states.size(); obj-- > 0;)
    idx = idx * 3 + static_cast<std::size_t>(states[obj]);
  return idx;
}

AcreRule AcreRule::from_index(std::size_t idx, std::size_t num_objects) {
  AcreRule rule;
  rule.states.resize(num_objects);
  for (std::size_t obj = 0; obj < num_objects; ++obj) {
    rule.states[obj] = static_cast<LightState>(idx % 3);
    idx /= 3;
  }
  return rule;
}

LightState evaluate_rule(const AcreRule& rule, std::uint32_t input_mask) {
  if (input_mask == 0) throw DomainError("evaluate_rule: empty input");
  bool any_und = false;
  for (std::size_t obj = 0; obj < rule.states.size(); ++obj) {
    if (!(input_mask & (1u << obj))) continue;
    if (rule.states[obj] == LightState::kOn) return LightState::kOn;
    if (rule.states[obj] == LightState::kUnd) any_und = true;
  }
  return any_und ? LightState::kUnd : LightState::kOff;
}

AcreSpace::AcreSpace(std::size_t num_objects) : num_objects_(num_objects) {
  if (num_objects < 1 || num_objects > 12)
    throw DomainError("AcreSpace: supports 1..12 objects");
  num_hypotheses_ = 1;
  for (std::size_t i = 0; i < num_objects; ++i) num_hypotheses_ *= 3;
}

std::string AcreSpace::id() const {
  return "acre-" + std::to_string(num_objects_);
}

int AcreSpace::apply(std::size_t h, int x) const {
  const AcreRule r = AcreRule::from_index(h, num_objects_);
  return static_cast<int>(
      evaluate_rule(r, static_cast<std::uint32_t>(x) + 1));
}

Example to_example(const AcreExample& e) {
  return Example{static_cast<int>(e.input_mask) - 1,
                 static_cast<int>(e.output)};
}

AcreExample from_example(const Example& e) {
  return AcreExample{static_cast<std::uint32_t>(e.x) + 1,
                     static_cast<LightState>(e.y)};
}

const char* to_string(BiasLevel level) {
  switch (level) {
    case BiasLevel::kVeryLow: return "very_low";
    case BiasLevel::kLow: return "low";
    case BiasLevel::kMild: return "mild";
    case BiasLevel::kMedium: return "medium";
    case BiasLevel::kHigh: return "high";
    case BiasLevel::kVeryHigh: return "very_high";
  }
  return "very_low";
}

BiasLevel parse_bias_level(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(BiasLevel::kVeryHigh); ++i)
    if (s == to_string(static_cast<BiasLevel>(i)))
      return static_cast<BiasLevel>(i);
  throw ConfigError("unknown bias level '" + s + "'");
}

double bias_beta(BiasLevel level) {
  switch (level) {
    case BiasLevel::kVeryLow: return 1.25;
    case BiasLevel::kLow: return 1.6;
    case BiasLevel::kMild: return 2.5;
    case BiasLevel::kMedium: return 4.0;
    case BiasLevel::kHigh: return 8.0;
    case BiasLevel::kVeryHigh: return 16.0;
  }
  return 1.25;
}

BiasSpec BiasSpec::from_level(std::size_t target_object, BiasLevel level) {
  return BiasSpec{target_object, LightState::kOff, bias_beta(level)};
}

BeliefState acre_prior(const AcreSpace& space,
                       const std::optional<BiasSpec>& bias) {
  if (!bias.has_value()) return BeliefState::uniform(space);
  if (!(bias->beta > 0.0) || !std::isfinite(bias->beta))
    throw DomainError("acre_prior: beta must be positive and finite");
  if (bias->target_object >= space.num_objects())
    throw DomainError("acre_prior: target object out of range");

  const double log_beta = std::log(bias->beta);
  std::vector<double> logw(space.num_hypotheses(), 0.0);
  for (std::size_t h = 0; h < logw.size(); ++h) {
    const AcreRule rule = space.rule(h);
    if (rule.states[bias->target_object] == bias->target_state)
      logw[h] += log_beta;
  }
  return BeliefState::from_log_weights(space.id(), std::move(logw));
}

BeliefState acre_posterior(const AcreSpace& space, const BeliefState& prior,
                           std::span<const AcreExample> data) {
  std::vector<Example> generic;
  generic.reserve(data.size());
  for (const AcreExample& e : data) generic.push_back(to_example(e));
  const LikelihoodModel model{0.0, space.num_outputs()};
  return posterior_update(space, prior, generic, model);
}

AcreRunMetrics acre_metrics(const AcreRule& final_h,
                            std::span<const AcreExample> d0,
                            std::size_t target_object) {
  AcreRunMetrics metrics;
  for (const AcreExample& e : d0)
    if (evaluate_rule(final_h, e.input_mask) == e.output) ++metrics.corr_d0;
  metrics.screen_off =
      final_h.states[target_object] == LightState::kOff;
  metrics.both = metrics.screen_off && metrics.corr_d0 == d0.size();
  return metrics;
}

EffectiveSet make_interaction(AcreInteractionKind kind, const AcreSpace& space,
                              std::vector<AcreExample> d0, double flip_prob) {
  if (d0.empty()) throw DomainError("make_interaction: d0 must be non-empty");
  const std::size_t num_objects = space.num_objects();
  auto consistent = [d0 = std::move(d0), num_objects](std::size_t h) {
    const AcreRule rule = AcreRule::from_index(h, num_objects);
    for (const AcreExample& e : d0)
      if (evaluate_rule(rule, e.input_mask) != e.output) return false;
    return true;
  };
  if (kind == AcreInteractionKind::kHypoSearch)
    return EffectiveSet::from_predicate(std::move(consistent));
  return EffectiveSet::noisy(std::move(consistent), flip_prob);
}

PairedRules sample_paired_rules(const AcreSpace& space,
                                std::size_t target_object, Rng& rng) {
  if (target_object >= space.num_objects())
    throw DomainError("sample_paired_rules: target object out of range");
  PairedRules pair;
  pair.h_hat.states.resize(space.num_objects());
  for (std::size_t obj = 0; obj < space.num_objects(); ++obj)
    pair.h_hat.states[obj] = static_cast<LightState>(rng.next_index(3));
  // The decoy keeps the target away from off; two candidates remain.
  pair.h_hat.states[target_object] =
      rng.bernoulli(0.5) ? LightState::kOn : LightState::kUnd;
  pair.h_star = pair.h_hat;
  pair.h_star.states[target_object] = LightState::kOff;
  return pair;
}

std::vector<AcreExample> sample_consistent_d0(const AcreSpace& space,
                                              const AcreRule& h_star,
                                              std::size_t target_object,
                                              std::size_t count, Rng& rng) {
  std::vector<std::uint32_t> candidates;
  const std::uint32_t all = (1u << space.num_objects()) - 1;
  for (std::uint32_t mask = 1; mask <= all; ++mask)
    if (!(mask & (1u << target_object))) candidates.push_back(mask);
  if (count > candidates.size())
    throw DomainError("sample_consistent_d0: not enough target-free inputs");

  // Seeded Fisher-Yates prefix for distinct inputs.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.next_index(candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
  }
  std::vector<AcreExample> d0;
  d0.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    d0.push_back(AcreExample{candidates[i],
                             evaluate_rule(h_star, candidates[i])});
  return d0;
}

AcreRule make_ground_truth(const AcreSpace& space, std::size_t target_object,
                           std::size_t on_objects) {
  if (on_objects >= space.num_objects())
    throw DomainError(
        "make_ground_truth: need at least one non-target object left");
  AcreRule rule;
  rule.states.assign(space.num_objects(), LightState::kOff);
  std::size_t placed = 0;
  for (std::size_t obj = 0; obj < space.num_objects() && placed < on_objects;
       ++obj) {
    if (obj == target_object) continue;
    rule.states[obj] = LightState::kOn;
    ++placed;
  }
  rule.states[target_object] = LightState::kUnd;
  return rule;
}

std::vector<std::string> default_object_names(std::size_t num_objects,
                                              std::size_t target_object) {
  std::vector<std::string> names(num_objects);
  for (std::size_t i = 0; i < num_objects; ++i)
    names[i] = std::string(1, static_cast<char>('A' + i));
  if (target_object < num_objects) names[target_object] = "screen";
  return names;
}

namespace {

std::size_t object_index(const std::string& name,
                         std::span<const std::string> object_names) {
  for (std::size_t i = 0; i < object_names.size(); ++i)
    if (object_names[i] == name) return i;
  throw ConfigError("unknown object name '" + name + "'");
}

}  // namespace

std::vector<AcreExample> load_acre_examples_json(
    const std::string& path, std::span<const std::string> object_names) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  if (!j.is_array()) throw ConfigError(path + ": expected a JSON list");

  std::vector<AcreExample> out;
  for (const auto& item : j) {
    for (const auto& [key, value] : item.items())
      if (key != "input" && key != "output")
        throw ConfigError(path + ": unknown key '" + key + "'");
    AcreExample e;
    for (const auto& name : item.at("input"))
      e.input_mask |= 1u << object_index(name.get<std::string>(), object_names);
    if (e.input_mask == 0) throw ConfigError(path + ": empty input list");
    e.output = parse_light_state(item.at("output").get<std::string>());
    out.push_back(e);
  }
  return out;
}

void write_acre_examples_json(const std::string& path,
                              std::span<const AcreExample> examples,
                              std::span<const std::string> object_names) {
  json j = json::array();
  for (const AcreExample& e : examples) {
    json item;
    json input = json::array();
    for (std::size_t obj = 0; obj < object_names.size(); ++obj)
      if (e.input_mask & (1u << obj)) input.push_back(object_names[obj]);
    item["input"] = std::move(input);
    item["output"] = to_string(e.output);
    j.push_back(std::move(item));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace ilsim
