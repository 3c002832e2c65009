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

#include "ilsim/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace ilsim {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

double em_step_objective(const MappingSpace& space, const BeliefState& prior,
                         const EmConfig& config, std::size_t h_prev,
                         std::size_t h) {
  const double log_prior = prior.log_prob(h);
  if (log_prior == kNegInf) return kNegInf;

  const double eps = config.epsilon;
  const double k_other = static_cast<double>(space.num_outputs() - 1);
  const double log_match = std::log1p(-eps);
  const double log_miss = eps > 0.0 ? std::log(eps / k_other) : kNegInf;

  // Per-input expected log-likelihood, split on whether h agrees with
  // h_prev there. Both cases are constants of the model, so precompute.
  const double agree_term =
      eps > 0.0 ? (1.0 - eps) * log_match + eps * log_miss : 0.0;
  double disagree_term;
  if (eps > 0.0) {
    disagree_term = (1.0 - eps) * log_miss + (eps / k_other) * log_match +
                    (k_other - 1.0) * (eps / k_other) * log_miss;
  } else {
    disagree_term = kNegInf;
  }

  double expected = 0.0;
  const std::size_t nx = space.num_inputs();
  for (std::size_t x = 0; x < nx; ++x) {
    const bool agrees = space.apply(h, static_cast<int>(x)) ==
                        space.apply(h_prev, static_cast<int>(x));
    if (!agrees && disagree_term == kNegInf) return kNegInf;
    expected += agrees ? agree_term : disagree_term;
  }
  expected /= static_cast<double>(nx);

  return log_prior / static_cast<double>(config.m) + expected;
}

std::size_t em_step(const MappingSpace& space, const BeliefState& prior,
                    const EmConfig& config, std::size_t h_prev,
                    const std::vector<bool>* restrict_to) {
  bool found = false;
  std::size_t best = 0;
  double best_value = kNegInf;
  for (std::size_t h = 0; h < space.num_hypotheses(); ++h) {
    if (restrict_to && !(*restrict_to)[h]) continue;
    const double value = em_step_objective(space, prior, config, h_prev, h);
    if (!found || value > best_value) {
      found = true;
      best = h;
      best_value = value;
    }
  }
  if (!found)
    throw InfeasibleEffectiveSetError("em_step: infeasible effective set");
  return best;
}

namespace {

std::size_t draw_start(const MappingSpace& space, const BeliefState& prior,
                       const std::vector<bool>* restrict_to, Rng& rng) {
  if (restrict_to == nullptr) return rng.categorical(prior.probs());
  std::vector<double> probs = prior.probs();
  double total = 0.0;
  for (std::size_t h = 0; h < probs.size(); ++h) {
    if (!(*restrict_to)[h]) probs[h] = 0.0;
    total += probs[h];
  }
  if (total <= 0.0)
    throw InfeasibleEffectiveSetError(
        "stochastic_em: no prior mass inside the effective set");
  for (double& p : probs) p /= total;
  (void)space;
  return rng.categorical(probs);
}

}  // namespace

EmRunResult em_reference(const MappingSpace& space, const BeliefState& prior,
                         const EmConfig& config,
                         const std::vector<bool>* restrict_to) {
  Rng rng(config.seed);
  std::size_t h = draw_start(space, prior, restrict_to, rng);

  EmRunResult result;
  result.iterates.push_back(h);
  std::unordered_map<std::size_t, std::size_t> first_seen;
  first_seen[h] = 0;

  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    const std::size_t next = em_step(space, prior, config, h, restrict_to);
    result.iterates.push_back(next);
    if (next == h) {
      result.fixed_point = next;
      return result;
    }
    const auto seen = first_seen.find(next);
    if (seen != first_seen.end()) {
      result.cycle_detected = true;
      result.cycle.assign(result.iterates.begin() + seen->second,
                          result.iterates.end() - 1);
      result.fixed_point = *std::min_element(result.cycle.begin(),
                                             result.cycle.end());
      return result;
    }
    first_seen[next] = result.iterates.size() - 1;
    h = next;
  }
  result.fixed_point = h;
  return result;
}

std::vector<std::size_t> stochastic_em(const MappingSpace& space,
                                       const BeliefState& prior,
                                       const EmConfig& config, Rng& rng,
                                       const std::vector<bool>* restrict_to) {
  const LikelihoodModel model{config.epsilon, space.num_outputs()};
  std::size_t h = draw_start(space, prior, restrict_to, rng);
  std::vector<std::size_t> chain{h};
  std::size_t streak = 1;

  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    const std::vector<Example> data =
        sample_transmission(space, h, config.m, model, rng);
    // Sampled M-step: the posterior argmax after observing the m samples.
    bool found = false;
    std::size_t best = 0;
    double best_value = kNegInf;
    const double log_match = std::log1p(-config.epsilon);
    const double log_miss =
        config.epsilon > 0.0
            ? std::log(config.epsilon /
                       static_cast<double>(space.num_outputs() - 1))
            : kNegInf;
    for (std::size_t cand = 0; cand < space.num_hypotheses(); ++cand) {
      if (restrict_to && !(*restrict_to)[cand]) continue;
      double value = prior.log_prob(cand);
      for (const Example& d : data) {
        if (value == kNegInf) break;
        value += (space.apply(cand, d.x) == d.y) ? log_match : log_miss;
      }
      if (!found || value > best_value) {
        found = true;
        best = cand;
        best_value = value;
      }
    }
    if (!found)
      throw InfeasibleEffectiveSetError(
          "stochastic_em: infeasible effective set");

    streak = (best == h) ? streak + 1 : 1;
    h = best;
    chain.push_back(h);
    if (streak >= config.patience) break;
  }
  return chain;
}

AgreementReport il_em_agreement(
    const MappingSpace& space, const BeliefState& prior,
    const GenerationConfig& il_config, const EmConfig& em_config,
    std::size_t n_seeds,
    const std::function<std::string(std::size_t)>& class_of) {
  AgreementReport report;
  report.seeds = n_seeds;

  if (il_config.epsilon != em_config.epsilon) {
    report.config_consistent = false;
    report.inconsistency = "epsilon differs between IL and EM configs";
    return report;
  }
  if (il_config.transmission_count != em_config.m) {
    report.config_consistent = false;
    report.inconsistency = "IL bottleneck m differs from EM sample count";
    return report;
  }

  const LikelihoodModel model{il_config.epsilon, space.num_outputs()};
  const std::size_t prior_best = prior.argmax();
  std::size_t class_agree = 0, exact_agree = 0, il_hits = 0, em_hits = 0;

  for (std::size_t i = 0; i < n_seeds; ++i) {
    const std::uint64_t seed_i = derive_seed(il_config.seed, i);

    // Matched start hypothesis: both sides replay the same derived stream.
    Rng start_rng(derive_seed(seed_i, 1000));
    const std::size_t h0 = start_rng.categorical(prior.probs());

    Rng d0_rng(derive_seed(seed_i, 2000));
    TaskBinding task;
    task.space = &space;
    task.prior = prior;
    task.model = model;
    task.d0 = sample_transmission(space, h0, il_config.transmission_count,
                                  model, d0_rng);

    GenerationConfig il = il_config;
    il.seed = derive_seed(seed_i, 3000);
    il.interaction = std::monostate{};
    il.mode = TransmissionMode::kMapThenSample;
    const Trajectory traj = run_il_mock(task, il);
    const std::size_t il_final = traj.generations.back().selected_h;

    Rng em_rng(derive_seed(seed_i, 1000));  // replays h0, then continues
    const std::vector<std::size_t> chain =
        stochastic_em(space, prior, em_config, em_rng);
    const std::size_t em_final = chain.back();

    if (class_of(il_final) == class_of(em_final)) ++class_agree;
    if (il_final == em_final) ++exact_agree;
    if (il_final == prior_best) ++il_hits;
    if (em_final == prior_best) ++em_hits;
  }

  const double denom = static_cast<double>(n_seeds);
  report.class_agreement = class_agree / denom;
  report.exact_agreement = exact_agree / denom;
  report.il_prior_argmax_rate = il_hits / denom;
  report.em_prior_argmax_rate = em_hits / denom;
  return report;
}

}  // namespace ilsim
