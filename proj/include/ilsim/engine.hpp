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

#ifndef ILSIM_ENGINE_HPP_
#define ILSIM_ENGINE_HPP_

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ilsim/agent.hpp"
#include "ilsim/bayes.hpp"
#include "ilsim/interaction.hpp"

namespace ilsim {

enum class TransmissionMode { kMapThenSample, kMarginal };

const char* to_string(TransmissionMode mode);
TransmissionMode parse_transmission_mode(const std::string& s);

// Referential-game interaction with this many rounds per generation.
// max_examples bottlenecks how much of the communication buffer the agent
// learns from (0 = all of it); play_tau overrides the decode temperature
// the players draw hypotheses with (0 = follow the run's tau).
struct LewisGameSpec {
  std::size_t rounds = 50;
  ListenerDecode decode = ListenerDecode::kSampleHypothesis;
  std::size_t max_examples = 0;
  double play_tau = 0.0;
};

// No interaction, a referential game, or an effective-set filter applied
// at selection time.
using InteractionSpec = std::variant<std::monostate, LewisGameSpec, EffectiveSet>;

struct GenerationConfig {
  std::size_t generations = 10;         // T
  std::size_t transmission_count = 20;  // m, the bottleneck
  std::size_t imitation_count = 20;     // N; capped at the available data
  double epsilon = 0.05;
  double tau = 1.0;
  TransmissionMode mode = TransmissionMode::kMapThenSample;
  InteractionSpec interaction;
  std::uint64_t seed = 0;
  // Default: a fresh agent (prior belief) starts every generation. The
  // carry-over mode keeps one agent alive across generations for
  // refine-style chains.
  bool fresh_agent_each_generation = true;
  bool record_posterior = false;

  void validate() const;  // throws DomainError on T/m/N < 1, bad tau/epsilon
};

// Everything the loop needs to know about a task: the space, the prior the
// agent restarts from, the noise model, seed data, and optional labelling
// hooks for per-generation summaries.
struct TaskBinding {
  const MappingSpace* space = nullptr;
  BeliefState prior;
  LikelihoodModel model;
  std::vector<Example> d0;
  // Optional class label per hypothesis; enables mass_<label> metrics.
  std::function<std::string(std::size_t)> class_of;
  // Optional extra metrics from (selected hypothesis, current belief).
  std::function<std::map<std::string, double>(std::size_t, const BeliefState&)>
      extra_metrics;
};

struct GenerationRecord {
  std::size_t generation = 0;  // 1-based
  std::size_t selected_h = 0;
  double entropy = 0.0;
  std::size_t comm_rounds = 0;
  std::size_t comm_successes = 0;
  std::map<std::string, double> metrics;
  std::vector<Example> emitted;
  std::vector<double> posterior;  // present when record_posterior is set

  bool operator==(const GenerationRecord&) const = default;
};

struct Trajectory {
  std::string space_id;
  std::uint64_t seed = 0;
  std::vector<GenerationRecord> generations;

  bool operator==(const Trajectory&) const = default;
};

// Aggregated posterior mass per class label; masses sum to 1.
template <class Label>
std::map<Label, double> class_mass(
    const BeliefState& belief,
    const std::function<Label(std::size_t)>& classifier) {
  std::map<Label, double> mass;
  for (std::size_t h = 0; h < belief.size(); ++h)
    mass[classifier(h)] += belief.prob(h);
  return mass;
}

// Runs the generation loop: per generation the agent (re)starts from its
// prior, observes the predecessor data, interacts per the config, and
// transmits the next batch. Deterministic for a fixed seed. Aborts with
// InfeasibleEffectiveSetError carrying the generation index if the
// effective set ever becomes empty.
Trajectory run_il(const TaskBinding& task, Agent& agent,
                  const GenerationConfig& config);

// Convenience wrapper constructing a MockBayesianAgent from the binding.
Trajectory run_il_mock(const TaskBinding& task, const GenerationConfig& config);

struct SweepOutcome {
  std::optional<Trajectory> trajectory;  // empty on failure
  std::string error;                     // failure description when empty
};

// Runs run_il per grid point with per-point seeds derived from
// `master_seed`; the result order matches the grid order and failures do
// not abort sibling runs. `workers` > 1 runs points concurrently.
std::vector<SweepOutcome> sweep(
    const TaskBinding& task,
    const std::function<std::unique_ptr<Agent>(const GenerationConfig&)>&
        agent_factory,
    std::vector<GenerationConfig> grid, std::uint64_t master_seed,
    std::size_t workers = 1);

// First generation from which the dominant class label never changes;
// returns the final generation index when it never stabilizes earlier.
std::size_t convergence_generation(const Trajectory& traj,
                                   const std::string& mass_prefix = "mass_");

// JSON (schema_version 1) round-trips trajectories bit-exactly.
std::string trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const std::string& text);

// Per-generation metrics CSV: generation,selected_h,entropy,<metric keys
// in sorted order>. Doubles use shortest-round-trip formatting, so a rerun
// with the same seed produces byte-identical output.
void write_metrics_csv(std::ostream& out, const Trajectory& traj);

}  // namespace ilsim

#endif  // ILSIM_ENGINE_HPP_
