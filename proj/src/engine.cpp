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

#include "ilsim/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>
#include <utility>

#include "json.hpp"

namespace ilsim {

using nlohmann::json;

const char* to_string(TransmissionMode mode) {
  return mode == TransmissionMode::kMapThenSample ? "map_then_sample"
                                                  : "marginal";
}

TransmissionMode parse_transmission_mode(const std::string& s) {
  if (s == "map_then_sample") return TransmissionMode::kMapThenSample;
  if (s == "marginal") return TransmissionMode::kMarginal;
  throw ConfigError("unknown transmission mode '" + s + "'");
}

void GenerationConfig::validate() const {
  if (generations < 1) throw DomainError("GenerationConfig: T must be >= 1");
  if (transmission_count < 1)
    throw DomainError("GenerationConfig: m must be >= 1");
  if (imitation_count < 1) throw DomainError("GenerationConfig: N must be >= 1");
  if (!(tau > 0.0)) throw DomainError("GenerationConfig: tau must be > 0");
  if (epsilon < 0.0 || epsilon >= 1.0)
    throw DomainError("GenerationConfig: epsilon must lie in [0, 1)");
  if (const auto* game = std::get_if<LewisGameSpec>(&interaction))
    if (game->rounds < 1)
      throw DomainError("GenerationConfig: game rounds must be >= 1");
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Trajectory run_il(const TaskBinding& task, Agent& agent,
                  const GenerationConfig& config) {
  config.validate();
  if (task.space == nullptr) throw MisuseError("run_il: task has no space");
  if (task.d0.empty()) throw MisuseError("run_il: task provides no d0");

  Rng rng(config.seed);
  // The noise channel the loop itself samples with (the referential game);
  // agents carry their own copy, kept in sync by the constructors.
  const LikelihoodModel model{config.epsilon, task.space->num_outputs()};
  Trajectory traj;
  traj.space_id = task.space->id();
  traj.seed = config.seed;
  traj.generations.reserve(config.generations);

  std::vector<Example> data = task.d0;
  agent.reset();

  for (std::size_t t = 1; t <= config.generations; ++t) {
    if (config.fresh_agent_each_generation && t > 1) agent.reset();

    const std::size_t n = std::min<std::size_t>(config.imitation_count,
                                                data.size());
    agent.observe(std::span<const Example>(data.data(), n));

    GenerationRecord rec;
    rec.generation = t;

    // Interaction phase. Game play happens at decode temperature; the
    // knowledge update from the communication buffer is a full-strength
    // posterior update.
    std::vector<bool> admissible;
    bool restricted = false;
    if (const auto* game = std::get_if<LewisGameSpec>(&config.interaction)) {
      if (!agent.has_belief())
        throw MisuseError(
            "run_il: referential-game interaction needs an explicit belief");
      InteractionStats stats;
      const double play_tau =
          game->play_tau > 0.0 ? game->play_tau : config.tau;
      agent.set_belief(run_interaction_game(
          *task.space, agent.belief(), game->rounds, model, rng, &stats,
          play_tau, game->decode, game->max_examples));
      rec.comm_rounds = stats.rounds;
      rec.comm_successes = stats.successes;
    } else if (const auto* eff = std::get_if<EffectiveSet>(&config.interaction)) {
      admissible =
          realize_membership(*eff, task.space->num_hypotheses(), rng);
      restricted = std::find(admissible.begin(), admissible.end(), true) !=
                   admissible.end();
      if (!restricted)
        throw InfeasibleEffectiveSetError(
            "run_il: effective set empty at generation " + std::to_string(t),
            t);
    }

    // Selection and transmission. The recorded belief stays the agent's
    // untempered posterior; decode temperature only shapes the sampling
    // distribution (MAP selection is invariant under it).
    try {
      if (config.mode == TransmissionMode::kMapThenSample) {
        rec.selected_h = agent.select(restricted ? &admissible : nullptr);
        rec.emitted = agent.generate(rec.selected_h, config.transmission_count,
                                     rng);
      } else {
        if (!agent.has_belief())
          throw MisuseError("run_il: marginal transmission needs a belief");
        if (restricted)
          agent.set_belief(restrict_belief(agent.belief(), admissible));
        rec.selected_h = agent.select(restricted ? &admissible : nullptr);
        const BeliefState decode =
            config.tau == 1.0
                ? agent.belief()
                : apply_temperature(agent.belief(), config.tau);
        rec.emitted = sample_marginal(*task.space, decode,
                                      config.transmission_count, model, rng);
      }
    } catch (const InfeasibleEffectiveSetError& e) {
      throw InfeasibleEffectiveSetError(
          std::string(e.what()) + " (generation " + std::to_string(t) + ")",
          t);
    }

    if (agent.has_belief()) {
      const BeliefState& b = agent.belief();
      rec.entropy = entropy(b);
      if (task.class_of) {
        const auto mass = class_mass<std::string>(b, task.class_of);
        for (const auto& [label, value] : mass)
          rec.metrics["mass_" + label] = value;
      }
      if (task.extra_metrics) {
        for (const auto& [key, value] : task.extra_metrics(rec.selected_h, b))
          rec.metrics[key] = value;
      }
      if (config.record_posterior) rec.posterior = b.probs();
    }

    data = rec.emitted;
    traj.generations.push_back(std::move(rec));
  }
  return traj;
}

Trajectory run_il_mock(const TaskBinding& task, const GenerationConfig& config) {
  LikelihoodModel model = task.model;
  model.epsilon = config.epsilon;
  model.output_cardinality = task.space->num_outputs();
  TaskBinding bound = task;
  bound.model = model;
  MockBayesianAgent agent(*task.space, task.prior, model);
  return run_il(bound, agent, config);
}

std::vector<SweepOutcome> sweep(
    const TaskBinding& task,
    const std::function<std::unique_ptr<Agent>(const GenerationConfig&)>&
        agent_factory,
    std::vector<GenerationConfig> grid, std::uint64_t master_seed,
    std::size_t workers) {
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid[i].seed = derive_seed(master_seed, i);

  std::vector<SweepOutcome> results(grid.size());
  auto run_point = [&](std::size_t i) {
    try {
      std::unique_ptr<Agent> agent = agent_factory(grid[i]);
      results[i].trajectory = run_il(task, *agent, grid[i]);
    } catch (const std::exception& e) {
      results[i].error = e.what();
    }
  };

  if (workers <= 1 || grid.size() <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) run_point(i);
    return results;
  }

  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= grid.size()) return;
        i = next++;
      }
      run_point(i);
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_threads = std::min(workers, grid.size());
  pool.reserve(n_threads);
  for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  return results;
}

std::size_t convergence_generation(const Trajectory& traj,
                                   const std::string& mass_prefix) {
  if (traj.generations.empty()) return 0;
  auto dominant = [&](const GenerationRecord& rec) {
    std::string best;
    double best_mass = -1.0;
    for (const auto& [key, value] : rec.metrics) {
      if (key.rfind(mass_prefix, 0) != 0) continue;
      if (value > best_mass) {
        best_mass = value;
        best = key;
      }
    }
    return best;
  };
  const std::string final_class = dominant(traj.generations.back());
  std::size_t gen = traj.generations.back().generation;
  for (auto it = traj.generations.rbegin(); it != traj.generations.rend();
       ++it) {
    if (dominant(*it) != final_class) break;
    gen = it->generation;
  }
  return gen;
}

namespace {

json example_to_json(const Example& e) { return json::array({e.x, e.y}); }

json record_to_json(const GenerationRecord& rec) {
  json j;
  j["generation"] = rec.generation;
  j["selected_h"] = rec.selected_h;
  j["entropy"] = rec.entropy;
  j["comm_rounds"] = rec.comm_rounds;
  j["comm_successes"] = rec.comm_successes;
  j["metrics"] = rec.metrics;
  json emitted = json::array();
  for (const Example& e : rec.emitted) emitted.push_back(example_to_json(e));
  j["emitted"] = std::move(emitted);
  if (!rec.posterior.empty()) j["posterior"] = rec.posterior;
  return j;
}

GenerationRecord record_from_json(const json& j) {
  GenerationRecord rec;
  rec.generation = j.at("generation").get<std::size_t>();
  rec.selected_h = j.at("selected_h").get<std::size_t>();
  rec.entropy = j.at("entropy").get<double>();
  rec.comm_rounds = j.at("comm_rounds").get<std::size_t>();
  rec.comm_successes = j.at("comm_successes").get<std::size_t>();
  rec.metrics = j.at("metrics").get<std::map<std::string, double>>();
  for (const auto& e : j.at("emitted"))
    rec.emitted.push_back(Example{e.at(0).get<int>(), e.at(1).get<int>()});
  if (j.contains("posterior"))
    rec.posterior = j.at("posterior").get<std::vector<double>>();
  return rec;
}

}  // namespace

std::string trajectory_to_json(const Trajectory& traj) {
  json j;
  j["schema_version"] = 1;
  j["space_id"] = traj.space_id;
  j["seed"] = traj.seed;
  json gens = json::array();
  for (const GenerationRecord& rec : traj.generations)
    gens.push_back(record_to_json(rec));
  j["generations"] = std::move(gens);
  return j.dump(2) + "\n";
}

Trajectory trajectory_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("trajectory_from_json: invalid JSON: ") +
                      e.what());
  }
  if (j.value("schema_version", 0) != 1)
    throw ConfigError("trajectory_from_json: unsupported schema version");
  Trajectory traj;
  traj.space_id = j.at("space_id").get<std::string>();
  traj.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& g : j.at("generations"))
    traj.generations.push_back(record_from_json(g));
  return traj;
}

void write_metrics_csv(std::ostream& out, const Trajectory& traj) {
  // Collect the union of metric keys (sorted by std::map) so every row has
  // the same columns.
  std::map<std::string, bool> keys;
  for (const GenerationRecord& rec : traj.generations)
    for (const auto& [key, value] : rec.metrics) keys[key] = true;

  out << "generation,selected_h,entropy";
  for (const auto& [key, unused] : keys) out << ',' << key;
  out << '\n';
  for (const GenerationRecord& rec : traj.generations) {
    out << rec.generation << ',' << rec.selected_h << ','
        << format_double(rec.entropy);
    for (const auto& [key, unused] : keys) {
      const auto it = rec.metrics.find(key);
      out << ',' << (it == rec.metrics.end() ? "" : format_double(it->second));
    }
    out << '\n';
  }
}

}  // namespace ilsim
