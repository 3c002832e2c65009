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

#include "ilsim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "ilsim/acre.hpp"
#include "ilsim/acronym.hpp"
#include "ilsim/chat.hpp"
#include "ilsim/em.hpp"
#include "ilsim/engine.hpp"
#include "ilsim/signal_space.hpp"

namespace ilsim {
namespace cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ParsedExperiment {
  json raw;
  std::string task;
  std::string agent;
  std::uint64_t seed = 0;
  std::string out_dir;
  GenerationConfig gen;
};

InteractionSpec parse_interaction(const json& j, const std::string& task,
                                  const AcreSpace* acre_space,
                                  const std::vector<AcreExample>& d0) {
  if (!j.contains("interaction")) return std::monostate{};
  const json& section = j.at("interaction");
  check_keys(section,
             {"kind", "rounds", "flip_prob", "decode", "max_examples",
              "play_tau"},
             "interaction");
  const std::string kind = get_or<std::string>(section, "kind", "none");
  if (kind == "none") return std::monostate{};
  if (kind == "lewis") {
    if (task != "signal")
      throw ConfigError("interaction kind 'lewis' applies to the signal task");
    LewisGameSpec game;
    game.rounds = get_or<std::size_t>(section, "rounds", 100);
    const std::string decode =
        get_or<std::string>(section, "decode", "marginal");
    if (decode == "sample_hypothesis")
      game.decode = ListenerDecode::kSampleHypothesis;
    else if (decode == "marginal")
      game.decode = ListenerDecode::kMarginal;
    else if (decode == "consensus")
      game.decode = ListenerDecode::kMarginalArgmax;
    else
      throw ConfigError("interaction.decode must be sample_hypothesis, "
                        "marginal or consensus");
    game.max_examples = get_or<std::size_t>(section, "max_examples", 0);
    game.play_tau = get_or<double>(section, "play_tau", 0.0);
    return game;
  }
  if (kind == "hypo_search" || kind == "self_refine") {
    if (task != "acre")
      throw ConfigError("interaction kind '" + kind +
                        "' applies to the reasoning task");
    const double flip = get_or<double>(section, "flip_prob", 0.15);
    return make_interaction(kind == "hypo_search"
                                ? AcreInteractionKind::kHypoSearch
                                : AcreInteractionKind::kSelfRefine,
                            *acre_space, d0, flip);
  }
  throw ConfigError("unknown interaction kind '" + kind + "'");
}

ParsedExperiment parse_experiment(const std::string& config_text) {
  json j;
  try {
    j = json::parse(config_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  check_keys(j,
             {"task", "agent", "seed", "out_dir", "generations",
              "transmission_count", "imitation_count", "epsilon", "tau",
              "transmission_mode", "record_posterior", "interaction", "signal",
              "acre", "acronym", "chat"},
             "config");

  ParsedExperiment exp;
  exp.raw = j;
  if (!j.contains("task")) throw ConfigError("config: missing 'task'");
  exp.task = j.at("task").get<std::string>();
  if (exp.task != "signal" && exp.task != "acre" && exp.task != "acronym")
    throw ConfigError("config: unknown task '" + exp.task + "'");
  exp.agent = get_or<std::string>(j, "agent", "mock");
  if (exp.agent != "mock" && exp.agent != "chat")
    throw ConfigError("config: unknown agent '" + exp.agent + "'");
  if (exp.agent == "chat" && exp.task != "acre")
    throw ConfigError("config: the chat agent supports the reasoning task");
  exp.seed = get_or<std::uint64_t>(j, "seed", 0);
  exp.out_dir = get_or<std::string>(j, "out_dir", "");

  exp.gen.generations = get_or<std::size_t>(j, "generations", 10);
  exp.gen.transmission_count = get_or<std::size_t>(j, "transmission_count", 20);
  exp.gen.imitation_count = get_or<std::size_t>(
      j, "imitation_count", exp.gen.transmission_count);
  exp.gen.epsilon =
      get_or<double>(j, "epsilon", exp.task == "signal" ? 0.05 : 0.0);
  exp.gen.tau = get_or<double>(j, "tau", exp.task == "signal" ? 10.0 : 1.0);
  const std::string default_mode =
      exp.task == "signal" ? "marginal" : "map_then_sample";
  exp.gen.mode = parse_transmission_mode(
      get_or<std::string>(j, "transmission_mode", default_mode));
  exp.gen.record_posterior = get_or<bool>(j, "record_posterior", false);
  exp.gen.seed = exp.seed;
  exp.gen.validate();
  return exp;
}

std::string make_manifest(const ParsedExperiment& exp) {
  json manifest;
  manifest["schema_version"] = 1;
  manifest["version"] = kVersion;
  manifest["task"] = exp.task;
  manifest["agent"] = exp.agent;
  manifest["seed"] = exp.seed;
  manifest["config_hash"] = config_hash(exp.raw.dump());
  return manifest.dump(2) + "\n";
}

RunArtifacts finish_trajectory_run(const ParsedExperiment& exp,
                                   const Trajectory& traj) {
  RunArtifacts artifacts;
  artifacts.files["trajectory.json"] = trajectory_to_json(traj);
  std::ostringstream csv;
  write_metrics_csv(csv, traj);
  artifacts.files["metrics.csv"] = csv.str();
  artifacts.files["manifest.json"] = make_manifest(exp);
  const GenerationRecord& last = traj.generations.back();
  artifacts.final_metrics = last.metrics;
  artifacts.final_entropy = last.entropy;
  artifacts.convergence_generation = convergence_generation(traj);
  return artifacts;
}

// ---------------------------------------------------------------------------
// Signal task

RunArtifacts run_signal(const ParsedExperiment& exp) {
  json section = exp.raw.value("signal", json::object());
  check_keys(section, {"coding_c", "uniform_prior", "d0_class", "d0_mapping"},
             "signal");
  const double coding_c = get_or<double>(section, "coding_c", 1.6);
  const bool uniform_prior = get_or<bool>(section, "uniform_prior", false);
  const std::string d0_class = get_or<std::string>(section, "d0_class",
                                                   "holistic");
  const int d0_mapping = get_or<int>(section, "d0_mapping", -1);

  static const SignalSpace space;
  TaskBinding task;
  task.space = &space;
  task.prior = uniform_prior ? BeliefState::uniform(space)
                             : coding_prior(space, coding_c);
  task.model = LikelihoodModel{exp.gen.epsilon, space.num_outputs()};
  task.class_of = signal_class_label;

  // Seed data comes from one mapping of the requested class, drawn with a
  // stream derived from the run seed.
  Rng d0_rng(derive_seed(exp.seed, 101));
  int h0;
  if (d0_mapping >= 0) {
    if (d0_mapping >= 256) throw ConfigError("signal.d0_mapping out of range");
    h0 = d0_mapping;
  } else {
    MappingClass want;
    if (d0_class == "holistic") want = MappingClass::kHolistic;
    else if (d0_class == "degenerate") want = MappingClass::kDegenerate;
    else if (d0_class == "systematic") want = MappingClass::kSystematic;
    else throw ConfigError("signal.d0_class must be holistic, degenerate or systematic");
    std::vector<int> members;
    for (int idx = 0; idx < 256; ++idx)
      if (classify(SignalMapping::from_index(idx)) == want)
        members.push_back(idx);
    h0 = members[d0_rng.next_index(members.size())];
  }
  task.d0 = sample_transmission(space, static_cast<std::size_t>(h0),
                                exp.gen.transmission_count, task.model,
                                d0_rng);

  GenerationConfig gen = exp.gen;
  gen.interaction = parse_interaction(exp.raw, exp.task, nullptr, {});
  const Trajectory traj = run_il_mock(task, gen);
  return finish_trajectory_run(exp, traj);
}

// ---------------------------------------------------------------------------
// Reasoning task

RunArtifacts run_acre(const ParsedExperiment& exp) {
  json section = exp.raw.value("acre", json::object());
  check_keys(section,
             {"objects", "target_object", "bias_level", "beta",
              "hstar_on_objects", "d0_count", "d0_mode", "d0_path"},
             "acre");
  const std::size_t objects = get_or<std::size_t>(section, "objects", 5);
  const AcreSpace space(objects);
  const std::size_t target =
      get_or<std::size_t>(section, "target_object", objects - 1);
  if (target >= objects) throw ConfigError("acre.target_object out of range");

  std::optional<BiasSpec> bias;
  const std::string bias_level =
      get_or<std::string>(section, "bias_level", "none");
  if (section.contains("beta")) {
    bias = BiasSpec{target, LightState::kOff,
                    get_or<double>(section, "beta", 1.0)};
  } else if (bias_level != "none") {
    bias = BiasSpec::from_level(target, parse_bias_level(bias_level));
  }

  const std::size_t on_objects =
      get_or<std::size_t>(section, "hstar_on_objects", 1);
  const std::string d0_mode =
      get_or<std::string>(section, "d0_mode", "ground_truth");
  const std::size_t d0_count = get_or<std::size_t>(
      section, "d0_count", d0_mode == "paired" ? 8 : 3);

  Rng d0_rng(derive_seed(exp.seed, 202));
  std::vector<AcreExample> d0;
  AcreRule h_star;
  if (d0_mode == "ground_truth") {
    h_star = make_ground_truth(space, target, on_objects);
    const std::uint32_t all = (1u << objects) - 1;
    for (std::size_t i = 0; i < d0_count; ++i) {
      const std::uint32_t mask =
          static_cast<std::uint32_t>(d0_rng.next_index(all)) + 1;
      d0.push_back(AcreExample{mask, evaluate_rule(h_star, mask)});
    }
  } else if (d0_mode == "paired") {
    const PairedRules pair = sample_paired_rules(space, target, d0_rng);
    h_star = pair.h_star;
    d0 = sample_consistent_d0(space, h_star, target, d0_count, d0_rng);
  } else if (d0_mode == "file") {
    const std::string path = get_or<std::string>(section, "d0_path", "");
    if (path.empty()) throw ConfigError("acre.d0_path required for d0_mode=file");
    const auto names = default_object_names(objects, target);
    d0 = load_acre_examples_json(path, names);
    h_star = make_ground_truth(space, target, on_objects);
  } else {
    throw ConfigError("acre.d0_mode must be ground_truth, paired or file");
  }

  TaskBinding task;
  task.space = &space;
  task.prior = acre_prior(space, bias);
  task.model = LikelihoodModel{exp.gen.epsilon, space.num_outputs()};
  task.d0 = {};
  task.d0.reserve(d0.size());
  for (const AcreExample& e : d0) task.d0.push_back(to_example(e));
  task.class_of = [target, objects](std::size_t h) {
    const AcreRule rule = AcreRule::from_index(h, objects);
    return std::string("target_") + to_string(rule.states[target]);
  };
  task.extra_metrics = [d0, objects, target](
                           std::size_t h, const BeliefState&) {
    const AcreRule rule = AcreRule::from_index(h, objects);
    const AcreRunMetrics m = acre_metrics(rule, d0, target);
    return std::map<std::string, double>{
        {"corr_d0", static_cast<double>(m.corr_d0)},
        {"selected_target_off", m.screen_off ? 1.0 : 0.0}};
  };

  GenerationConfig gen = exp.gen;
  gen.interaction = parse_interaction(exp.raw, exp.task, &space, d0);

  Trajectory traj;
  if (exp.agent == "chat") {
    const json chat_section = exp.raw.value("chat", json::object());
    check_keys(chat_section,
               {"base_url", "model", "api_key_env", "temperature",
                "top_logprobs", "max_attempts"},
               "chat");
    EndpointConfig endpoint;
    endpoint.base_url = get_or<std::string>(chat_section, "base_url", "");
    endpoint.model = get_or<std::string>(chat_section, "model", "");
    endpoint.api_key_env =
        get_or<std::string>(chat_section, "api_key_env", "ILSIM_API_KEY");
    endpoint.max_attempts = get_or<int>(chat_section, "max_attempts", 4);
    if (endpoint.base_url.empty() || endpoint.model.empty())
      throw ConfigError("chat.base_url and chat.model are required");
    DecodingParams decoding;
    decoding.temperature = get_or<double>(chat_section, "temperature", 0.1);
    decoding.top_logprobs = get_or<int>(chat_section, "top_logprobs", 5);
    ChatAcreAgent agent(
        AgentHandle::chat(endpoint, decoding,
                          default_object_names(objects, target)),
        space);
    traj = run_il(task, agent, gen);
  } else {
    traj = run_il_mock(task, gen);
  }

  RunArtifacts artifacts = finish_trajectory_run(exp, traj);

  // Final-rule metrics in the tabular result format.
  const AcreRule final_rule =
      AcreRule::from_index(traj.generations.back().selected_h, objects);
  const AcreRunMetrics m = acre_metrics(final_rule, d0, target);
  std::ostringstream result;
  result << "corr_d0,screen_off,both\n"
         << m.corr_d0 << ',' << (m.screen_off ? 1 : 0) << ','
         << (m.both ? 1 : 0) << '\n';
  artifacts.files["acre_result.csv"] = result.str();
  return artifacts;
}

// ---------------------------------------------------------------------------
// Acronym task

RunArtifacts run_acronym(const ParsedExperiment& exp) {
  json section = exp.raw.value("acronym", json::object());
  check_keys(section,
             {"batch_size", "initial_easy", "filter", "frequency_csv",
              "prior_easy", "label_likelihood", "base_length_easy",
              "base_length_hard", "length_imitation", "length_spread"},
             "acronym");

  PoolExperimentConfig config;
  config.generations = exp.gen.generations;
  config.seed = exp.seed;
  config.batch_size = get_or<std::size_t>(section, "batch_size", 20);
  config.initial_easy = get_or<std::size_t>(section, "initial_easy", 10);
  config.filter =
      parse_pool_filter(get_or<std::string>(section, "filter", "random"));
  config.generator.prior_easy = get_or<double>(section, "prior_easy", 0.9);
  config.generator.label_likelihood =
      get_or<double>(section, "label_likelihood", 0.55);
  config.generator.base_length_easy =
      get_or<double>(section, "base_length_easy", 4.0);
  config.generator.base_length_hard =
      get_or<double>(section, "base_length_hard", 7.0);
  config.generator.length_imitation =
      get_or<double>(section, "length_imitation", 0.8);
  config.generator.length_spread =
      get_or<double>(section, "length_spread", 1.8);

  const std::string csv_path = get_or<std::string>(section, "frequency_csv", "");
  const FrequencyTable table = csv_path.empty()
                                   ? FrequencyTable::builtin()
                                   : FrequencyTable::from_csv(csv_path);

  const PoolExperimentResult result = run_pool_experiment(config, table);

  RunArtifacts artifacts;
  std::ostringstream csv;
  write_pool_metrics_csv(csv, result);
  artifacts.files["metrics.csv"] = csv.str();

  json pool_json;
  pool_json["schema_version"] = 1;
  json gens = json::array();
  for (const auto& batch : result.pool.generations) {
    json b = json::array();
    for (const AcronymExample& e : batch)
      b.push_back({{"acronym", e.acronym}, {"words", e.words}});
    gens.push_back(std::move(b));
  }
  pool_json["generations"] = std::move(gens);
  artifacts.files["pool.json"] = pool_json.dump(2) + "\n";
  artifacts.files["manifest.json"] = make_manifest(exp);

  const PoolMetrics& last = result.per_generation.back().metrics;
  artifacts.final_metrics = {{"ratio_easy", last.ratio_easy},
                             {"avg_rank", last.avg_rank},
                             {"avg_length", last.avg_length}};
  return artifacts;
}

}  // namespace

std::string config_hash(const std::string& canonical_text) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : canonical_text) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

RunArtifacts run_experiment_json(const std::string& config_text) {
  const ParsedExperiment exp = parse_experiment(config_text);
  if (exp.task == "signal") return run_signal(exp);
  if (exp.task == "acre") return run_acre(exp);
  return run_acronym(exp);
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("short write to " + path.string());
}

void write_artifacts(const fs::path& dir, const RunArtifacts& artifacts) {
  for (const auto& [name, content] : artifacts.files)
    write_file(dir / name, content);
}

}  // namespace

int cmd_run(const std::string& config_path, const std::string& out_override,
            std::ostream& log) {
  std::string config_text;
  try {
    config_text = read_file(config_path);
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kExitIoError;
  }

  try {
    json j = json::parse(config_text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw ConfigError("invalid config JSON");
    std::string out_dir = out_override;
    if (out_dir.empty()) out_dir = j.value("out_dir", "");
    if (out_dir.empty())
      throw ConfigError("no output directory: set out_dir or pass --out");

    const RunArtifacts artifacts = run_experiment_json(config_text);
    write_artifacts(out_dir, artifacts);
    log << "run complete: " << out_dir << " (final entropy "
        << format_double(artifacts.final_entropy) << ")\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const InfeasibleEffectiveSetError& e) {
    log << "run aborted: " << e.what() << '\n';
    return kExitRunAbort;
  } catch (const IoError& e) {
    log << "io error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitRunAbort;
  }
}

namespace {

struct SweepPoint {
  json config;
  std::map<std::string, json> assignment;  // axis path -> value
  std::string dir;
  std::string status;  // ok | cached | error
  std::string error;
  RunArtifacts artifacts;
};

void set_by_path(json& j, const std::string& path, const json& value) {
  json* node = &j;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t dot = path.find('.', begin);
    const std::string key = path.substr(
        begin, dot == std::string::npos ? std::string::npos : dot - begin);
    if (key.empty()) throw ConfigError("empty segment in axis path '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &((*node)[key]);
    begin = dot + 1;
  }
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

int cmd_sweep(const std::string& grid_path, const std::string& out_override,
              std::size_t workers_override, std::ostream& log) {
  json grid;
  try {
    grid = json::parse(read_file(grid_path));
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const json::exception& e) {
    log << "config error: invalid grid JSON: " << e.what() << '\n';
    return kExitConfigError;
  }

  std::vector<SweepPoint> points;
  std::vector<std::string> axis_paths;
  std::string out_dir;
  std::size_t workers = 1;
  try {
    check_keys(grid, {"base", "axes", "master_seed", "workers", "out_dir"},
               "grid");
    if (!grid.contains("base")) throw ConfigError("grid: missing 'base'");
    const json base = grid.at("base");
    const std::uint64_t master_seed = get_or<std::uint64_t>(grid, "master_seed", 0);
    workers = workers_override > 0
                  ? workers_override
                  : get_or<std::size_t>(grid, "workers", 1);
    out_dir = out_override.empty() ? get_or<std::string>(grid, "out_dir", "")
                                   : out_override;
    if (out_dir.empty())
      throw ConfigError("grid: no output directory: set out_dir or pass --out");

    struct Axis {
      std::string path;
      std::vector<json> values;
    };
    std::vector<Axis> axes;
    if (grid.contains("axes")) {
      for (const auto& a : grid.at("axes")) {
        check_keys(a, {"path", "values"}, "axis");
        Axis axis;
        axis.path = a.at("path").get<std::string>();
        for (const auto& v : a.at("values")) axis.values.push_back(v);
        if (axis.values.empty())
          throw ConfigError("axis '" + axis.path + "' has no values");
        axes.push_back(std::move(axis));
        axis_paths.push_back(axes.back().path);
      }
    }

    // Cartesian expansion in row-major order (last axis fastest).
    std::size_t total = 1;
    for (const Axis& axis : axes) total *= axis.values.size();
    bool seed_axis = false;
    for (const Axis& axis : axes)
      if (axis.path == "seed") seed_axis = true;

    for (std::size_t index = 0; index < total; ++index) {
      SweepPoint point;
      point.config = base;
      std::size_t rem = index;
      for (std::size_t a = axes.size(); a-- > 0;) {
        const Axis& axis = axes[a];
        const json& value = axis.values[rem % axis.values.size()];
        rem /= axis.values.size();
        set_by_path(point.config, axis.path, value);
        point.assignment[axis.path] = value;
      }
      if (!seed_axis)
        point.config["seed"] = derive_seed(master_seed, index);
      char dir_name[32];
      std::snprintf(dir_name, sizeof dir_name, "point_%04zu", index);
      point.dir = (fs::path(out_dir) / dir_name).string();
      points.push_back(std::move(point));
    }
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  // Run the points, resuming any that already finished.
  std::mutex mu;
  std::size_t next = 0;
  auto run_point = [&](std::size_t i) {
    SweepPoint& point = points[i];
    const fs::path dir(point.dir);
    if (fs::exists(dir / "manifest.json") && fs::exists(dir / "result.json")) {
      try {
        const json result = json::parse(read_file((dir / "result.json").string()));
        point.status = "cached";
        point.artifacts.final_entropy = result.value("final_entropy", 0.0);
        point.artifacts.convergence_generation =
            result.value("convergence_generation", std::size_t{0});
        point.artifacts.final_metrics =
            result.value("final_metrics", std::map<std::string, double>{});
        return;
      } catch (const std::exception&) {
        // Fall through and recompute when the cache is unreadable.
      }
    }
    try {
      point.artifacts = run_experiment_json(point.config.dump());
      json result;
      result["final_entropy"] = point.artifacts.final_entropy;
      result["convergence_generation"] = point.artifacts.convergence_generation;
      result["final_metrics"] = point.artifacts.final_metrics;
      point.artifacts.files["result.json"] = result.dump(2) + "\n";
      point.artifacts.files["config.json"] = point.config.dump(2) + "\n";
      write_artifacts(dir, point.artifacts);
      point.status = "ok";
    } catch (const std::exception& e) {
      point.status = "error";
      point.error = e.what();
    }
  };

  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= points.size()) return;
        i = next++;
      }
      run_point(i);
    }
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) run_point(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < std::min(workers, points.size()); ++i)
      pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  // Summary CSV.
  std::map<std::string, bool> metric_keys;
  for (const SweepPoint& point : points)
    for (const auto& [key, value] : point.artifacts.final_metrics)
      metric_keys[key] = true;

  std::ostringstream summary;
  summary << "point,dir,status";
  for (const std::string& path : axis_paths) summary << ",axis:" << path;
  summary << ",convergence_generation,final_entropy";
  for (const auto& [key, unused] : metric_keys) summary << ',' << key;
  summary << ",error\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SweepPoint& point = points[i];
    summary << i << ',' << point.dir << ',' << point.status;
    for (const std::string& path : axis_paths)
      summary << ',' << point.assignment.at(path).dump();
    summary << ',' << point.artifacts.convergence_generation << ','
            << format_double(point.artifacts.final_entropy);
    for (const auto& [key, unused] : metric_keys) {
      const auto it = point.artifacts.final_metrics.find(key);
      summary << ','
              << (it == point.artifacts.final_metrics.end()
                      ? ""
                      : format_double(it->second));
    }
    summary << ',' << point.error << '\n';
  }

  // Aggregate verdicts.
  json aggregate;
  aggregate["schema_version"] = 1;
  json per_point = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    json p;
    p["point"] = i;
    p["status"] = points[i].status;
    p["assignment"] = points[i].assignment;
    p["final_metrics"] = points[i].artifacts.final_metrics;
    p["convergence_generation"] = points[i].artifacts.convergence_generation;
    per_point.push_back(std::move(p));
  }
  aggregate["points"] = std::move(per_point);

  const std::string bias_axis = "acre.bias_level";
  const bool has_bias_axis =
      std::find(axis_paths.begin(), axis_paths.end(), bias_axis) !=
      axis_paths.end();
  if (has_bias_axis) {
    // Group points by every other axis value, track the median
    // mass_target_off per bias level in the axis's declared order.
    std::map<std::string, std::map<std::string, std::vector<double>>> groups;
    std::vector<std::string> level_order;
    for (const SweepPoint& point : points) {
      if (point.status == "error") continue;
      std::string group_key, level;
      for (const auto& [path, value] : point.assignment) {
        if (path == bias_axis) {
          level = value.dump();
        } else if (path != "seed") {
          group_key += path + "=" + value.dump() + ";";
        }
      }
      if (std::find(level_order.begin(), level_order.end(), level) ==
          level_order.end())
        level_order.push_back(level);
      const auto it = point.artifacts.final_metrics.find("mass_target_off");
      if (it != point.artifacts.final_metrics.end())
        groups[group_key][level].push_back(it->second);
    }
    bool nondecreasing = true;
    for (auto& [group, by_level] : groups) {
      double prev = -1.0;
      for (const std::string& level : level_order) {
        if (!by_level.count(level)) continue;
        const double med = median(by_level[level]);
        if (med + 1e-12 < prev) nondecreasing = false;
        prev = med;
      }
    }
    aggregate["bias_ordering_nondecreasing"] = nondecreasing;
  }

  try {
    write_file(fs::path(out_dir) / "summary.csv", summary.str());
    write_file(fs::path(out_dir) / "aggregate.json",
               aggregate.dump(2) + "\n");
  } catch (const IoError& e) {
    log << "io error: " << e.what() << '\n';
    return kExitIoError;
  }

  std::size_t failures = 0;
  for (const SweepPoint& point : points)
    if (point.status == "error") ++failures;
  log << "sweep complete: " << points.size() << " points, " << failures
      << " failures -> " << out_dir << '\n';
  return failures == 0 ? kExitOk : kExitRunAbort;
}

namespace {

// Direct-summation posterior on a tiny space, used as the self-check
// oracle (independent of the log-space path).
std::vector<double> direct_posterior(const MappingSpace& space,
                                     const std::vector<double>& prior,
                                     const std::vector<Example>& data,
                                     double epsilon) {
  std::vector<double> post(prior);
  for (std::size_t h = 0; h < post.size(); ++h)
    for (const Example& d : data)
      post[h] *= space.apply(h, d.x) == d.y
                     ? 1.0 - epsilon
                     : epsilon / static_cast<double>(space.num_outputs() - 1);
  double total = 0.0;
  for (double p : post) total += p;
  for (double& p : post) p /= total;
  return post;
}

}  // namespace

int cmd_check(std::ostream& out, bool inject_broken_prior) {
  struct Check {
    std::string name;
    bool passed;
    std::string detail;
  };
  std::vector<Check> checks;
  auto record = [&checks](const std::string& name, bool ok,
                          const std::string& detail = "") {
    checks.push_back(Check{name, ok, detail});
  };

  static const SignalSpace signal_space;

  try {
    // Canonical grammar costs.
    SignalMapping deg;
    deg.message = {0, 0, 0, 0};
    SignalMapping sys;
    sys.message = {0, 1, 2, 3};  // color high bit, shape low bit
    // blue circle->00, red circle->01, red box->10, blue box->11
    SignalMapping holi;
    holi.message = {0, 3, 1, 2};
    record("coding length degenerate = 18", coding_length(deg) == 18);
    record("coding length systematic = 43", coding_length(sys) == 43);
    record("coding length holistic = 56", coding_length(holi) == 56);

    // Class census.
    int census[4] = {0, 0, 0, 0};
    int bijections = 0;
    for (const SignalMapping& m : enumerate_mappings()) {
      ++census[static_cast<int>(classify(m))];
      if (m.bijective()) ++bijections;
    }
    record("mapping classes 4/8/16/228",
           census[0] == 4 && census[1] == 8 && census[2] == 16 &&
               census[3] == 228);
    record("bijections = 24", bijections == 24);

    // Normalization, with the optional injected fault.
    const BeliefState prior = coding_prior(signal_space, 4.0);
    std::vector<double> probs = prior.probs();
    if (inject_broken_prior)
      for (double& p : probs) p *= 0.9;
    double total = 0.0;
    for (double p : probs) total += p;
    record("coding prior mass = 1", std::abs(total - 1.0) < 1e-9,
           "total " + format_double(total));

    const AcreSpace acre3(3);
    const BeliefState biased = acre_prior(
        acre3, BiasSpec{2, LightState::kOff, 8.0});
    double biased_total = 0.0;
    for (double p : biased.probs()) biased_total += p;
    record("biased reasoning prior mass = 1",
           std::abs(biased_total - 1.0) < 1e-9);

    // Entropy facts.
    record("entropy uniform-256 = ln 256",
           std::abs(entropy(BeliefState::uniform(signal_space)) -
                    std::log(256.0)) < 1e-9);
    std::vector<double> onehot(256, 0.0);
    onehot[7] = 1.0;
    record("entropy one-hot = 0",
           entropy(BeliefState::from_probs(signal_space.id(), onehot)) == 0.0);

    // Posterior vs direct summation on a tiny space.
    {
      const AcreSpace tiny(2);
      Rng rng(12345);
      bool ok = true;
      for (int trial = 0; trial < 20 && ok; ++trial) {
        std::vector<double> prior_probs(tiny.num_hypotheses());
        double prior_total = 0.0;
        for (double& p : prior_probs) {
          p = rng.next_unit() + 1e-3;
          prior_total += p;
        }
        for (double& p : prior_probs) p /= prior_total;
        std::vector<Example> data;
        const std::size_t h_true = rng.next_index(tiny.num_hypotheses());
        for (int i = 0; i < 4; ++i) {
          const int x = static_cast<int>(rng.next_index(tiny.num_inputs()));
          data.push_back(Example{x, tiny.apply(h_true, x)});
        }
        const double eps = 0.05;
        const BeliefState post = posterior_update(
            tiny, BeliefState::from_probs(tiny.id(), prior_probs), data,
            LikelihoodModel{eps, tiny.num_outputs()});
        const std::vector<double> oracle =
            direct_posterior(tiny, prior_probs, data, eps);
        for (std::size_t h = 0; h < oracle.size(); ++h)
          if (std::abs(post.prob(h) - oracle[h]) > 1e-12) ok = false;
      }
      record("posterior matches direct summation", ok);
    }

    // EM restricted to bijections settles on a factored mapping.
    {
      std::vector<bool> bijective(256);
      for (int idx = 0; idx < 256; ++idx)
        bijective[idx] = SignalMapping::from_index(idx).bijective();
      EmConfig em;
      em.m = 1;
      em.epsilon = 0.05;
      em.seed = 7;
      const EmRunResult result =
          em_reference(signal_space, prior, em, &bijective);
      record("restricted EM lands on a systematic mapping",
             !result.cycle_detected &&
                 classify(SignalMapping::from_index(
                     static_cast<int>(result.fixed_point))) ==
                     MappingClass::kSystematic);
    }

    // Referential game sanity: matching bijections always communicate.
    {
      std::vector<double> onehot_bij(256, 0.0);
      onehot_bij[SignalMapping{{0, 1, 2, 3}}.index()] = 1.0;
      const BeliefState b =
          BeliefState::from_probs(signal_space.id(), onehot_bij);
      Rng rng(99);
      bool all_success = true;
      const LikelihoodModel noiseless{0.0, 4};
      for (int round = 0; round < 200; ++round)
        if (!lewis_round(signal_space, b, b, noiseless, rng).success)
          all_success = false;
      record("referential game: shared bijection always succeeds",
             all_success);
    }

    record("temperature tau=1 is the identity",
           apply_temperature(prior, 1.0).probs() == prior.probs());
  } catch (const std::exception& e) {
    record("self-check crashed", false, e.what());
  }

  bool all_ok = true;
  for (const Check& c : checks) {
    out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name;
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << '\n';
    if (!c.passed) all_ok = false;
  }
  out << (all_ok ? "all checks passed\n" : "CHECK FAILURES\n");
  return all_ok ? kExitOk : 1;
}

int cmd_signal_table(double c, const std::string& out_path,
                     std::ostream& log) {
  try {
    static const SignalSpace space;
    std::ostringstream csv;
    write_signal_table_csv(csv, space, c);
    write_file(out_path, csv.str());
    log << "wrote " << out_path << '\n';
    return kExitOk;
  } catch (const DomainError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const IoError& e) {
    log << "io error: " << e.what() << '\n';
    return kExitIoError;
  }
}

}  // namespace cli
}  // namespace ilsim
