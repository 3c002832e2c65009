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

#ifndef ILSIM_RUNNER_HPP_
#define ILSIM_RUNNER_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ilsim {

inline constexpr const char* kVersion = "0.1.0";

namespace cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRunAbort = 3;
inline constexpr int kExitIoError = 4;

// A finished run, kept in memory so tests can compare artifacts without
// touching the filesystem. `files` maps artifact file names (metrics.csv,
// trajectory.json, manifest.json, ...) to their exact byte content.
struct RunArtifacts {
  std::map<std::string, std::string> files;
  std::map<std::string, double> final_metrics;
  double final_entropy = 0.0;
  std::size_t convergence_generation = 0;
};

// Parses, validates (unknown keys rejected) and runs an experiment config.
// Throws ConfigError / InfeasibleEffectiveSetError / IoError.
RunArtifacts run_experiment_json(const std::string& config_text);

// `run <config>`: executes the experiment and writes trajectory JSON,
// metrics CSV and a manifest under the output directory.
int cmd_run(const std::string& config_path, const std::string& out_override,
            std::ostream& log);

// `sweep <grid>`: expands the axes over the base config, runs every point
// (resuming past completed points), and writes per-point directories plus
// summary.csv and aggregate.json.
int cmd_sweep(const std::string& grid_path, const std::string& out_override,
              std::size_t workers_override, std::ostream& log);

// `check`: the fast self-check table. `inject_broken_prior` exists for
// fault-injection tests and makes the normalization check fail.
int cmd_check(std::ostream& out, bool inject_broken_prior = false);

// `signal-table`: dumps the (mapping, class, alpha, prior) table.
int cmd_signal_table(double c, const std::string& out_path, std::ostream& log);

// FNV-1a over the canonical (sorted-key) config dump.
std::string config_hash(const std::string& canonical_text);

}  // namespace cli
}  // namespace ilsim

#endif  // ILSIM_RUNNER_HPP_
