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

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "ilsim/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Iterated-learning simulator for Bayesian agents"};
  app.require_subcommand(1);

  std::string config_path;
  std::string grid_path;
  std::string out_dir;
  std::size_t workers = 0;
  double coding_c = 4.0;
  std::string table_path = "signal_table.csv";

  CLI::App* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("config", config_path, "Experiment config JSON")->required();
  run->add_option("--out", out_dir, "Output directory (overrides out_dir)");

  CLI::App* sweep = app.add_subcommand("sweep", "Run a config grid");
  sweep->add_option("grid", grid_path, "Sweep grid JSON")->required();
  sweep->add_option("--out", out_dir, "Output directory (overrides out_dir)");
  sweep->add_option("--workers", workers, "Concurrent runs");

  CLI::App* check = app.add_subcommand("check", "Run the fast self-checks");

  CLI::App* table =
      app.add_subcommand("signal-table", "Dump the signaling prior table");
  table->add_option("--c", coding_c, "Coding prior constant");
  table->add_option("--out", table_path, "Output CSV path");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return ilsim::cli::cmd_run(config_path, out_dir, std::cout);
  if (sweep->parsed())
    return ilsim::cli::cmd_sweep(grid_path, out_dir, workers, std::cout);
  if (check->parsed()) return ilsim::cli::cmd_check(std::cout);
  if (table->parsed())
    return ilsim::cli::cmd_signal_table(coding_c, table_path, std::cout);
  return 0;
}
