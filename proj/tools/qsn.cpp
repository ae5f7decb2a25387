// Copyright 2026 The qsn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <set>
#include <string>

#include "qsn/error.hpp"
#include "qsn/runner.hpp"
#include "qsn/scenario.hpp"

namespace {

struct Command {
  std::string file;
  std::set<qsn::Task> tasks;
};

int exit_code(const qsn::Error& e) { return qsn::is_numerical_guard(e.code()) ? 3 : 2; }

void print_summary(const qsn::Scenario& s, const qsn::RunArtifacts& art) {
  std::printf("%s (%s): %zu rows -> %s\n", s.name.c_str(), std::string(qsn::to_string(s.task)).c_str(),
              art.result.table.rows.size(), art.csv.string().c_str());
  for (const auto& [key, value] : art.result.summary) {
    std::printf("  %s = %s\n", key.c_str(), qsn::format_number(value).c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlated-noise estimation with quantum sensor networks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string out_dir = "qsn_out";
  bool quiet = false;
  app.add_option("--seed", seed, "Master seed, overrides method.seed");
  app.add_option("--out-dir", out_dir, "Directory for CSV, manifest and plot files")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads, overrides method.threads")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "Suppress the summary on stdout");

  using qsn::Task;
  Command qfi{"", {Task::qfi, Task::qfi_multi, Task::rayleigh, Task::cv_advantage}};
  Command echo{"", {Task::echo}};
  Command sweep{"", {Task::sweep_K, Task::nogo_passive, Task::rayleigh}};
  std::string validate_file;

  auto* qfi_cmd = app.add_subcommand("qfi", "QFI tasks: qfi, qfi_multi, rayleigh, cv_advantage");
  qfi_cmd->add_option("file", qfi.file, "Scenario file")->required();
  auto* echo_cmd = app.add_subcommand("echo", "Echo protocol with MLE");
  echo_cmd->add_option("file", echo.file, "Scenario file")->required();
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweeps: sweep_K, nogo_passive, rayleigh");
  sweep_cmd->add_option("file", sweep.file, "Scenario file")->required();
  auto* validate_cmd = app.add_subcommand("validate", "Load and validate a scenario without running it");
  validate_cmd->add_option("file", validate_file, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*validate_cmd) {
      const qsn::Scenario s = qsn::load_scenario(validate_file);
      if (!quiet) {
        std::printf("%s: valid %s scenario, %zu defaults filled\n", validate_file.c_str(),
                    std::string(qsn::to_string(s.task)).c_str(), s.defaults_filled.size());
      }
      return 0;
    }
    const Command& cmd = *qfi_cmd ? qfi : *echo_cmd ? echo : sweep;
    const std::string name = *qfi_cmd ? "qfi" : *echo_cmd ? "echo" : "sweep";
    const qsn::Scenario s = qsn::load_scenario(cmd.file);
    if (!cmd.tasks.count(s.task)) {
      qsn::fail(qsn::ErrorCode::ValidationError,
                "task '" + std::string(qsn::to_string(s.task)) + "' is not run by 'qsn " + name + "'");
    }
    qsn::RunOptions opts;
    opts.out_dir = out_dir;
    opts.seed = seed;
    opts.threads = threads;
    const qsn::RunArtifacts art = qsn::run_scenario(s, opts);
    if (!quiet) print_summary(s, art);
    return 0;
  } catch (const qsn::Error& e) {
    std::fprintf(stderr, "qsn: %s\n", e.what());
    return exit_code(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qsn: %s\n", e.what());
    return 1;
  }
}
