// Copyright 2026 The sharecheck Authors
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

// Command-line front end. The commands are plain functions returning a
// report and an exit code so tests can drive them without a process.

#ifndef SHARECHECK_CLI_HPP
#define SHARECHECK_CLI_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sharecheck/ghost_engine.hpp"
#include "sharecheck/relation_suite.hpp"

namespace sharecheck {

enum ExitCode : int {
  kExitOk = 0,
  kExitMismatch = 1,  // verdict mismatch or violation
  kExitInput = 2,     // unreadable or malformed input
  kExitBound = 3,     // exploration bound exceeded
};

/// Worst of two exit codes: input error, then bound, then mismatch.
int combine_exit(int a, int b);

struct CliOptions {
  AdmissionMode mode = AdmissionMode::Rule;
  std::optional<std::size_t> max_states;
  std::optional<std::size_t> max_steps;
  /// Denominator bound for fractional carriers.
  std::optional<std::int64_t> bound;
  bool text = false;
  bool quiet = false;
  std::filesystem::path data_dir;
};

struct CommandResult {
  int exit = kExitOk;
  nlohmann::json report;
  std::string text;
};

/// Relation-query file: {"queries": [{"name", "relation", "p", "s",
/// "p_after", "s_after", "expect": "holds" | "fails"}]}.
nlohmann::json relations_to_json(const ProtocolSuite& suite);

CommandResult run_check(const nlohmann::json& protocol, const nlohmann::json& relations,
                        const CliOptions& options = {});
CommandResult run_explore(const nlohmann::json& scenario, const CliOptions& options = {});

struct DemoEntry {
  std::string name;
  std::string command;              // check | explore
  std::vector<std::string> inputs;  // paths relative to the data directory
};

const std::vector<DemoEntry>& demo_registry();

/// Data-directory files the demos read, generated from the builders.
/// Keys are relative paths.
std::map<std::string, nlohmann::json> demo_files();

/// Unknown names exit 2 with the registry listed.
CommandResult run_demo(const std::string& name, const CliOptions& options);
/// Every demo in registry order, in one report.
CommandResult run_report(const CliOptions& options);

/// Default data directory baked in at build time.
std::filesystem::path default_data_dir();

/// Parses argv and runs one subcommand.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sharecheck

#endif  // SHARECHECK_CLI_HPP
