// Copyright 2026 The friedlab Authors.
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


#ifndef FRIEDLAB_TOOLS_RUNNER_HPP_
#define FRIEDLAB_TOOLS_RUNNER_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace friedlab::cli {

enum ExitCode : int { kExitOk = 0, kExitClaimFail = 1, kExitConfig = 2, kExitBudget = 3 };

const std::vector<std::string>& commands();

struct RunOptions {
  std::filesystem::path output;  // overrides the config's output_dir when set
  int workers = 0;               // 0: config, then FRIEDLAB_WORKERS
  bool verbose = false;
};

// Runs a JSON config. Writes artifacts and manifest.json under the output
// directory, prints one verdict line per claim and returns the exit code.
int run_config_text(const std::string& text, const RunOptions& opts);
int run_config_file(const std::filesystem::path& path, const RunOptions& opts);

// Re-executes a manifest's config into a fresh directory and compares the
// CSV artifacts byte for byte. Refuses a manifest whose own hash is wrong.
int replay(const std::filesystem::path& manifest, const RunOptions& opts);

// Example config for a command, with every parameter at its default.
std::string default_config(const std::string& command);

}  // namespace friedlab::cli

#endif  // FRIEDLAB_TOOLS_RUNNER_HPP_
