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


#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"friedlab: dispersion experiments on the Friedlander model"};
  app.require_subcommand(0, 1);

  std::string config;
  friedlab::cli::RunOptions opts;
  std::string output;
  app.add_option("--config", config, "JSON run config")->check(CLI::ExistingFile);
  app.add_option("--output", output, "Output directory (overrides output_dir)");
  app.add_option("--workers", opts.workers, "Worker threads (overrides FRIEDLAB_WORKERS)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--verbose", opts.verbose, "Progress on stderr");

  auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare its CSV outputs");
  std::string manifest;
  replay->fallthrough();
  replay->add_option("manifest", manifest, "manifest.json of an earlier run")
      ->required()
      ->check(CLI::ExistingFile);

  auto* print = app.add_subcommand("print-config", "Print a config with every default filled in");
  std::string command;
  print->add_option("command", command, "Command name")
      ->required()
      ->check(CLI::IsMember(friedlab::cli::commands()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : friedlab::cli::kExitConfig;
  }
  opts.output = output;

  if (*print) {
    std::cout << friedlab::cli::default_config(command);
    return 0;
  }
  if (*replay) return friedlab::cli::replay(manifest, opts);
  if (config.empty()) {
    std::cerr << "config error: --config is required\n" << app.help();
    return friedlab::cli::kExitConfig;
  }
  return friedlab::cli::run_config_file(config, opts);
}
