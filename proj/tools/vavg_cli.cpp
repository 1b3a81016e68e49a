// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Experiment runner. Exit status: 0 all verdicts pass, 1 some verdict failed,
// 2 bad config or command line, 3 any other failure.

#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "vavg/vavg.h"

namespace {

void print_line(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"velocity averaging verification suites"};
  app.set_version_flag("--version", std::string(vavg_version()));

  std::string subcommand, config, out;
  int threads = 1;
  std::uint64_t seed = 0;
  app.add_option("subcommand", subcommand, "identities | norms | dispersive | verify | counterexample | lambda-strip | all")
      ->required()
      ->check(CLI::IsMember({"identities", "norms", "dispersive", "verify", "counterexample", "lambda-strip", "all"}));
  app.add_option("--config", config, "config file")->required();
  app.add_option("--out", out, "output directory (overrides out_dir in the config)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  int exit_code = 0;
  const vavg_status st = vavg_run(subcommand.c_str(), config.c_str(), out.empty() ? nullptr : out.c_str(), threads,
                                  seed_opt->count() > 0, seed, print_line, nullptr, &exit_code);
  if (st == VAVG_OK) return exit_code;
  std::fprintf(stderr, "error: %s\n", vavg_last_error());
  return (st == VAVG_E_CONFIG || st == VAVG_E_USAGE) ? 2 : 3;
}
