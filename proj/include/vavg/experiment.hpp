// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vavg/config.hpp"

namespace vavg {

inline constexpr int kReportSchemaVersion = 1;

struct RunOptions {
  std::string out_dir;                 // empty: take [""] out_dir from the config, else "out"
  int threads = 1;
  std::optional<std::uint64_t> seed;   // overrides the config seed
  std::function<void(const std::string&)> log;
};

struct SuiteOutcome {
  std::string suite;
  bool pass = true;
  int verdicts = 0;
  int failed = 0;
  std::vector<std::string> failed_checks;
};

// identities, norms, dispersive, verify, counterexample, lambda-strip
const std::vector<std::string>& suite_names();

// Every section and key the runner understands, for Config::check_known.
std::map<std::string, std::vector<std::string>> known_config_keys();

// Runs one suite or "all". All settings are read and validated before any
// computation, so a bad config throws ErrorCode::config without writing
// reports. Returns 0 when every verdict passes, 1 otherwise.
int run_experiment(const std::string& subcommand, const Config& cfg, const RunOptions& opt,
                   std::vector<SuiteOutcome>* outcomes = nullptr);

}  // namespace vavg
