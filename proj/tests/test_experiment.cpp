// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "vavg/experiment.hpp"

using namespace vavg;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vavg_test_experiment_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// small strip run: a few seconds on one core
const char* kStrip = "[lambda_strip]\nn = 32\nlambdas = 2, 4, 8\nalphas = 0\n";

}  // namespace

TEST_CASE("suite list") {
  CHECK(suite_names().size() == 6);
  CHECK(known_config_keys().count("lambda_strip") == 1);
}

TEST_CASE("an empty case list writes a passing empty report") {
  const fs::path out = scratch("empty");
  RunOptions opt;
  opt.out_dir = out.string();
  std::vector<SuiteOutcome> res;
  const int rc = run_experiment("verify", Config::parse("[verify]\ncases =\n"), opt, &res);
  CHECK(rc == 0);
  REQUIRE(res.size() == 1);
  CHECK(res[0].verdicts == 0);
  const json j = json::parse(slurp(out / "verify.json"));
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["suite"] == "verify");
  CHECK(j["pass"] == true);
  CHECK(j["checks"].empty());
  CHECK(fs::exists(out / "verify" / "checks.csv"));
  fs::remove_all(out);
}

TEST_CASE("config problems stop the run before anything is written") {
  const fs::path out = scratch("bad");
  RunOptions opt;
  opt.out_dir = out.string();
  for (const char* text : {"[verify]\ncases = PROP_B011:beta=1\n", "[nope]\n", "[norms]\nseeds = two\n",
                           "cutoff_width = 0.3\n", "[identities]\nband_fraction = 2\n"}) {
    try {
      run_experiment("identities", Config::parse(text, "bad.cfg"), opt);
      FAIL("expected a config error for: " << text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::config);
      CHECK(std::string(e.what()).rfind("bad.cfg:", 0) == 0);
    }
    CHECK_FALSE(fs::exists(out));
  }
  try {
    run_experiment("bogus", Config::parse(""), opt);
    FAIL("expected a usage error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::usage);
  }
}

TEST_CASE("reports are byte-identical across thread counts and reruns") {
  const Config cfg = Config::parse(kStrip);
  std::string first;
  for (int threads : {1, 2, 1}) {
    const fs::path out = scratch("det" + std::to_string(threads));
    RunOptions opt;
    opt.out_dir = out.string();
    opt.threads = threads;
    std::vector<SuiteOutcome> res;
    const int rc = run_experiment("lambda-strip", cfg, opt, &res);
    CHECK((rc == 0 || rc == 1));
    const std::string body = slurp(out / "lambda_strip.json");
    const json j = json::parse(body);
    CHECK(j["suite"] == "lambda-strip");
    CHECK(j["verdicts"] == res[0].verdicts);
    for (const auto& c : j["checks"]) {
      CHECK(c.contains("name"));
      CHECK((c["kind"] == "verdict" || c["kind"] == "info"));
    }
    if (first.empty())
      first = body;
    else
      CHECK(body == first);
    fs::remove_all(out);
  }
}

TEST_CASE("seed override is recorded in the settings") {
  const fs::path out = scratch("seed");
  RunOptions opt;
  opt.out_dir = out.string();
  opt.seed = 99;
  run_experiment("verify", Config::parse("[verify]\ncases =\n"), opt);
  const json j = json::parse(slurp(out / "verify.json"));
  CHECK(j["settings"]["seed"] == 99);
  fs::remove_all(out);
}
