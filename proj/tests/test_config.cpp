// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include <cmath>
#include <functional>

#include "doctest.h"
#include "vavg/config.hpp"

using namespace vavg;

namespace {

std::string config_error(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    return e.what();
  }
  return "";
}

const char* kText = R"(# top
seed = 7
[grid]
n = 64          # trailing comment
ratio = 0.5
big = inf
list = 1, 2.5, inf
ints = 3, 4
flag = yes
empty =
cases = P:p=1,q=1,alpha=0 | CLASSICAL:alpha=1,beta=0.25
)";

}  // namespace

TEST_CASE("typed getters") {
  const Config c = Config::parse(kText, "t.cfg");
  CHECK(c.get_u64("", "seed", 0) == 7);
  CHECK(c.get_int("grid", "n", 0) == 64);
  CHECK(c.get_double("grid", "ratio", 0.0) == 0.5);
  CHECK(std::isinf(c.get_double("grid", "big", 0.0)));
  CHECK(c.get_double("grid", "missing", 3.5) == 3.5);
  const auto l = c.get_doubles("grid", "list", {});
  REQUIRE(l.size() == 3);
  CHECK(l[1] == 2.5);
  CHECK(std::isinf(l[2]));
  CHECK(c.get_ints("grid", "ints", {}) == std::vector<int>{3, 4});
  CHECK(c.get_doubles("grid", "empty", {1.0}).empty());
  CHECK(c.get_bool("grid", "flag", false));
  CHECK(c.get_string("grid", "n", "") == "64");
  CHECK(c.has("grid", "ratio"));
  CHECK_FALSE(c.has("other", "ratio"));
}

TEST_CASE("cases parse and validate") {
  const Config c = Config::parse(kText, "t.cfg");
  const auto cs = c.get_cases("grid", "cases", 1);
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].id == TheoremId::P);
  CHECK(cs[0].p == 1.0);
  CHECK(cs[1].id == TheoremId::CLASSICAL);
  CHECK(cs[1].beta == 0.25);
  CHECK(c.get_cases("grid", "empty", 1).empty());
  CHECK(parse_case("MAIN", 2).dim == 2);
}

TEST_CASE("errors carry file and line") {
  const Config c = Config::parse(kText, "t.cfg");
  CHECK(config_error([&] { c.get_int("grid", "ratio", 0); }) == "t.cfg:5: grid.ratio: expected an integer, got '0.5'");
  CHECK(config_error([&] { c.get_bool("grid", "n", false); }) == "t.cfg:4: grid.n: expected a boolean, got '64'");
  CHECK(config_error([&] { c.get_ints("grid", "list", {}); }) ==
        "t.cfg:7: grid.list: expected a comma-separated list of integers");
  CHECK(config_error([&] { Config::parse("a = 1\na = 2\n", "d.cfg"); }) == "d.cfg:2: duplicate key 'a'");
  CHECK(config_error([&] { Config::parse("[x\n", "d.cfg"); }) == "d.cfg:1: unterminated section header");
  CHECK(config_error([&] { Config::parse("just words\n", "d.cfg"); }) == "d.cfg:1: expected 'key = value'");
  CHECK(config_error([&] { Config::parse("[a]\n[a]\n", "d.cfg"); }) == "d.cfg:2: duplicate section [a]");
  CHECK(config_error([&] { Config::load("/nonexistent/x.cfg"); }) == "/nonexistent/x.cfg: cannot open config file");
}

TEST_CASE("bad cases are config errors naming the case") {
  const Config c = Config::parse("[v]\ncases = P:p=2 | PROP_B011:beta=1\n", "c.cfg");
  CHECK(config_error([&] { c.get_cases("v", "cases", 1); }) ==
        "c.cfg:2: v.cases: case 2 (PROP_B011:beta=1): case violates PROP schedule requires beta < 1");
  const Config u = Config::parse("[v]\ncases = P:zeta=2\n", "c.cfg");
  CHECK(config_error([&] { u.get_cases("v", "cases", 1); }) ==
        "c.cfg:2: v.cases: case 1 (P:zeta=2): unknown case parameter 'zeta'");
  const Config n = Config::parse("[v]\ncases = Q:p=2\n", "c.cfg");
  CHECK(config_error([&] { n.get_cases("v", "cases", 1); }) ==
        "c.cfg:2: v.cases: case 1 (Q:p=2): unknown theorem id 'Q'");
  CHECK(config_error([] { parse_case("P:p", 1); }) == "case parameter 'p' lacks '='");
  CHECK(config_error([] { parse_exponent("two"); }) == "not a number: 'two'");
}

TEST_CASE("unknown sections and keys are rejected") {
  const Config c = Config::parse("seed = 1\n[grid]\nn = 4\nm = 5\n", "k.cfg");
  CHECK_NOTHROW(c.check_known({{"", {"seed"}}, {"grid", {"n", "m"}}}));
  CHECK(config_error([&] { c.check_known({{"", {"seed"}}, {"grid", {"n"}}}); }) ==
        "k.cfg:4: unknown key 'm' in section [grid]");
  CHECK(config_error([&] { c.check_known({{"", {"seed"}}}); }) == "k.cfg:2: unknown section [grid]");
}
