// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "vavg/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace vavg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

bool to_double(const std::string& s, double& out) {
  if (s == "inf" || s == "infinity") {
    out = kInf;
    return true;
  }
  const char* b = s.data();
  const char* e = b + s.size();
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e && std::isfinite(out);
}

bool valid_key(const std::string& k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) { return std::isalnum((unsigned char)c) || c == '_'; });
}

}  // namespace

double parse_exponent(const std::string& s) {
  double v = 0.0;
  require(to_double(trim(s), v), ErrorCode::config, "not a number: '" + s + "'");
  return v;
}

TheoremCase parse_case(const std::string& descriptor, int dim) {
  const auto colon = descriptor.find(':');
  const std::string id = trim(descriptor.substr(0, colon));
  TheoremCase c;
  try {
    c.id = theorem_from_name(id);
  } catch (const Error& e) {
    fail(ErrorCode::config, e.what());
  }
  c.dim = dim;
  if (colon == std::string::npos) return c;
  for (const auto& kv : split(descriptor.substr(colon + 1), ',')) {
    if (kv.empty()) continue;
    const auto eq = kv.find('=');
    require(eq != std::string::npos, ErrorCode::config, "case parameter '" + kv + "' lacks '='");
    const std::string k = trim(kv.substr(0, eq));
    const double v = parse_exponent(kv.substr(eq + 1));
    std::map<std::string, double*> slots{{"alpha", &c.alpha}, {"beta", &c.beta}, {"a", &c.a},   {"b", &c.b},
                                         {"p", &c.p},         {"q", &c.q},       {"r", &c.r},   {"r0", &c.r0},
                                         {"p0", &c.p0},       {"q0", &c.q0},     {"r1", &c.r1}, {"p1", &c.p1},
                                         {"q1", &c.q1},       {"epsilon", &c.epsilon}};
    auto it = slots.find(k);
    require(it != slots.end(), ErrorCode::config, "unknown case parameter '" + k + "'");
    *it->second = v;
  }
  return c;
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream is(text);
  std::string raw, section;
  int line = 0;
  auto bad = [&](const std::string& msg) { fail(ErrorCode::config, origin + ":" + std::to_string(line) + ": " + msg); };
  cfg.data_[""];
  while (std::getline(is, raw)) {
    ++line;
    std::string s = raw;
    if (auto h = s.find('#'); h != std::string::npos) s = s.substr(0, h);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') bad("unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!valid_key(section)) bad("invalid section name '" + section + "'");
      if (cfg.section_lines_.count(section)) bad("duplicate section [" + section + "]");
      cfg.section_lines_[section] = line;
      cfg.data_[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) bad("expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    if (!valid_key(key)) bad("invalid key '" + key + "'");
    auto& sec = cfg.data_[section];
    if (sec.count(key)) bad("duplicate key '" + key + "'");
    sec[key] = Entry{trim(s.substr(eq + 1)), line};
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(bool(in), ErrorCode::config, path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  if (s == data_.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

std::vector<std::string> Config::sections() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : data_) out.push_back(k);
  return out;
}

std::vector<std::string> Config::keys(const std::string& section) const {
  std::vector<std::string> out;
  auto s = data_.find(section);
  if (s != data_.end())
    for (const auto& [k, v] : s->second) out.push_back(k);
  return out;
}

void Config::fail_at(const std::string& section, const std::string& key, const std::string& msg) const {
  const Entry* e = find(section, key);
  const std::string where = section.empty() ? key : section + "." + key;
  fail(ErrorCode::config, origin_ + ":" + std::to_string(e ? e->line : 0) + ": " + where + ": " + msg);
}

std::string Config::get_string(const std::string& section, const std::string& key, const std::string& def) const {
  const Entry* e = find(section, key);
  return e ? e->value : def;
}

double Config::get_double(const std::string& section, const std::string& key, double def) const {
  const Entry* e = find(section, key);
  if (!e) return def;
  double v = 0.0;
  if (!to_double(e->value, v)) fail_at(section, key, "expected a number, got '" + e->value + "'");
  return v;
}

int Config::get_int(const std::string& section, const std::string& key, int def) const {
  const Entry* e = find(section, key);
  if (!e) return def;
  int v = 0;
  auto r = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
  if (r.ec != std::errc() || r.ptr != e->value.data() + e->value.size())
    fail_at(section, key, "expected an integer, got '" + e->value + "'");
  return v;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key, std::uint64_t def) const {
  const Entry* e = find(section, key);
  if (!e) return def;
  std::uint64_t v = 0;
  auto r = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
  if (r.ec != std::errc() || r.ptr != e->value.data() + e->value.size())
    fail_at(section, key, "expected an unsigned integer, got '" + e->value + "'");
  return v;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool def) const {
  const Entry* e = find(section, key);
  if (!e) return def;
  if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no") return false;
  fail_at(section, key, "expected a boolean, got '" + e->value + "'");
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        const std::vector<double>& def) const {
  const Entry* e = find(section, key);
  if (!e) return def;
  std::vector<double> out;
  if (trim(e->value).empty()) return out;
  for (const auto& item : split(e->value, ',')) {
    double v = 0.0;
    if (!to_double(item, v)) fail_at(section, key, "expected a comma-separated list of numbers");
    out.push_back(v);
  }
  return out;
}

std::vector<int> Config::get_ints(const std::string& section, const std::string& key,
                                  const std::vector<int>& def) const {
  const Entry* e = find(section, key);
  if (!e) return def;
  std::vector<int> out;
  if (trim(e->value).empty()) return out;
  for (const auto& item : split(e->value, ',')) {
    int v = 0;
    auto r = std::from_chars(item.data(), item.data() + item.size(), v);
    if (r.ec != std::errc() || r.ptr != item.data() + item.size())
      fail_at(section, key, "expected a comma-separated list of integers");
    out.push_back(v);
  }
  return out;
}

std::vector<TheoremCase> Config::get_cases(const std::string& section, const std::string& key, int dim) const {
  const Entry* e = find(section, key);
  std::vector<TheoremCase> out;
  if (!e || trim(e->value).empty()) return out;
  int idx = 0;
  for (const auto& desc : split(e->value, '|')) {
    ++idx;
    if (desc.empty()) continue;
    try {
      TheoremCase c = parse_case(desc, dim);
      validate_case(c);
      if (c.id == TheoremId::PROP_B011) interpolation_schedule(c, 0);
      out.push_back(c);
    } catch (const Error& err) {
      fail_at(section, key, "case " + std::to_string(idx) + " (" + desc + "): " + err.what());
    }
  }
  return out;
}

void Config::check_known(const std::map<std::string, std::vector<std::string>>& allowed) const {
  for (const auto& [sec, entries] : data_) {
    auto a = allowed.find(sec);
    if (a == allowed.end()) {
      const int line = section_lines_.count(sec) ? section_lines_.at(sec) : 0;
      fail(ErrorCode::config, origin_ + ":" + std::to_string(line) + ": unknown section [" + sec + "]");
    }
    for (const auto& [k, e] : entries)
      if (std::find(a->second.begin(), a->second.end(), k) == a->second.end())
        fail(ErrorCode::config,
             origin_ + ":" + std::to_string(e.line) + ": unknown key '" + k + "' in section [" + sec + "]");
  }
}

}  // namespace vavg
