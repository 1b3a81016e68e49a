// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vavg/averaging.hpp"

namespace vavg {

// Flat "key = value" text with [section] headers and '#' comments. Keys
// before the first header live in section "". Every lookup error names the
// file and line of the offending entry.
class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  const std::string& origin() const { return origin_; }
  bool has(const std::string& section, const std::string& key) const;
  const Entry* find(const std::string& section, const std::string& key) const;
  std::vector<std::string> sections() const;
  std::vector<std::string> keys(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key, const std::string& def) const;
  double get_double(const std::string& section, const std::string& key, double def) const;
  int get_int(const std::string& section, const std::string& key, int def) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key, std::uint64_t def) const;
  bool get_bool(const std::string& section, const std::string& key, bool def) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::vector<double>& def) const;
  std::vector<int> get_ints(const std::string& section, const std::string& key, const std::vector<int>& def) const;
  // "ID:key=value,key=value | ID:..." ; every case is validated.
  std::vector<TheoremCase> get_cases(const std::string& section, const std::string& key, int dim) const;

  // Config error anchored at the entry.
  [[noreturn]] void fail_at(const std::string& section, const std::string& key, const std::string& msg) const;
  // Rejects keys outside the allowed table.
  void check_known(const std::map<std::string, std::vector<std::string>>& allowed) const;

 private:
  std::string origin_;
  std::map<std::string, std::map<std::string, Entry>> data_;
  std::map<std::string, int> section_lines_;
};

double parse_exponent(const std::string& s);
TheoremCase parse_case(const std::string& descriptor, int dim);

}  // namespace vavg
