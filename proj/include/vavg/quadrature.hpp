// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <string>
#include <vector>

namespace vavg {

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

enum class QuadRule { gauss_legendre, midpoint, trapezoid };

QuadRule quad_rule_from_name(const std::string& s);
const char* quad_rule_name(QuadRule r);

Quadrature gauss_legendre(int n, double a, double b);
Quadrature midpoint_rule(int n, double a, double b);
// n intervals, n + 1 nodes including both endpoints.
Quadrature trapezoid_rule(int n, double a, double b);
Quadrature make_quadrature(QuadRule rule, int n, double a, double b);

}  // namespace vavg
