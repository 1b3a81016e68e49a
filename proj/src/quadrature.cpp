// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "vavg/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <map>
#include <mutex>

#include "vavg/error.hpp"

namespace vavg {

QuadRule quad_rule_from_name(const std::string& s) {
  if (s == "gauss" || s == "gauss_legendre") return QuadRule::gauss_legendre;
  if (s == "midpoint") return QuadRule::midpoint;
  if (s == "trapezoid") return QuadRule::trapezoid;
  fail(ErrorCode::parameter, "unknown quadrature rule '" + s + "'");
}

const char* quad_rule_name(QuadRule r) {
  switch (r) {
    case QuadRule::gauss_legendre: return "gauss_legendre";
    case QuadRule::midpoint: return "midpoint";
    case QuadRule::trapezoid: return "trapezoid";
  }
  return "gauss_legendre";
}

namespace {

// Reference rule on [-1, 1], cached per order.
const Quadrature& reference_gauss(int n) {
  static std::mutex mu;
  static std::map<int, Quadrature> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Quadrature q;
  auto zeros = boost::math::legendre_p_zeros<double>(n);  // nonnegative half
  for (double z : zeros) {
    double dp = boost::math::legendre_p_prime<double>(n, z);
    double w = 2.0 / ((1.0 - z * z) * dp * dp);
    q.nodes.push_back(z);
    q.weights.push_back(w);
    if (z != 0.0) {
      q.nodes.push_back(-z);
      q.weights.push_back(w);
    }
  }
  std::vector<std::size_t> order(q.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return q.nodes[a] < q.nodes[b]; });
  Quadrature s;
  for (auto i : order) {
    s.nodes.push_back(q.nodes[i]);
    s.weights.push_back(q.weights[i]);
  }
  return cache.emplace(n, std::move(s)).first->second;
}

}  // namespace

Quadrature gauss_legendre(int n, double a, double b) {
  require(n >= 1, ErrorCode::parameter, "quadrature needs at least one node");
  const Quadrature& ref = reference_gauss(n);
  Quadrature q;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    q.nodes.push_back(mid + half * ref.nodes[i]);
    q.weights.push_back(half * ref.weights[i]);
  }
  return q;
}

Quadrature midpoint_rule(int n, double a, double b) {
  require(n >= 1, ErrorCode::parameter, "quadrature needs at least one node");
  Quadrature q;
  const double h = (b - a) / n;
  for (int i = 0; i < n; ++i) {
    q.nodes.push_back(a + (i + 0.5) * h);
    q.weights.push_back(h);
  }
  return q;
}

Quadrature trapezoid_rule(int n, double a, double b) {
  require(n >= 1, ErrorCode::parameter, "quadrature needs at least one interval");
  Quadrature q;
  const double h = (b - a) / n;
  for (int i = 0; i <= n; ++i) {
    q.nodes.push_back(a + i * h);
    q.weights.push_back((i == 0 || i == n) ? 0.5 * h : h);
  }
  return q;
}

Quadrature make_quadrature(QuadRule rule, int n, double a, double b) {
  switch (rule) {
    case QuadRule::gauss_legendre: return gauss_legendre(n, a, b);
    case QuadRule::midpoint: return midpoint_rule(n, a, b);
    case QuadRule::trapezoid: return trapezoid_rule(n, a, b);
  }
  return gauss_legendre(n, a, b);
}

}  // namespace vavg
