// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Small generators shared by the property tests.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "vavg/field.hpp"

namespace vavg::testing {

inline Field random_field(const GridSpec& g, Layout layout, std::uint64_t seed, bool real = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  Field f(g, layout);
  for (auto& c : f.data()) c = real ? cplx(n01(rng), 0.0) : cplx(n01(rng), n01(rng));
  return f;
}

// Smooth, periodic trigonometric polynomial with a few random modes per group.
inline Field random_trig_field(const GridSpec& g, Layout layout, int max_mode, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> mode(-max_mode, max_mode);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi);
  struct Term { int kx[2], kv[2]; double phase, amp; };
  std::vector<Term> terms(6);
  for (auto& t : terms) {
    for (int d = 0; d < 2; ++d) {
      t.kx[d] = mode(rng);
      t.kv[d] = mode(rng);
    }
    t.phase = ph(rng);
    t.amp = 1.0 + 0.5 * std::sin(t.phase);
  }
  const double w = 2.0 * kPi / g.period;
  return sample_function(
      [&](std::span<const double> x, std::span<const double> v) {
        cplx acc(0.0, 0.0);
        for (const auto& t : terms) {
          double arg = t.phase;
          for (std::size_t d = 0; d < x.size(); ++d) arg += w * t.kx[d] * x[d];
          for (std::size_t d = 0; d < v.size(); ++d) arg += w * t.kv[d] * v[d];
          acc += t.amp * std::exp(cplx(0.0, arg));
        }
        return acc;
      },
      g, layout);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace vavg::testing
