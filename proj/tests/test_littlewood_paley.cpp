// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include <cmath>

#include "doctest.h"
#include "test_util.hpp"
#include "vavg/littlewood_paley.hpp"

using namespace vavg;
using vavg::testing::random_field;

namespace {
const DyadicCutoffs cut(0.125);
const GridSpec g1{1, 32, 2.0 * kPi};
const GridSpec g2{2, 32, 2.0 * kPi};
}  // namespace

TEST_CASE("low cutoff: plateau, midpoint, support, monotone") {
  CHECK(cut.psi(0.0) == 1.0);
  CHECK(cut.psi(0.625) == 1.0);
  CHECK(cut.psi(0.75) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cut.psi(0.875) == 0.0);
  CHECK(cut.psi(-0.3) == 1.0);
  double prev = 1.0;
  for (int i = 0; i <= 2000; ++i) {
    const double r = 0.6 + 0.3 * i / 2000.0;
    const double v = cut.psi(r);
    CHECK(v <= prev + 1e-15);
    CHECK(v >= 0.0);
    prev = v;
  }
}

TEST_CASE("transition is odd about its midpoint") {
  for (int i = 0; i <= 100; ++i) {
    const double u = 0.125 * i / 100.0;
    CHECK(cut.psi(0.75 + u) + cut.psi(0.75 - u) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("annulus cutoff lives on [phi_inner, phi_outer]") {
  CHECK(cut.phi_inner() == doctest::Approx(0.625));
  CHECK(cut.phi_outer() == doctest::Approx(1.75));
  for (int i = 0; i <= 4000; ++i) {
    const double r = 4.0 * i / 4000.0;
    if (r <= cut.phi_inner() || r >= cut.phi_outer()) CHECK(cut.phi(r) == 0.0);
    CHECK(cut.phi(r) >= 0.0);
    CHECK(cut.phi(r) <= 1.0);
  }
}

TEST_CASE("partition of unity and telescoping") {
  for (int i = 0; i <= 5000; ++i) {
    const double r = 1000.0 * i / 5000.0;
    double s = cut.psi(r);
    for (int k = 0; k <= 12; ++k) s += cut.phi(std::ldexp(r, -k));
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    double t = cut.psi(r);
    for (int k = 0; k <= 3; ++k) t += cut.phi(std::ldexp(r, -k));
    CHECK(t == doctest::Approx(cut.psi(r / 16.0)).epsilon(1e-13));
  }
}

TEST_CASE("annuli two octaves apart are disjoint, and the cutoff is not a projection") {
  double worst = 0.0;
  bool not_idempotent = false;
  for (int i = 0; i <= 4000; ++i) {
    const double r = 64.0 * i / 4000.0;
    for (int j = 0; j < 5; ++j)
      for (int k = j + 2; k < 7; ++k) worst = std::max(worst, cut.phi(std::ldexp(r, -j)) * cut.phi(std::ldexp(r, -k)));
    const double p = cut.phi(r);
    if (std::abs(p * p - p) > 0.05) not_idempotent = true;
  }
  CHECK(worst == 0.0);
  CHECK(not_idempotent);
}

TEST_CASE("band blocks telescope over dyadic blocks") {
  const BlockIndex band = BlockIndex::band(2.0, 8.0);
  for (int i = 0; i <= 3000; ++i) {
    const double r = 30.0 * i / 3000.0;
    const double sum = cut.phi(r / 2.0) + cut.phi(r / 4.0) + cut.phi(r / 8.0);
    CHECK(band.multiplier(cut, r) == doctest::Approx(sum).epsilon(1e-13));
  }
}

TEST_CASE("field blocks: constants, reconstruction, nesting") {
  Field one(g2, Layout::xv);
  for (auto& c : one.data()) c = 1.0;
  for (int k = 0; k < 4; ++k)
    CHECK(lp_norm(block_project(one, Group::x, BlockIndex::dyadic(std::ldexp(1.0, k)), cut), kInf) < 1e-14);
  CHECK(max_abs_diff(block_project(one, Group::v, BlockIndex::zero(), cut), one) < 1e-14);

  const Field f = random_field(g2, Layout::xv, 5);
  for (Group grp : {Group::x, Group::v}) {
    Field acc = block_project(f, grp, BlockIndex::zero(), cut);
    const int K = cut.max_block(g2);
    for (int k = 0; k <= K; ++k) acc += block_project(f, grp, BlockIndex::dyadic(std::ldexp(1.0, k)), cut);
    CHECK(relative_l2(acc, f) < 1e-13);

    const Field d4 = block_project(f, grp, BlockIndex::dyadic(4.0), cut);
    CHECK(relative_l2(block_project(d4, grp, BlockIndex::band(2.0, 8.0), cut), d4) < 1e-14);
    const Field d0 = block_project(f, grp, BlockIndex::zero(), cut);
    CHECK(relative_l2(block_project(d0, grp, BlockIndex::lowpass(2.0), cut), d0) < 1e-14);
    const Field far = block_project(d4, grp, BlockIndex::dyadic(16.0), cut);
    CHECK(lp_norm(far, 2.0) < 1e-14 * lp_norm(d4, 2.0));
  }
}

TEST_CASE("top block and flags") {
  // radial Nyquist 16 on this grid: the 2^4 annulus is the last one that touches it
  CHECK(cut.max_block(g1) == 4);
  BlockFlags fl = block_flags(g1, BlockIndex::dyadic(0.5), cut);
  CHECK(fl.below_lattice);
  fl = block_flags(g1, BlockIndex::dyadic(16.0), cut);
  CHECK(fl.truncated);
  CHECK_FALSE(fl.above_nyquist);
  const Field f = random_field(g1, Layout::x_only, 8);
  const Field z = block_project(f, Group::x, BlockIndex::dyadic(64.0), cut, &fl);
  CHECK(fl.above_nyquist);
  CHECK(z.is_zero());
  CHECK_FALSE(block_flags(g1, BlockIndex::dyadic(2.0), cut).any());
}

TEST_CASE("Bernstein: ratio one at r = p, lattice Cauchy-Schwarz bound at (2, inf)") {
  const Field f = random_field(g2, Layout::x_only, 3);
  for (int k = 1; k <= 3; ++k) {
    CHECK(bernstein_check(f, Group::x, k, 2.0, 2.0, cut).ratio == doctest::Approx(1.0).epsilon(1e-14));
    // sup |h| <= L^{-D} sum |h_k| <= sqrt(M / L^D) ||h||_2 with M lattice modes in the annulus
    const double d = std::ldexp(1.0, k);
    int M = 0;
    for (int i = 0; i < g2.n; ++i)
      for (int j = 0; j < g2.n; ++j) {
        const double r = std::hypot(node_freq(g2, i), node_freq(g2, j));
        M += cut.phi(r / d) != 0.0;
      }
    const auto rep = bernstein_check(f, Group::x, k, 2.0, kInf, cut);
    CHECK(rep.norm_p > 0.0);
    CHECK(rep.norm_p <= std::sqrt(M / (g2.period * g2.period)) * rep.norm_r * (1.0 + 1e-12));
  }
  CHECK_THROWS_AS(bernstein_check(f, Group::x, 2, 2.0, 1.0, cut), Error);
}

TEST_CASE("parameter errors") {
  CHECK_THROWS_AS(BlockIndex::dyadic(0.0), Error);
  CHECK_THROWS_AS(BlockIndex::band(4.0, 2.0), Error);
  CHECK_THROWS_AS(BlockIndex::lowpass(-1.0), Error);
  CHECK_THROWS_AS(DyadicCutoffs(0.0), Error);
  CHECK_THROWS_AS(DyadicCutoffs(0.25), Error);
}
