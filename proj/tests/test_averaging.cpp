// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include <boost/rational.hpp>
#include <cmath>

#include "doctest.h"
#include "vavg/averaging.hpp"
#include "vavg/families.hpp"

using namespace vavg;
using Q = boost::rational<long long>;

namespace {

const Q kAlphas[] = {Q(0), Q(1, 4), Q(1, 2), Q(1), Q(3, 2)};
const Q kBetas[] = {Q(-1, 2), Q(0), Q(1, 4), Q(1, 2), Q(3, 4)};

GainParams<Q> params(Q alpha, Q beta, Q a, Q b, Q ip, Q iq, Q ir, int dim) {
  GainParams<Q> g;
  g.alpha = alpha;
  g.beta = beta;
  g.a = a;
  g.b = b;
  g.ip = ip;
  g.iq = iq;
  g.ir = ir;
  g.dim = dim;
  return g;
}

TheoremCase make_case(TheoremId id, double alpha, double beta, double p, double q) {
  TheoremCase c;
  c.id = id;
  c.alpha = alpha;
  c.beta = beta;
  c.p = p;
  c.q = q;
  return c;
}

}  // namespace

TEST_CASE("names round trip") {
  for (TheoremId id : {TheoremId::P, TheoremId::P2, TheoremId::PH, TheoremId::P2H, TheoremId::CLASSICAL,
                       TheoremId::MAIN, TheoremId::MAIN2, TheoremId::PROP_B011})
    CHECK(theorem_from_name(theorem_name(id)) == id);
  CHECK_THROWS_AS(theorem_from_name("NOPE"), Error);
  CHECK(std::string(regime_name(Regime::critical)) == "critical");
}

TEST_CASE("general gain at r = p = 2 is the L2 gain, exactly") {
  int n = 0;
  for (Q alpha : kAlphas)
    for (Q beta : kBetas)
      for (Q a : {Q(0), Q(1, 3)})
        for (Q b : {Q(0), Q(-1, 2)}) {
          const auto g = params(alpha, beta, a, b, Q(1, 2), Q(1, 2), Q(1, 2), 1);
          const auto m = gain_formula(TheoremId::MAIN, g), c = gain_formula(TheoremId::CLASSICAL, g);
          CHECK(m.s == c.s);
          CHECK(m.regime == c.regime);
          ++n;
        }
  CHECK(n == 100);
}

TEST_CASE("general gain at r = 1 is the mixed L1 gain, exactly") {
  int n = 0;
  for (int dim : {1, 2})
    for (Q alpha : kAlphas)
      for (Q beta : kBetas)
        for (Q ip : {Q(1), Q(3, 4), Q(2, 3), Q(1, 2), Q(1, 4)}) {
          if (dim == 2 && ip < Q(2, 3)) continue;
          const auto g = params(alpha, beta, Q(1, 5), Q(-1, 3), ip, Q(1, 2), Q(1), dim);
          const auto m = gain_formula(TheoremId::MAIN, g), p = gain_formula(TheoremId::P2, g);
          CHECK(m.s == p.s);
          CHECK(m.regime == p.regime);
          ++n;
        }
  CHECK(n >= 100);
}

TEST_CASE("L1 gain: subcritical closed form, continuity at the threshold, saturation") {
  for (Q alpha : kAlphas)
    for (Q ip : {Q(1), Q(3, 4), Q(1, 2)}) {
      const Q E = Q(1) - ip;
      const Q c = Q(1) - E;
      for (Q beta : kBetas) {
        const auto g = params(alpha, beta, Q(0), Q(0), ip, Q(1, 2), Q(1), 1);
        const auto f = gain_formula(TheoremId::P, g);
        if (beta < c) {
          CHECK(f.regime == Regime::subcritical);
          CHECK(f.s == (alpha + E) / (Q(1) + alpha - beta) - E);
        } else {
          CHECK(f.regime == (beta == c ? Regime::critical : Regime::saturated));
          CHECK(f.s == Q(1) - E);
        }
      }
      // the subcritical expression evaluated at beta = threshold meets the saturated value
      if (Q(1) + alpha - c != Q(0)) CHECK((alpha + E) / (Q(1) + alpha - c) - E == Q(1) - E);
    }
  // q = 1 at the threshold saturates rather than losing epsilon
  CHECK(regime_of(TheoremId::P, params(Q(1), Q(1), Q(0), Q(0), Q(1), Q(1), Q(1), 1)) == Regime::saturated);
}

TEST_CASE("homogeneous interpolation exponents sum to one") {
  for (Q alpha : kAlphas)
    for (Q beta : {Q(-1, 2), Q(0), Q(1, 4)})
      for (Q ip : {Q(1), Q(3, 4)}) {
        const auto g = params(alpha, beta, Q(0), Q(0), ip, Q(1, 2), Q(1), 1);
        const auto [e1, e2] = ph_exponents(g);
        CHECK(e1 + e2 == Q(1));
        CHECK(gain_formula(TheoremId::PH, g).s == e2 - (Q(1) - ip));
      }
}

TEST_CASE("interpolation theorem at the symmetric point") {
  GainParams<Q> g;
  g.alpha = Q(1, 2);
  g.beta = Q(1, 2);
  g.ir0 = g.ip0 = g.iq0 = Q(1);
  g.ir1 = g.ip1 = g.iq1 = Q(1);
  const auto f = gain_formula(TheoremId::MAIN2, g);
  CHECK(f.theta == Q(1, 2));
  CHECK(f.s == Q(1, 2));
  CHECK(f.ip_out == Q(1));
}

TEST_CASE("L2 gain at the origin and the all-2 interpolation point") {
  const auto l2 = gain_formula(TheoremId::CLASSICAL, params(0, 0, 0, 0, Q(1, 2), Q(1, 2), Q(1, 2), 1));
  CHECK(l2.s == Q(1, 2));
  CHECK(l2.regime == Regime::subcritical);

  GainParams<Q> g;
  g.ir0 = g.ip0 = g.iq0 = Q(1, 2);
  g.ir1 = g.ip1 = g.iq1 = Q(1, 2);
  const auto f = gain_formula(TheoremId::MAIN2, g);
  CHECK(f.theta == Q(1, 2));
  CHECK(f.s == Q(1, 2));
  CHECK(f.ip_out == Q(1, 2));
}

TEST_CASE("predicted gains in double precision") {
  TheoremCase c = make_case(TheoremId::CLASSICAL, 1.0, 0.0, 2.0, 2.0);
  Gain gn = predicted_gain(c);
  CHECK(gn.s == doctest::Approx(0.75));
  CHECK(gn.tested_s == gn.s);
  CHECK(gn.regime == Regime::subcritical);
  CHECK(gn.p_out == 2.0);

  c.beta = 0.5;
  gn = predicted_gain(c);
  CHECK(gn.regime == Regime::critical);
  CHECK(gn.s == doctest::Approx(1.0));
  CHECK(gn.tested_s == doctest::Approx(1.0 - c.epsilon));

  c.beta = 0.7;
  gn = predicted_gain(c);
  CHECK(gn.regime == Regime::saturated);
  CHECK(gn.s == doctest::Approx(1.0));

  // the endpoint case: no gain, no loss
  gn = predicted_gain(make_case(TheoremId::P, 0.0, 0.0, 1.0, 1.0));
  CHECK(gn.s == 0.0);
  CHECK(gn.regime == Regime::subcritical);
  gn = predicted_gain(make_case(TheoremId::PH, 1.0, 0.0, 1.0, 2.0));
  CHECK(gn.homogeneous);
  CHECK(gn.s == doctest::Approx(0.5));
}

TEST_CASE("case validation") {
  auto msg = [](const TheoremCase& c) {
    try {
      validate_case(c);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::parameter);
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(msg(make_case(TheoremId::P, 0.0, 0.0, 0.5, 2.0)) == "exponent p must be >= 1");
  CHECK(msg(make_case(TheoremId::P, 0.0, 0.0, 1.0, 1.0)).empty());
  CHECK(msg(make_case(TheoremId::P, 0.0, 0.0, 1.0, 2.0)).rfind("case violates alpha", 0) == 0);
  CHECK(msg(make_case(TheoremId::P2, 0.0, 0.0, 1.0, 1.0)).rfind("case violates alpha", 0) == 0);
  CHECK(msg(make_case(TheoremId::CLASSICAL, -0.6, 0.0, 2.0, 2.0)) == "case violates alpha > -1/2");
  CHECK(msg(make_case(TheoremId::PH, 1.0, 0.5, 3.0, 2.0)) == "case violates beta < 1 - D(1-1/p)");
  TheoremCase m = make_case(TheoremId::MAIN, 1.0, 0.0, 1.0, 2.0);
  m.r = 2.0;
  CHECK(msg(m) == "case violates r <= p");
  TheoremCase pr = make_case(TheoremId::PROP_B011, 0.0, 1.0, 2.0, 2.0);
  CHECK(msg(pr) == "case violates PROP schedule requires beta < 1");
  TheoremCase d = make_case(TheoremId::P, 0.0, 0.0, 2.0, 2.0);
  d.dim = 3;
  CHECK(msg(d) == "dimension must be 1 or 2");
}

TEST_CASE("interpolation schedules") {
  TheoremCase c = make_case(TheoremId::PROP_B011, 0.0, 0.5, 2.0, 2.0);
  CHECK(interpolation_schedule(c, 3) == doctest::Approx(8.0));
  CHECK(interpolation_schedule(c, 0) == 1.0);

  c = make_case(TheoremId::CLASSICAL, 1.0, 0.0, 2.0, 2.0);
  for (int k = 0; k < 8; ++k) {
    const double t = interpolation_schedule(c, k);
    CHECK(t == doctest::Approx(std::pow(2.0, -k / 2.0)));
    CHECK(t >= std::ldexp(1.0, -k));
  }
  c.beta = 0.7;
  CHECK(std::isinf(interpolation_schedule(c, 2)));

  c = make_case(TheoremId::PH, 1.0, 0.0, 1.0, 2.0);
  CHECK(interpolation_schedule(c, 2, 4.0) == doctest::Approx(std::pow(4.0, 0.5) * std::pow(2.0, -1.0)));

  c = make_case(TheoremId::MAIN2, 0.5, 0.5, 1.0, 1.0);
  CHECK_THROWS_AS(interpolation_schedule(c, 1), Error);
  CHECK_THROWS_AS(interpolation_schedule(make_case(TheoremId::P, 0.0, 0.0, 1.0, 1.0), -1), Error);
}

TEST_CASE("estimate verification on a small synthetic pair") {
  const GridSpec g{1, 128, 4.0 * kPi};
  const DyadicCutoffs cut(0.125);
  const Field f = synthesize_besov_field(SyntheticSpec{1.0, 1.0, 1.0, 1.0, 3}, g);
  const TransportPair pr = make_pair(f);
  const Field phi = sample_function(
      [](std::span<const double>, std::span<const double> v) { return cplx(std::exp(-v[0] * v[0]), 0.0); }, g,
      Layout::v_only);
  VerifyOptions opt;
  opt.k_hi = 4;
  const auto c = make_case(TheoremId::CLASSICAL, 1.0, 0.0, 2.0, 2.0);
  const auto rep = verify_estimate(pr, c, &phi, nullptr, cut, opt);
  CHECK(std::isfinite(rep.ratio));
  CHECK(rep.ratio > 0.0);
  CHECK(rep.rhs == doctest::Approx(rep.rhs_f + rep.rhs_g));
  CHECK(rep.fit.points >= 4);
  CHECK_THROWS_AS(verify_estimate(pr, c, nullptr, nullptr, cut, opt), Error);
  TheoremCase c2 = c;
  c2.dim = 2;
  CHECK_THROWS_AS(verify_estimate(pr, c2, &phi, nullptr, cut, opt), Error);
}

TEST_CASE("block bound and strip argument guards") {
  const GridSpec g{1, 64, 2.0 * kPi};
  const DyadicCutoffs cut(0.125);
  const TransportPair pr = make_pair(synthesize_besov_field(SyntheticSpec{1.0, 1.0, 1.0, 1.0, 1}, g));
  const auto c = make_case(TheoremId::P, 0.5, 0.0, 2.0, 2.0);
  CHECK_THROWS_AS(dyadic_block_bound_check(pr, c, 3, 0.1, CutoffRho::smooth(), nullptr, cut), Error);
  CHECK_NOTHROW(dyadic_block_bound_check(pr, c, 3, 0.5, CutoffRho::smooth(), nullptr, cut));
  CHECK_THROWS_AS(lambda_strip_decay(0.0, 2.0, {2.0, 4.0}, StripGrid{}, cut, 1), Error);
}
