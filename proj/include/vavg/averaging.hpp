// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vavg/besov.hpp"
#include "vavg/transport.hpp"

namespace vavg {

enum class TheoremId { P, P2, PH, P2H, CLASSICAL, MAIN, MAIN2, PROP_B011 };

const char* theorem_name(TheoremId id);
TheoremId theorem_from_name(const std::string& s);

// Exponent parameters of one theorem instance. Integrability exponents are
// stored as given (inf allowed); only the ones the theorem uses matter.
struct TheoremCase {
  TheoremId id = TheoremId::P;
  double alpha = 0.0, beta = 0.0, a = 0.0, b = 0.0;
  double p = 2.0, q = 2.0, r = 2.0;
  double r0 = 2.0, p0 = 2.0, q0 = 2.0, r1 = 2.0, p1 = 2.0, q1 = 2.0;
  int dim = 1;
  double epsilon = 0.1;  // loss used on critical branches
};

enum class Regime { subcritical, critical, saturated };
const char* regime_name(Regime r);

// Reciprocal exponents (1/p etc., 0 for infinity) in a generic scalar so the
// same formulas run in double and in exact rational arithmetic.
template <class T>
struct GainParams {
  T alpha{}, beta{}, a{}, b{};
  T ip{}, iq{}, ir{};
  T ir0{}, ip0{}, iq0{}, ir1{}, ip1{}, iq1{};
  int dim = 1;
};

template <class T>
struct GainFormula {
  T s{};
  Regime regime = Regime::subcritical;
  T theta{};   // MAIN2 interpolation order
  T ip_out{};  // MAIN2 output 1/p
};

// Threshold on beta separating the regimes.
template <class T>
T beta_threshold(TheoremId id, const GainParams<T>& g) {
  const T one(1), D(g.dim);
  switch (id) {
    case TheoremId::CLASSICAL: return T(1) / T(2);
    case TheoremId::MAIN: return g.ir - D * (g.ir - g.ip);
    case TheoremId::MAIN2: return g.ir1 - D * (g.ir1 - g.ip1);
    default: return one - D * (one - g.ip);
  }
}

template <class T>
Regime regime_of(TheoremId id, const GainParams<T>& g) {
  if (id == TheoremId::MAIN2 || id == TheoremId::PROP_B011) return Regime::subcritical;
  const T c = beta_threshold(id, g);
  if (g.beta < c) return Regime::subcritical;
  if (g.beta > c || g.iq == T(1)) return Regime::saturated;
  return Regime::critical;
}

template <class T>
GainFormula<T> gain_formula(TheoremId id, const GainParams<T>& g) {
  const T one(1), D(g.dim);
  const T E = D * (one - g.ip);
  GainFormula<T> out;
  out.regime = regime_of(id, g);
  const bool sub = out.regime == Regime::subcritical;
  switch (id) {
    case TheoremId::P:
    case TheoremId::PH:
      out.s = sub ? (g.alpha + E) / (one + g.alpha - g.beta) - E : one - E;
      break;
    case TheoremId::P2:
    case TheoremId::P2H:
      out.s = sub ? (one + g.b - g.a) * (g.alpha + E) / (one + g.alpha - g.beta) + g.a - E : one + g.b - E;
      break;
    case TheoremId::CLASSICAL:
      out.s = sub ? (one + g.b - g.a) * (g.alpha + T(1) / T(2)) / (one + g.alpha - g.beta) + g.a : one + g.b;
      break;
    case TheoremId::MAIN: {
      const T c = beta_threshold(id, g), drop = D * (g.ir - g.ip);
      out.s = sub ? (one + g.b - g.a) * (one + g.alpha - c) / (one + g.alpha - g.beta) + g.a - drop : one + g.b - drop;
      break;
    }
    case TheoremId::MAIN2: {
      const T X = g.alpha + one - g.ir0 + D * (g.ir0 - g.ip0);
      const T Y = -g.beta + g.ir1 - D * (g.ir1 - g.ip1);
      out.theta = X / (X + Y);
      out.s = (one - out.theta) * (g.a - D * (g.ir0 - g.ip0)) + out.theta * (g.b - D * (g.ir1 - g.ip1)) + out.theta;
      out.ip_out = (one - out.theta) * g.ip0 + out.theta * g.ip1;
      break;
    }
    case TheoremId::PROP_B011:
      out.s = T(0);
      break;
  }
  return out;
}

// The f and g exponents of the homogeneous product estimate.
template <class T>
std::pair<T, T> ph_exponents(const GainParams<T>& g) {
  const T one(1), E = T(g.dim) * (one - g.ip);
  return {(one - g.beta - E) / (one + g.alpha - g.beta), (g.alpha + E) / (one + g.alpha - g.beta)};
}

inline double recip(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }
GainParams<double> gain_params(const TheoremCase& c);

// Throws a parameter error naming the first violated hypothesis.
void validate_case(const TheoremCase& c);

struct Gain {
  double s = 0.0;
  double tested_s = 0.0;  // s minus epsilon on critical branches
  Regime regime = Regime::subcritical;
  double theta = 0.0;
  double p_out = 2.0;     // integrability of the left side
  double q_out = 2.0;     // summability of the left side
  bool homogeneous = false;
  std::string lhs_space, f_space, g_space;
};

Gain predicted_gain(const TheoremCase& c);

// t_k from the proofs; +inf when only the B term is used. lambda enters the
// homogeneous schedule.
double interpolation_schedule(const TheoremCase& c, int k, double lambda = 1.0);

struct VerifyOptions {
  int k_lo = 1;            // fit window over x blocks of the average
  int k_hi = 6;
  double slack = 0.2;
  double r2_min = 0.9;
  double rms_max = 0.05;   // accepted in place of r2 when the profile is flat
  double budget = 1e3;
};

struct EstimateReport {
  std::string case_name;
  std::string family;
  std::uint64_t seed = 0;
  Gain gain;
  BlockNormProfile lhs_profile;
  double lhs_norm = 0.0;
  double rhs_f = 0.0;
  double rhs_g = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  IndexFit fit;
  bool truncated = false;
  bool pass = false;
  std::vector<std::string> notes;
};

EstimateReport verify_estimate(const TransportPair& pr, const TheoremCase& c, const Field* phi, const Field* chi,
                               const DyadicCutoffs& cut, const VerifyOptions& opt);

struct BlockBoundReport {
  int k = 0;
  double t = 0.0;
  int j_k = 0;
  double a_norm = 0.0, a_rhs = 0.0, c_a = 0.0;
  double b_norm = 0.0, b_rhs = 0.0, c_b = 0.0;
};

// Measured constants of the dispersive block bounds at one (k, t). Uses the
// multiplier form of A and B with the given cutoff.
BlockBoundReport dyadic_block_bound_check(const TransportPair& pr, const TheoremCase& c, int k, double t,
                                          const CutoffRho& rho, const Field* phi, const DyadicCutoffs& cut);

struct SlopeReport {
  std::vector<double> xs;
  std::vector<double> values;
  double slope = 0.0;
  double r2 = 0.0;
};

// ||A_{2^k}^t f||_{L^p_x} against t for f = cos(2^k x) h(v) with
// |h^(xi)| ~ (1 v |xi|)^{-(alpha + D(1-1/p))}, D = 1.
SlopeReport a_bound_slope(double alpha, double p, int k, const std::vector<double>& ts, const GridSpec& g,
                          const DyadicCutoffs& cut);

struct StripReport {
  std::vector<double> lambdas;
  std::vector<double> norms;
  double slope = 0.0;
  double r2 = 0.0;
  double predicted = 0.0;
  std::vector<double> log_corrected;  // lambda * norm / log(1 + lambda)^{1/q}
  double log_spread = 0.0;            // max / min of log_corrected
};

struct StripGrid {
  int n = 48;
  double period = 2.0 * kPi;
  double chi_half_width = 2.5;  // chi is a smooth plateau on |v2| <= chi_half_width
  double chi_edge = 0.2;
  double rho_plateau = 0.7;     // rho^ is 1 on |z| <= rho_plateau, 0 beyond |z| = 1
};

// D = 2 strip profile chi(v2) rho(lambda v1) measured in B^{-alpha}_{2,q}(dv).
StripReport lambda_strip_decay(double alpha, double q, const std::vector<double>& lambdas, const StripGrid& sg,
                               const DyadicCutoffs& cut, int dim = 2);

}  // namespace vavg
