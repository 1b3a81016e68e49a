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

#include "vavg/littlewood_paley.hpp"
#include "vavg/quadrature.hpp"

namespace vavg {

// Profile used by the interpolation operators. rho(z) = int exp(-i s z) w(s) ds
// where w is either a unit mass at s = 1 or c (s-1)^m (2-s)^m on [1, 2].
class CutoffRho {
 public:
  enum class Kind { dirac, smooth };

  static CutoffRho dirac();
  static CutoffRho smooth(int nodes = 64, int power = 4);

  Kind kind() const { return kind_; }
  int power() const { return power_; }
  // Nodes and normalized weights of w on [1, 2] (a single node for dirac).
  const Quadrature& s_rule() const { return s_rule_; }
  double density(double s) const;  // w(s), zero for dirac
  double moment(int n) const { return moments_[n]; }  // int s^n w(s) ds, n <= 4

  cplx rho(double z) const;
  // (1 - rho(z)) / (i z), Taylor series near 0.
  cplx tau(double z) const;
  std::string name() const { return kind_ == Kind::dirac ? "dirac" : "smooth"; }

 private:
  Kind kind_ = Kind::dirac;
  int power_ = 0;
  double norm_ = 1.0;  // c
  Quadrature s_rule_;
  double moments_[5] = {1, 1, 1, 1, 1};
};

struct TransportPair {
  enum class Provenance { g_computed_from_f, independent };
  Field f;
  Field g;
  Provenance provenance = Provenance::g_computed_from_f;
};

// g = v . grad_x f computed spectrally in x.
Field apply_transport(const Field& f);
TransportPair make_pair(const Field& f);
double pair_residual(const TransportPair& pr);

// f(x - t v, v): x spectrum times exp(-i t eta.v).
Field duhamel_shift(const Field& f, double t);
// sum_i w_i f(x - tau_i v, v) in one spectral pass.
Field shift_sum(const Field& f, const std::vector<double>& taus, const std::vector<double>& weights);

struct DuhamelReport {
  double residual = 0.0;
  int nodes = 0;
};

DuhamelReport duhamel_identity_check(const TransportPair& pr, double t, QuadRule rule, int nodes);

struct TransferReport {
  double residual = 0.0;
  double lhs_norm = 0.0;
  bool skipped = false;
  BlockFlags flags;
};

// Delta_d^x int f(x - t v, v) dv against int (Delta_{t d}^v f)(x - t v, v) dv.
// The zero block pairs with the low-pass S_t^v.
TransferReport x_to_v_transfer_check(const Field& f, double t, const BlockIndex& block, const DyadicCutoffs& c);

enum class Repr { physical, fourier };

// Quadrature used by the physical forms: Gauss-Legendre on the support of w,
// or lattice-aligned nodes where s t and sigma s t are integers.
enum class QuadMode { gauss, lattice };

struct DecompParams {
  double t = 1.0;
  BlockIndex delta = BlockIndex::zero();
  CutoffRho rho = CutoffRho::dirac();
  int sigma_nodes = 64;
  QuadMode mode = QuadMode::gauss;
};

Field apply_TA(const Field& f, double t, const CutoffRho& rho, Repr repr);
Field apply_TB(const Field& g, double t, const CutoffRho& rho, Repr repr, int sigma_nodes = 64);

struct Decomposition {
  Field A;          // physical form
  Field B;
  Field A_fourier;  // multiplier form
  Field B_fourier;
  double residual = 0.0;      // || D int f - A - t B || / || D int f ||
  double fourier_residual = 0.0;
  double a_repr_gap = 0.0;    // relative gap between the two A forms
  double b_repr_gap = 0.0;
  BlockFlags flags;
};

Decomposition dyadic_average_decomposition(const TransportPair& pr, const DecompParams& params,
                                           const DyadicCutoffs& c);

// A and B velocity averages alone, physical form, for a given block and quadrature.
Field average_A(const Field& f, const DecompParams& params, const DyadicCutoffs& c);
Field average_B(const Field& g, const DecompParams& params, const DyadicCutoffs& c);
// Multiplier forms rho(t eta.v) and tau(t eta.v) of the same averages.
Field average_A_fourier(const Field& f, const BlockIndex& block, double t, const CutoffRho& rho,
                        const DyadicCutoffs& c);
Field average_B_fourier(const Field& g, const BlockIndex& block, double t, const CutoffRho& rho,
                        const DyadicCutoffs& c);

struct LocalizationReport {
  double a_block = 0.0;  // A_d f vs A_d(band_x band_v f)
  double b_block = 0.0;  // B_d g vs B_d(band_x S_{8td} g)
  double a_low = 0.0;    // A_0 f vs A_0(S_2 S_{4t} f)
  double b_low = 0.0;
  double negative_control = 0.0;  // wrong v band
  double max_identity() const;
};

LocalizationReport localization_check(const TransportPair& pr, double t, double delta, const CutoffRho& rho,
                                      QuadMode mode, const DyadicCutoffs& c, int sigma_nodes = 64);

struct DispersiveReport {
  std::vector<double> ts;
  std::vector<double> ratios;  // ||h(x - t v, v)||_{L^p_x L^1_v} / ||h||_{L^1_x L^p_v}
  double slope = 0.0;
  double r2 = 0.0;
  double t_window = 0.0;       // largest admissible t
  double max_bound_excess = 0.0;  // max of ratio * t^{D(1-1/p)}
};

// Radius beyond which the v-marginal of |h| falls under rel * its maximum.
double velocity_support_radius(const Field& h, double rel = 1e-8);

DispersiveReport dispersive_estimate_check(const Field& h, double p, const std::vector<double>& ts);

}  // namespace vavg
