// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <cstdint>
#include <vector>

#include "vavg/transport.hpp"

namespace vavg {

// Keeps only lattice modes with every axis frequency <= fraction * axis Nyquist,
// in every group the field carries.
Field band_limit(const Field& f, double fraction);

// Counter-based seed splitting: splitmix64 of master advanced by stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

struct SyntheticSpec {
  double x_index = 0.0;  // dyadic x blocks decay like 2^{-i x_index}
  double v_index = 0.0;  // dyadic v blocks decay like 2^{-j v_index}
  double amplitude = 1.0;
  double envelope = 0.0;  // Gaussian v envelope width, 0 for none
  std::uint64_t seed = 0;
};

// Real field with Gaussian spectral coefficients of standard deviation
// (1 v |eta|)^{-x_index - D/2} (1 v |xi|)^{-v_index - D/2}.
Field synthesize_besov_field(const SyntheticSpec& spec, const GridSpec& g);
// v-only variant used by the product checks.
Field synthesize_velocity_field(double v_index, double amplitude, double envelope, std::uint64_t seed,
                                const GridSpec& g);

// Sum over k of 2^{-k decay} cos(2^k x + phase_k) exp(-(2^{k theta} v)^2 / (2 sigma^2)), D = 1.
// Blocks are sharp in both groups, so the average has exactly the index the
// estimates predict when decay and theta are matched to the exponents.
struct ConcentratedSpec {
  double decay = 0.0;
  double theta = 1.0;
  int k_min = 1;
  int k_max = 5;
  double sigma = 2.0;
  std::uint64_t seed = 0;
};

TransportPair concentrated_family(const ConcentratedSpec& spec, const GridSpec& g);

struct OscillatoryFields {
  Field f, g, h;
  double identity_residual = 0.0;  // || v.grad_x f - (d_v g - h) || / || v.grad_x f ||
};

// f_n = n phi(n x) cos(n v) W(v) and its companions, D = 1. W is a smooth
// plateau on |v| <= 2 that keeps the v factor periodic.
OscillatoryFields oscillatory_counterexample(int n, const GridSpec& g);
double counterexample_profile(double y);
double counterexample_profile_derivative(double y);

struct OscillatoryDiagnostics {
  int n = 0;
  double average_l1 = 0.0;     // || int f_n 1_{|v| <= pi/3} dv ||_{L^1_x}
  double smooth_average_l1 = 0.0;  // same with a smooth cutoff in v
  double concentration = 0.0;  // mass of |f_n| on |x| <= 1/n, |v| <= pi/2
  double local_l1 = 0.0;       // mass of |f_n| on |x| <= 1, |v| <= pi/2
};

OscillatoryDiagnostics oscillatory_diagnostics(const OscillatoryFields& of, int n);

struct ScalingLedger {
  int R = 1;
  double lhs = 0.0;  // || int f_R phi dv ||_{L^p_x}
  double f_norm = 0.0;  // || f_R ||_{L^{r0}_x L^{p0}_v}
  double g_norm = 0.0;  // || g_R ||_{L^{r1}_x L^{p1}_v}
};

struct ScalingExponents {
  std::vector<ScalingLedger> rows;
  double lhs_slope = 0.0, f_slope = 0.0, g_slope = 0.0, ratio_slope = 0.0;
};

// f_R(x, v) = f(x / R, v) by spectral re-indexing in x, D = 1.
Field scale_x(const Field& f, int R);
TransportPair scaling_family(const TransportPair& base, int R);

struct ScalingNorms {
  double p = 2.0, r0 = 1.0, p0 = 2.0, r1 = 1.0, p1 = 2.0;
};

ScalingExponents scaling_sweep(const TransportPair& base, const Field& phi, const std::vector<int>& Rs,
                               const ScalingNorms& nm);

// Luxemburg norm for h(z) = (1 + z) log(1 + z) - z over the region.
double orlicz_llogl_norm(const Field& f, const Box* region = nullptr);
double llogl_young(double z);
double llogl_young_inverse(double y);

}  // namespace vavg
