// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "vavg/littlewood_paley.hpp"

namespace vavg {

struct BesovSpec {
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
  bool homogeneous = false;
  int k_min = 0;  // homogeneous window, inclusive
  int k_max = 0;
};

struct MixedBesovSpec {
  double t = 0.0;  // x regularity
  double s = 0.0;  // v regularity
  double r = 2.0;  // x integrability (outer)
  double p = 2.0;  // v integrability (inner)
  double q = 2.0;
};

struct ChLSpec {
  double r = 1.0;
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
  bool tilde = true;  // blocks first, then the L^r_x L^p_v norm
};

struct ProfileEntry {
  int k = 0;
  double value = 0.0;
  bool truncated = false;
};

// Block norms by scale. `low` holds the Delta_0 block of inhomogeneous norms.
struct BlockNormProfile {
  std::optional<double> low;
  std::vector<ProfileEntry> entries;
  bool any_truncated() const;
};

void write_profile_csv(std::ostream& os, const BlockNormProfile& p);

struct BesovResult {
  double value = 0.0;
  BlockNormProfile profile;
};

// l^q norm of a weighted sequence.
double lq_sum(const std::vector<double>& terms, double q);

BesovResult besov_norm(const Field& f, Group group, const BesovSpec& spec, const DyadicCutoffs& c);

struct MixedResult {
  double value = 0.0;
  // block norms; row i over x blocks (0 = Delta_0, then 2^0, 2^1, ...), column j over v blocks
  std::vector<std::vector<double>> blocks;
};

MixedResult besov_norm_mixed(const Field& f, const MixedBesovSpec& spec, const DyadicCutoffs& c);

double chemin_lerner_norm(const Field& f, const ChLSpec& spec, const DyadicCutoffs& c);

struct IndexFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double rms = 0.0;  // residual RMS in log2 units; r2 is uninformative for flat profiles
  int points = 0;
  double index() const { return -slope; }
};

// Least squares of log2(value) against k over entries with k in [k_lo, k_hi]
// and value > 0. Needs at least four points.
IndexFit regularity_index_fit(const BlockNormProfile& profile, int k_lo, int k_hi);
IndexFit fit_log2(const std::vector<double>& xs, const std::vector<double>& ys);

// Scale blocks Delta_0, Delta_{2^0}, ..., Delta_{2^K} of one group.
std::vector<Field> inhomogeneous_blocks(const Field& f, Group group, const DyadicCutoffs& c,
                                        std::vector<bool>* truncated = nullptr);

}  // namespace vavg
