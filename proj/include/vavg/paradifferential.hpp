// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <vector>

#include "vavg/besov.hpp"

namespace vavg {

// Low-pass paired with the block 2^k in the paraproducts.
//  shifted: psi(xi / 2^{k-2}) = Delta_0 + sum_{j <= k-3} Delta_{2^j}, which
//           tiles the double block sum with the remainder windows.
//  literal: psi(xi / 2^{k-3}); drops the pairs (k, k-3), so reconstruction
//           leaves a residual.
enum class BonyLowPass { shifted, literal };

struct BonyParts {
  Field T_f_phi;    // sum_{k >= 2} Delta_{2^k} f . S_k phi
  Field T_phi_f;    // sum_{k >= 2} Delta_{2^k} phi . S_k f
  Field remainder;  // near-diagonal pairs
  BonyLowPass mode = BonyLowPass::shifted;
  bool truncated = false;  // some input block touches the Nyquist frequency
  double reconstruction_residual = 0.0;  // || f phi - sum of parts || / || f phi ||
};

// Decomposition in v of f (xv or v-only) times phi (v-only).
BonyParts bony_decompose(const Field& f, const Field& phi, const DyadicCutoffs& c,
                         BonyLowPass mode = BonyLowPass::shifted);

struct SupportReport {
  double low_of_paraproduct = 0.0;  // max_j>=2 ||Delta_0[Delta_{2^j} f S_j phi]|| / ||Delta_{2^j} f S_j phi||
  double far_blocks = 0.0;          // same for Delta_{2^k}, |j - k| >= 3
  double control = 0.0;             // Delta_{2^j}[...] at k = j, expected nonzero
  int control_j = 4;
};

SupportReport support_localization_check(const Field& f, const Field& phi, const DyadicCutoffs& c,
                                         BonyLowPass mode = BonyLowPass::shifted, int control_j = 4);

struct ProductReport {
  std::vector<double> ratios;  // || f phi || / || f || per member, zero members skipped
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double spread = 0.0;  // max / min
  int skipped = 0;
};

ProductReport product_estimate_check(const std::vector<Field>& family, const Field& phi, const ChLSpec& spec,
                                     const DyadicCutoffs& c);

}  // namespace vavg
