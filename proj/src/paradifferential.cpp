// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "vavg/paradifferential.hpp"

#include <algorithm>
#include <cmath>

namespace vavg {

namespace {

// Blocks indexed by i + 1 for i = -1 (Delta_0), 0, 1, ... up to the grid.
struct Blocks {
  std::vector<Field> b;
  bool truncated = false;
  int top() const { return int(b.size()) - 2; }  // largest dyadic index
  const Field& at(int i) const { return b[std::size_t(i + 1)]; }
};

Blocks v_blocks(const Field& f, const DyadicCutoffs& c) {
  Blocks out;
  std::vector<bool> tr;
  out.b = inhomogeneous_blocks(f, Group::v, c, &tr);
  // Only blocks carrying more than roundoff relative to the field count as cut.
  const double floor = 1e-12 * lp_norm(f, 2.0);
  for (std::size_t i = 0; i < tr.size(); ++i)
    if (tr[i] && lp_norm(out.b[i], 2.0) > floor) out.truncated = true;
  return out;
}

Field sum_range(const Blocks& bl, int lo, int hi, const Field& like) {
  Field acc = like.zeros_like();
  for (int j = std::max(lo, -1); j <= std::min(hi, bl.top()); ++j) acc += bl.at(j);
  return acc;
}

Field product(const Field& a, const Field& b) {
  if (a.layout() == b.layout()) return broadcast_multiply(a, b);
  return a.layout() == Layout::xv ? broadcast_multiply(a, b) : broadcast_multiply(b, a);
}

Field low_pass(const Field& g, const Blocks& bl, int k, BonyLowPass mode, const DyadicCutoffs& c) {
  if (mode == BonyLowPass::shifted) return sum_range(bl, -1, k - 3, g);
  return block_project(g, Group::v, BlockIndex::lowpass(std::ldexp(1.0, k - 3)), c);
}

double rel(const Field& part, const Field& whole) {
  const double n = lp_norm(whole, 2.0);
  return n > 0.0 ? lp_norm(part, 2.0) / n : lp_norm(part, 2.0);
}

}  // namespace

BonyParts bony_decompose(const Field& f, const Field& phi, const DyadicCutoffs& c, BonyLowPass mode) {
  require(phi.layout() == Layout::v_only && phi.grid() == f.grid(), ErrorCode::usage,
          "Bony decomposition needs a v-only phi on the grid of f");
  require(f.has_v() && f.space() == physical && phi.space() == physical, ErrorCode::usage,
          "Bony decomposition needs physical fields with a v group");
  const Blocks fb = v_blocks(f, c), pb = v_blocks(phi, c);
  const int K = fb.top();
  BonyParts parts;
  parts.mode = mode;
  parts.truncated = fb.truncated || pb.truncated;
  parts.T_f_phi = f.zeros_like();
  parts.T_phi_f = f.zeros_like();
  parts.remainder = f.zeros_like();
  for (int k = 2; k <= K; ++k) {
    parts.T_f_phi += product(fb.at(k), low_pass(phi, pb, k, mode, c));
    parts.T_phi_f += product(low_pass(f, fb, k, mode, c), pb.at(k));
  }
  parts.remainder += product(fb.at(-1), sum_range(pb, -1, 1, phi));
  parts.remainder += product(fb.at(0), sum_range(pb, -1, 2, phi));
  if (K >= 1) parts.remainder += product(fb.at(1), sum_range(pb, -1, 3, phi));
  for (int k = 2; k <= K; ++k) parts.remainder += product(fb.at(k), sum_range(pb, k - 2, k + 2, phi));
  Field whole = product(f, phi);
  Field diff = whole - parts.T_f_phi - parts.T_phi_f - parts.remainder;
  parts.reconstruction_residual = rel(diff, whole);
  return parts;
}

SupportReport support_localization_check(const Field& f, const Field& phi, const DyadicCutoffs& c, BonyLowPass mode,
                                         int control_j) {
  const Blocks fb = v_blocks(f, c), pb = v_blocks(phi, c);
  const int K = fb.top();
  require(control_j >= 2 && control_j <= K, ErrorCode::parameter, "control block outside the grid window");
  SupportReport rep;
  rep.control_j = control_j;
  for (int j = 2; j <= K; ++j) {
    Field term = product(fb.at(j), low_pass(phi, pb, j, mode, c));
    if (lp_norm(term, 2.0) == 0.0) continue;
    rep.low_of_paraproduct =
        std::max(rep.low_of_paraproduct, rel(block_project(term, Group::v, BlockIndex::zero(), c), term));
    for (int k = 0; k <= K; ++k) {
      Field proj = block_project(term, Group::v, BlockIndex::dyadic(std::ldexp(1.0, k)), c);
      if (std::abs(j - k) >= 3) rep.far_blocks = std::max(rep.far_blocks, rel(proj, term));
      if (j == control_j && k == j) rep.control = rel(proj, term);
    }
  }
  return rep;
}

ProductReport product_estimate_check(const std::vector<Field>& family, const Field& phi, const ChLSpec& spec,
                                     const DyadicCutoffs& c) {
  ProductReport rep;
  for (const Field& f : family) {
    const double nf = chemin_lerner_norm(f, spec, c);
    if (nf == 0.0) {
      ++rep.skipped;
      continue;
    }
    rep.ratios.push_back(chemin_lerner_norm(broadcast_multiply(f, phi), spec, c) / nf);
  }
  if (!rep.ratios.empty()) {
    const auto [mn, mx] = std::minmax_element(rep.ratios.begin(), rep.ratios.end());
    rep.min_ratio = *mn;
    rep.max_ratio = *mx;
    rep.spread = *mx / *mn;
  }
  return rep;
}

}  // namespace vavg
