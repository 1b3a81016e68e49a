// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "vavg/littlewood_paley.hpp"

#include <cmath>
#include <sstream>

#include "vavg/quadrature.hpp"

namespace vavg {

namespace {

double bump(double s) {
  if (s <= -1.0 || s >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

constexpr int kStepNodes = 64;

double bump_integral(double a, double b) {
  auto q = gauss_legendre(kStepNodes, a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) acc += q.weights[i] * bump(q.nodes[i]);
  return acc;
}

}  // namespace

DyadicCutoffs::DyadicCutoffs(double width) : width_(width) {
  require(width > 0.0 && width < 0.25, ErrorCode::parameter, "cutoff width must lie in (0, 1/4)");
  norm_ = bump_integral(-1.0, 1.0);
}

double DyadicCutoffs::smooth_step(double u) const {
  if (u <= -1.0) return 0.0;
  if (u >= 1.0) return 1.0;
  // Integrate from the nearer end so the step is odd-symmetric about 0.
  if (u <= 0.0) return bump_integral(-1.0, u) / norm_;
  return 1.0 - bump_integral(u, 1.0) / norm_;
}

double DyadicCutoffs::psi(double r) const {
  r = std::abs(r);
  if (r <= psi_inner()) return 1.0;
  if (r >= psi_outer()) return 0.0;
  return 1.0 - smooth_step((r - 0.75) / width_);
}

int DyadicCutoffs::max_block(const GridSpec& g) const {
  const double top = g.radial_nyquist();
  int k = 0;
  while (std::ldexp(phi_inner(), k + 1) < top) ++k;
  return k;
}

DyadicCutoffs build_cutoffs(double width) { return DyadicCutoffs(width); }

BlockIndex BlockIndex::dyadic(double delta) {
  require(delta > 0.0, ErrorCode::parameter, "dyadic block needs delta > 0");
  return {Tag::dyadic, delta, 0.0};
}

BlockIndex BlockIndex::band(double lo, double hi) {
  require(lo > 0.0 && lo < hi, ErrorCode::parameter, "band block needs 0 < lo < hi");
  return {Tag::band, lo, hi};
}

BlockIndex BlockIndex::lowpass(double delta) {
  require(delta > 0.0, ErrorCode::parameter, "low-pass block needs delta > 0");
  return {Tag::lowpass, delta, 0.0};
}

double BlockIndex::multiplier(const DyadicCutoffs& c, double r) const {
  switch (tag) {
    case Tag::zero: return c.psi(r);
    case Tag::dyadic: return c.phi(r / d1);
    case Tag::band: return c.psi(r / (2.0 * d2)) - c.psi(r / d1);
    case Tag::lowpass: return c.psi(r / d1);
  }
  return 0.0;
}

double BlockIndex::inner(const DyadicCutoffs& c) const {
  switch (tag) {
    case Tag::dyadic: return c.phi_inner() * d1;
    case Tag::band: return c.psi_inner() * d1;
    default: return 0.0;
  }
}

double BlockIndex::outer(const DyadicCutoffs& c) const {
  switch (tag) {
    case Tag::zero: return c.psi_outer();
    case Tag::dyadic: return c.phi_outer() * d1;
    case Tag::band: return 2.0 * c.psi_outer() * d2;
    case Tag::lowpass: return c.psi_outer() * d1;
  }
  return 0.0;
}

std::string BlockIndex::describe() const {
  std::ostringstream os;
  switch (tag) {
    case Tag::zero: os << "zero"; break;
    case Tag::dyadic: os << "dyadic(" << d1 << ")"; break;
    case Tag::band: os << "band(" << d1 << "," << d2 << ")"; break;
    case Tag::lowpass: os << "lowpass(" << d1 << ")"; break;
  }
  return os.str();
}

BlockFlags block_flags(const GridSpec& g, const BlockIndex& b, const DyadicCutoffs& c) {
  BlockFlags fl;
  const double step = g.lattice_step();
  if ((b.tag == BlockIndex::Tag::dyadic || b.tag == BlockIndex::Tag::lowpass) && b.d1 < step) fl.below_lattice = true;
  if (b.tag == BlockIndex::Tag::band && b.d1 < step) fl.below_lattice = true;
  if (b.inner(c) >= g.radial_nyquist()) fl.above_nyquist = true;
  if (!fl.above_nyquist && b.outer(c) > g.axis_nyquist()) fl.truncated = true;
  return fl;
}

Field block_project(const Field& f, Group group, const BlockIndex& block, const DyadicCutoffs& c, BlockFlags* flags) {
  const BlockFlags fl = block_flags(f.grid(), block, c);
  if (flags) *flags = fl;
  if (fl.above_nyquist) return f.zeros_like();
  return apply_multiplier(f, group, [&](std::span<const double> xi) {
    double r2 = 0.0;
    for (double v : xi) r2 += v * v;
    return cplx(block.multiplier(c, std::sqrt(r2)), 0.0);
  });
}

BernsteinReport bernstein_check(const Field& f, Group group, int k, double r, double p, const DyadicCutoffs& c) {
  require(p >= r && r >= 1.0, ErrorCode::parameter, "bernstein check needs 1 <= r <= p");
  Field blk = block_project(f, group, BlockIndex::dyadic(std::ldexp(1.0, k)), c);
  BernsteinReport rep;
  rep.norm_p = lp_norm(blk, p);
  rep.norm_r = lp_norm(blk, r);
  const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
  const double scale = std::pow(2.0, k * f.grid().dim * (1.0 / r - ip));
  rep.ratio = rep.norm_r > 0.0 ? rep.norm_p / (scale * rep.norm_r) : 0.0;
  return rep;
}

}  // namespace vavg
