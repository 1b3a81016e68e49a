// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <string>

#include "vavg/field.hpp"

namespace vavg {

// Radial low-pass psi and annulus phi(r) = psi(r/2) - psi(r). psi is the
// indicator of r <= 3/4 smoothed by a bump of half-width w, so psi = 1 on
// [0, 3/4 - w] and psi = 0 beyond 3/4 + w.
class DyadicCutoffs {
 public:
  explicit DyadicCutoffs(double width = 0.125);

  double width() const { return width_; }
  double psi(double r) const;
  double phi(double r) const { return psi(0.5 * r) - psi(r); }

  double psi_inner() const { return 0.75 - width_; }  // psi == 1 below
  double psi_outer() const { return 0.75 + width_; }  // psi == 0 beyond
  double phi_inner() const { return psi_inner(); }
  double phi_outer() const { return 2.0 * psi_outer(); }

  // Largest k whose annulus 2^k can touch the group lattice.
  int max_block(const GridSpec& g) const;

 private:
  double width_;
  double norm_;  // integral of the bump over [-1, 1]
  double smooth_step(double u) const;
};

DyadicCutoffs build_cutoffs(double width);

// Which frequency localization to apply.
struct BlockIndex {
  enum class Tag { zero, dyadic, band, lowpass };
  Tag tag = Tag::zero;
  double d1 = 0.0;
  double d2 = 0.0;

  static BlockIndex zero() { return {}; }
  static BlockIndex dyadic(double delta);
  static BlockIndex band(double lo, double hi);
  static BlockIndex lowpass(double delta);

  double multiplier(const DyadicCutoffs& c, double r) const;
  // Radial support [inner, outer] of the multiplier (inner 0 for low-pass forms).
  double inner(const DyadicCutoffs& c) const;
  double outer(const DyadicCutoffs& c) const;
  std::string describe() const;
};

struct BlockFlags {
  bool below_lattice = false;  // scale finer than one lattice step
  bool above_nyquist = false;  // multiplier vanishes on the whole lattice
  bool truncated = false;      // support extends past the axis Nyquist frequency
  bool any() const { return below_lattice || above_nyquist || truncated; }
};

BlockFlags block_flags(const GridSpec& g, const BlockIndex& b, const DyadicCutoffs& c);

Field block_project(const Field& f, Group group, const BlockIndex& block, const DyadicCutoffs& c,
                    BlockFlags* flags = nullptr);

struct BernsteinReport {
  double ratio = 0.0;
  double norm_p = 0.0;
  double norm_r = 0.0;
};

// ||D_k f||_p / (2^{kD(1/r-1/p)} ||D_k f||_r) on one group, norms over all axes.
BernsteinReport bernstein_check(const Field& f, Group group, int k, double r, double p, const DyadicCutoffs& c);

}  // namespace vavg
