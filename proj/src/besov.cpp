// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "vavg/besov.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace vavg {

bool BlockNormProfile::any_truncated() const {
  return std::any_of(entries.begin(), entries.end(), [](const ProfileEntry& e) { return e.truncated; });
}

void write_profile_csv(std::ostream& os, const BlockNormProfile& p) {
  char buf[64];
  os << "k,block_norm,truncated_flag\n";
  if (p.low) {
    std::snprintf(buf, sizeof buf, "%.17g", *p.low);
    os << "low," << buf << ",0\n";
  }
  for (const auto& e : p.entries) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    os << e.k << "," << buf << "," << (e.truncated ? 1 : 0) << "\n";
  }
}

double lq_sum(const std::vector<double>& terms, double q) {
  require(q >= 1.0, ErrorCode::parameter, "summability exponent q must be >= 1");
  if (std::isinf(q)) {
    double m = 0.0;
    for (double t : terms) m = std::max(m, std::abs(t));
    return m;
  }
  double acc = 0.0;
  for (double t : terms) acc += std::pow(std::abs(t), q);
  return std::pow(acc, 1.0 / q);
}

namespace {

std::vector<double> radial_table(const GridSpec& g) {
  std::vector<double> r(g.group_count());
  std::array<double, 2> xi{};
  for (std::size_t i = 0; i < r.size(); ++i) {
    group_freqs(g, i, {xi.data(), std::size_t(g.dim)});
    r[i] = std::hypot(xi[0], g.dim == 2 ? xi[1] : 0.0);
  }
  return r;
}

std::vector<double> block_table(const std::vector<double>& radii, const BlockIndex& b, const DyadicCutoffs& c) {
  std::vector<double> m(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) m[i] = b.multiplier(c, radii[i]);
  return m;
}

// Multiplies a spectral field by a per-group table and returns it to physical space.
Field project_spectral(const Field& spec, bool xg, const std::vector<double>& tab) {
  Field out = spec;
  for (std::size_t ix = 0; ix < out.x_count(); ++ix)
    for (std::size_t iv = 0; iv < out.v_count(); ++iv) out.at(ix, iv) *= tab[xg ? ix : iv];
  transform_inplace(out, xg ? Group::x : Group::v, Direction::inverse);
  return out;
}

}  // namespace

std::vector<Field> inhomogeneous_blocks(const Field& f, Group group, const DyadicCutoffs& c,
                                        std::vector<bool>* truncated) {
  require(f.space() == physical, ErrorCode::usage, "block decomposition needs a physical field");
  const bool xg = group == Group::x;
  Field spec = transform(f, group, Direction::forward);
  auto radii = radial_table(f.grid());
  const int K = c.max_block(f.grid());
  std::vector<Field> out;
  if (truncated) truncated->clear();
  for (int k = -1; k <= K; ++k) {
    BlockIndex b = k < 0 ? BlockIndex::zero() : BlockIndex::dyadic(std::ldexp(1.0, k));
    out.push_back(project_spectral(spec, xg, block_table(radii, b, c)));
    if (truncated) truncated->push_back(block_flags(f.grid(), b, c).truncated);
  }
  return out;
}

BesovResult besov_norm(const Field& f, Group group, const BesovSpec& spec, const DyadicCutoffs& c) {
  require(spec.p >= 1.0 && spec.q >= 1.0, ErrorCode::parameter, "Besov exponents p, q must be >= 1");
  require(group != Group::both, ErrorCode::usage, "Besov norm acts on one group");
  require(group == Group::x ? f.has_x() : f.has_v(), ErrorCode::usage, "field has no such variable group");
  if (spec.homogeneous)
    require(spec.k_min <= spec.k_max, ErrorCode::parameter, "homogeneous window is empty");
  BesovResult res;
  if (f.is_zero()) return res;
  std::vector<double> terms;
  if (!spec.homogeneous) {
    std::vector<bool> trunc;
    auto blocks = inhomogeneous_blocks(f, group, c, &trunc);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const double nb = lp_norm(blocks[i], spec.p);
      if (i == 0) {
        res.profile.low = nb;
        terms.push_back(nb);
      } else {
        const int k = int(i) - 1;
        res.profile.entries.push_back({k, nb, trunc[i]});
        terms.push_back(std::pow(2.0, k * spec.s) * nb);
      }
    }
  } else {
    const bool xg = group == Group::x;
    Field sp = transform(f, group, Direction::forward);
    auto radii = radial_table(f.grid());
    for (int k = spec.k_min; k <= spec.k_max; ++k) {
      BlockIndex b = BlockIndex::dyadic(std::ldexp(1.0, k));
      BlockFlags fl = block_flags(f.grid(), b, c);
      double nb = 0.0;
      if (!fl.above_nyquist) nb = lp_norm(project_spectral(sp, xg, block_table(radii, b, c)), spec.p);
      res.profile.entries.push_back({k, nb, fl.any()});
      terms.push_back(std::pow(2.0, k * spec.s) * nb);
    }
  }
  res.value = lq_sum(terms, spec.q);
  return res;
}

MixedResult besov_norm_mixed(const Field& f, const MixedBesovSpec& spec, const DyadicCutoffs& c) {
  require(f.layout() == Layout::xv, ErrorCode::usage, "mixed Besov norm needs an xv field");
  require(f.space() == physical, ErrorCode::usage, "mixed Besov norm needs a physical field");
  require(spec.r >= 1.0 && spec.p >= 1.0 && spec.q >= 1.0, ErrorCode::parameter, "mixed Besov exponents must be >= 1");
  MixedResult res;
  if (f.is_zero()) return res;
  const GridSpec& g = f.grid();
  const int K = c.max_block(g);
  auto radii = radial_table(g);
  std::vector<std::vector<double>> tabs;
  for (int k = -1; k <= K; ++k)
    tabs.push_back(block_table(radii, k < 0 ? BlockIndex::zero() : BlockIndex::dyadic(std::ldexp(1.0, k)), c));
  Field spec_f = transform(f, Group::both, Direction::forward);
  const NormKind nk{spec.r, spec.p, true};
  std::vector<double> terms;
  res.blocks.assign(tabs.size(), std::vector<double>(tabs.size(), 0.0));
  for (std::size_t i = 0; i < tabs.size(); ++i) {
    Field xi = spec_f;
    for (std::size_t ix = 0; ix < xi.x_count(); ++ix)
      for (std::size_t iv = 0; iv < xi.v_count(); ++iv) xi.at(ix, iv) *= tabs[i][ix];
    transform_inplace(xi, Group::x, Direction::inverse);
    const double wi = i == 0 ? 1.0 : std::pow(2.0, (double(i) - 1.0) * spec.t);
    for (std::size_t j = 0; j < tabs.size(); ++j) {
      Field blk = project_spectral(xi, false, tabs[j]);
      const double nb = lebesgue_norm(blk, nk);
      res.blocks[i][j] = nb;
      const double wj = j == 0 ? 1.0 : std::pow(2.0, (double(j) - 1.0) * spec.s);
      terms.push_back(wi * wj * nb);
    }
  }
  res.value = lq_sum(terms, spec.q);
  return res;
}

double chemin_lerner_norm(const Field& f, const ChLSpec& spec, const DyadicCutoffs& c) {
  require(f.layout() == Layout::xv, ErrorCode::usage, "Chemin-Lerner norm needs an xv field");
  require(spec.r >= 1.0 && spec.p >= 1.0 && spec.q >= 1.0, ErrorCode::parameter, "exponents must be >= 1");
  if (f.is_zero()) return 0.0;
  std::vector<bool> trunc;
  auto blocks = inhomogeneous_blocks(f, Group::v, c, &trunc);
  auto weight = [&](std::size_t j) { return j == 0 ? 1.0 : std::pow(2.0, (double(j) - 1.0) * spec.s); };
  if (spec.tilde) {
    std::vector<double> terms;
    for (std::size_t j = 0; j < blocks.size(); ++j)
      terms.push_back(weight(j) * lebesgue_norm(blocks[j], NormKind{spec.r, spec.p, true}));
    return lq_sum(terms, spec.q);
  }
  // Besov norm in v at every x node, then L^r over x.
  const GridSpec& g = f.grid();
  const double cell = std::pow(g.spacing(), g.dim);
  Field per_x(g, Layout::x_only);
  for (std::size_t ix = 0; ix < f.x_count(); ++ix) {
    std::vector<double> terms;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      double acc = 0.0;
      for (std::size_t iv = 0; iv < f.v_count(); ++iv) {
        const double a = std::abs(blocks[j].at(ix, iv));
        acc = std::isinf(spec.p) ? std::max(acc, a) : acc + std::pow(a, spec.p);
      }
      const double nb = std::isinf(spec.p) ? acc : std::pow(acc * cell, 1.0 / spec.p);
      terms.push_back(weight(j) * nb);
    }
    per_x.data()[ix] = lq_sum(terms, spec.q);
  }
  return lp_norm(per_x, spec.r);
}

IndexFit fit_log2(const std::vector<double>& xs, const std::vector<double>& ys) {
  require(xs.size() == ys.size(), ErrorCode::fit, "fit inputs differ in length");
  const int n = int(xs.size());
  require(n >= 2, ErrorCode::fit, "fit needs at least two points");
  std::vector<double> ly(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) ly[i] = std::log2(ys[i]);
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += xs[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  require(sxx > 0.0, ErrorCode::fit, "fit abscissae are all equal");
  IndexFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;  // from the residuals; syy - slope * sxy cancels badly on exact power laws
  for (int i = 0; i < n; ++i) {
    const double e = ly[i] - (fit.intercept + fit.slope * xs[i]);
    sse += e * e;
  }
  fit.r2 = syy > 1e-300 ? std::max(0.0, 1.0 - sse / syy) : 1.0;
  fit.rms = std::sqrt(std::max(0.0, sse) / n);
  return fit;
}

IndexFit regularity_index_fit(const BlockNormProfile& profile, int k_lo, int k_hi) {
  double top = 0.0;
  for (const auto& e : profile.entries)
    if (e.k >= k_lo && e.k <= k_hi) top = std::max(top, e.value);
  // Blocks at rounding level relative to the window maximum count as empty.
  std::vector<double> xs, ys;
  for (const auto& e : profile.entries)
    if (e.k >= k_lo && e.k <= k_hi && e.value > 1e-12 * top) {
      xs.push_back(e.k);
      ys.push_back(e.value);
    }
  require(xs.size() >= 4, ErrorCode::fit, "index fit needs at least four nonzero blocks in the window");
  return fit_log2(xs, ys);
}

}  // namespace vavg
