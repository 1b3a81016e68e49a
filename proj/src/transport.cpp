// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "vavg/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "vavg/besov.hpp"

namespace vavg {

namespace {

const cplx kI(0.0, 1.0);

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double double_factorial_odd(int m) {  // (2m+1)!!
  double r = 1.0;
  for (int k = 3; k <= 2 * m + 1; k += 2) r *= k;
  return r;
}

// y^{-m} j_m(y), even in y.
double reduced_sph_bessel(int m, double y) {
  y = std::abs(y);
  if (y < 2.0) {
    double term = 1.0 / double_factorial_odd(m), acc = term;
    for (int k = 1; k < 40; ++k) {
      term *= -y * y / (2.0 * k * (2.0 * m + 2.0 * k + 1.0));
      acc += term;
      if (std::abs(term) < 1e-18 * std::abs(acc)) break;
    }
    return acc;
  }
  return std::sph_bessel(unsigned(m), y) / std::pow(y, m);
}

}  // namespace

// ---- cutoff profile -----------------------------------------------------------

CutoffRho CutoffRho::dirac() {
  CutoffRho r;
  r.kind_ = Kind::dirac;
  r.s_rule_.nodes = {1.0};
  r.s_rule_.weights = {1.0};
  return r;
}

CutoffRho CutoffRho::smooth(int nodes, int power) {
  require(nodes >= 4, ErrorCode::parameter, "smooth cutoff needs at least 4 quadrature nodes");
  require(power >= 1 && power <= 12, ErrorCode::parameter, "smooth cutoff power must lie in [1, 12]");
  CutoffRho r;
  r.kind_ = Kind::smooth;
  r.power_ = power;
  auto q = gauss_legendre(nodes, 1.0, 2.0);
  double mass = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double s = q.nodes[i];
    q.weights[i] *= std::pow((s - 1.0) * (2.0 - s), power);
    mass += q.weights[i];
  }
  for (auto& w : q.weights) w /= mass;
  r.norm_ = 1.0 / mass;
  r.s_rule_ = q;
  for (int n = 0; n <= 4; ++n) {
    double m = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) m += q.weights[i] * std::pow(q.nodes[i], n);
    r.moments_[n] = m;
  }
  return r;
}

double CutoffRho::density(double s) const {
  if (kind_ == Kind::dirac || s <= 1.0 || s >= 2.0) return 0.0;
  return norm_ * std::pow((s - 1.0) * (2.0 - s), power_);
}

cplx CutoffRho::rho(double z) const {
  if (kind_ == Kind::dirac) return std::exp(-kI * z);
  // s = 3/2 + w/2 maps [1,2] to [-1,1]; the w integral is a spherical Bessel function.
  const double g = double_factorial_odd(power_) * reduced_sph_bessel(power_, 0.5 * z);
  return std::exp(-1.5 * kI * z) * g;
}

cplx CutoffRho::tau(double z) const {
  if (std::abs(z) < 1e-3) {
    return moments_[1] - kI * z * moments_[2] / 2.0 - z * z * moments_[3] / 6.0 + kI * z * z * z * moments_[4] / 24.0;
  }
  return (1.0 - rho(z)) / (kI * z);
}

// ---- transport and shifts ---------------------------------------------------------

Field apply_transport(const Field& f) {
  require(f.space() == physical, ErrorCode::usage, "apply_transport needs a physical field");
  return apply_phase_multiplier(f, [](std::span<const double> eta, std::span<const double> v) {
    return kI * dot(eta, v);
  });
}

TransportPair make_pair(const Field& f) { return {f, apply_transport(f), TransportPair::Provenance::g_computed_from_f}; }

double pair_residual(const TransportPair& pr) {
  Field g = apply_transport(pr.f);
  return relative_l2(g, pr.g);
}

Field duhamel_shift(const Field& f, double t) {
  require(f.space() == physical, ErrorCode::usage, "duhamel_shift needs a physical field");
  if (t == 0.0) return f;
  return apply_phase_multiplier(f, [t](std::span<const double> eta, std::span<const double> v) {
    return std::exp(-kI * (t * dot(eta, v)));
  });
}

Field shift_sum(const Field& f, const std::vector<double>& taus, const std::vector<double>& weights) {
  require(taus.size() == weights.size() && !taus.empty(), ErrorCode::parameter, "shift_sum needs matching nodes");
  return apply_phase_multiplier(f, [&](std::span<const double> eta, std::span<const double> v) {
    const double z = dot(eta, v);
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < taus.size(); ++i) acc += weights[i] * std::exp(-kI * (taus[i] * z));
    return acc;
  });
}

DuhamelReport duhamel_identity_check(const TransportPair& pr, double t, QuadRule rule, int nodes) {
  require(nodes >= 1, ErrorCode::parameter, "Duhamel check needs a nonempty quadrature");
  auto q = make_quadrature(rule, nodes, 0.0, t);
  Field rhs = duhamel_shift(pr.f, t);
  rhs += shift_sum(pr.g, q.nodes, q.weights);
  DuhamelReport rep;
  rep.nodes = int(q.size());
  const double nf = lp_norm(pr.f, 2.0);
  const double diff = lp_norm(pr.f - rhs, 2.0);
  rep.residual = nf > 0.0 ? diff / nf : diff;
  return rep;
}

TransferReport x_to_v_transfer_check(const Field& f, double t, const BlockIndex& block, const DyadicCutoffs& c) {
  require(t > 0.0, ErrorCode::parameter, "transfer check needs t > 0");
  TransferReport rep;
  BlockIndex vblock = block.tag == BlockIndex::Tag::zero ? BlockIndex::lowpass(t)
                      : block.tag == BlockIndex::Tag::dyadic ? BlockIndex::dyadic(t * block.d1)
                      : block.tag == BlockIndex::Tag::lowpass ? BlockIndex::lowpass(t * block.d1)
                                                              : BlockIndex::band(t * block.d1, t * block.d2);
  const GridSpec& g = f.grid();
  rep.flags = block_flags(g, vblock, c);
  if (rep.flags.below_lattice) {
    rep.skipped = true;
    return rep;
  }
  Field lhs = block_project(velocity_average(duhamel_shift(f, t)), Group::x, block, c);
  Field rhs = velocity_average(duhamel_shift(block_project(f, Group::v, vblock, c), t));
  rep.lhs_norm = lp_norm(lhs, 2.0);
  const double d = lp_norm(lhs - rhs, 2.0);
  rep.residual = rep.lhs_norm > 0.0 ? d / rep.lhs_norm : d;
  return rep;
}

// ---- interpolation operators ---------------------------------------------------------

Field apply_TA(const Field& f, double t, const CutoffRho& rho, Repr repr) {
  require(f.space() == physical, ErrorCode::usage, "T_A needs a physical field");
  if (repr == Repr::fourier)
    return apply_phase_multiplier(f, [&](std::span<const double> eta, std::span<const double> v) {
      return rho.rho(t * dot(eta, v));
    });
  std::vector<double> taus;
  for (double s : rho.s_rule().nodes) taus.push_back(s * t);
  return shift_sum(f, taus, rho.s_rule().weights);
}

Field apply_TB(const Field& g, double t, const CutoffRho& rho, Repr repr, int sigma_nodes) {
  require(g.space() == physical, ErrorCode::usage, "T_B needs a physical field");
  if (repr == Repr::fourier)
    return apply_phase_multiplier(g, [&](std::span<const double> eta, std::span<const double> v) {
      return rho.tau(t * dot(eta, v));
    });
  auto sig = gauss_legendre(sigma_nodes, 0.0, 1.0);
  std::vector<double> taus, ws;
  const auto& sr = rho.s_rule();
  for (std::size_t i = 0; i < sr.size(); ++i)
    for (std::size_t j = 0; j < sig.size(); ++j) {
      taus.push_back(sig.nodes[j] * sr.nodes[i] * t);
      ws.push_back(sig.weights[j] * sr.nodes[i] * sr.weights[i]);
    }
  return shift_sum(g, taus, ws);
}

namespace {

struct NodeSet {
  std::vector<double> taus;
  std::vector<double> weights;
};

// s nodes for the A operator.
NodeSet a_nodes(const DecompParams& p) {
  NodeSet ns;
  if (p.mode == QuadMode::gauss || p.rho.kind() == CutoffRho::Kind::dirac) {
    for (std::size_t i = 0; i < p.rho.s_rule().size(); ++i) {
      ns.taus.push_back(p.rho.s_rule().nodes[i] * p.t);
      ns.weights.push_back(p.rho.s_rule().weights[i]);
    }
    return ns;
  }
  // st integer: s = m / t for integers m strictly inside (t, 2t).
  double mass = 0.0;
  for (long m = long(std::floor(p.t)) + 1; m < 2.0 * p.t; ++m) {
    const double s = double(m) / p.t;
    const double w = p.rho.density(s) / p.t;
    if (w <= 0.0) continue;
    ns.taus.push_back(double(m));
    ns.weights.push_back(w);
    mass += w;
  }
  require(!ns.taus.empty(), ErrorCode::parameter, "lattice quadrature needs an integer inside (t, 2t)");
  for (auto& w : ns.weights) w /= mass;
  return ns;
}

// (sigma, s) nodes for the B operator, weights include the factor s.
NodeSet b_nodes(const DecompParams& p) {
  NodeSet a = a_nodes(p), ns;
  for (std::size_t i = 0; i < a.taus.size(); ++i) {
    const double st = a.taus[i];
    const double s = st / p.t;
    Quadrature sig;
    if (p.mode == QuadMode::lattice && p.rho.kind() == CutoffRho::Kind::smooth) {
      const int m = int(std::lround(st));
      sig = trapezoid_rule(m, 0.0, 1.0);  // sigma s t = j exactly
    } else {
      sig = gauss_legendre(p.sigma_nodes, 0.0, 1.0);
    }
    for (std::size_t j = 0; j < sig.size(); ++j) {
      ns.taus.push_back(sig.nodes[j] * st);
      ns.weights.push_back(sig.weights[j] * s * a.weights[i]);
    }
  }
  return ns;
}

// Block-restricted velocity average of a weighted sum of shifts, or of a
// velocity-dependent multiplier, evaluated only where the x block is nonzero.
template <class PerNode>
Field block_average(const Field& f, const BlockIndex& block, const DyadicCutoffs& c, PerNode&& mult) {
  require(f.layout() == Layout::xv && f.space() == physical, ErrorCode::usage, "needs a physical xv field");
  const GridSpec& g = f.grid();
  Field fx = transform(f, Group::x, Direction::forward);
  const std::size_t nx = fx.x_count(), nv = fx.v_count();
  const double cell = std::pow(g.spacing(), g.dim);
  std::vector<double> vc(nv * g.dim);
  for (std::size_t iv = 0; iv < nv; ++iv) group_coords(g, iv, {vc.data() + iv * g.dim, std::size_t(g.dim)});
  Field out(g, Layout::x_only);
  out.set_space(spectral_x);
  std::array<double, 2> eta{};
  for (std::size_t ix = 0; ix < nx; ++ix) {
    group_freqs(g, ix, {eta.data(), std::size_t(g.dim)});
    const double r = std::hypot(eta[0], g.dim == 2 ? eta[1] : 0.0);
    const double mb = block.multiplier(c, r);
    if (mb == 0.0) continue;
    cplx acc(0.0, 0.0);
    for (std::size_t iv = 0; iv < nv; ++iv) {
      const double z = dot({eta.data(), std::size_t(g.dim)}, {vc.data() + iv * g.dim, std::size_t(g.dim)});
      acc += mult(z) * fx.at(ix, iv);
    }
    out.data()[ix] = mb * cell * acc;
  }
  transform_inplace(out, Group::x, Direction::inverse);
  return out;
}

Field nodes_average(const Field& f, const BlockIndex& block, const DyadicCutoffs& c, const NodeSet& ns) {
  return block_average(f, block, c, [&](double z) {
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < ns.taus.size(); ++i) acc += ns.weights[i] * std::exp(-kI * (ns.taus[i] * z));
    return acc;
  });
}

double rel_gap(const Field& a, const Field& ref) {
  const double n = lp_norm(ref, 2.0);
  const double d = lp_norm(a - ref, 2.0);
  return n > 0.0 ? d / n : d;
}

}  // namespace

Field average_A(const Field& f, const DecompParams& params, const DyadicCutoffs& c) {
  return nodes_average(f, params.delta, c, a_nodes(params));
}

Field average_B(const Field& g, const DecompParams& params, const DyadicCutoffs& c) {
  return nodes_average(g, params.delta, c, b_nodes(params));
}

Field average_A_fourier(const Field& f, const BlockIndex& block, double t, const CutoffRho& rho,
                        const DyadicCutoffs& c) {
  return block_average(f, block, c, [&](double z) { return rho.rho(t * z); });
}

Field average_B_fourier(const Field& g, const BlockIndex& block, double t, const CutoffRho& rho,
                        const DyadicCutoffs& c) {
  return block_average(g, block, c, [&](double z) { return rho.tau(t * z); });
}

Decomposition dyadic_average_decomposition(const TransportPair& pr, const DecompParams& params,
                                           const DyadicCutoffs& c) {
  require(params.t > 0.0, ErrorCode::parameter, "decomposition needs t > 0");
  Decomposition d;
  const GridSpec& g = pr.f.grid();
  d.flags = block_flags(g, params.delta, c);
  if (d.flags.above_nyquist) {
    d.A = d.B = d.A_fourier = d.B_fourier = Field(g, Layout::x_only);
    return d;
  }
  Field lhs = block_project(velocity_average(pr.f), Group::x, params.delta, c);
  d.A = average_A(pr.f, params, c);
  d.B = average_B(pr.g, params, c);
  const double t = params.t;
  d.A_fourier = average_A_fourier(pr.f, params.delta, t, params.rho, c);
  d.B_fourier = average_B_fourier(pr.g, params.delta, t, params.rho, c);
  Field sum = d.A;
  sum += cplx(t, 0.0) * d.B;
  d.residual = rel_gap(sum, lhs);
  Field fsum = d.A_fourier;
  fsum += cplx(t, 0.0) * d.B_fourier;
  d.fourier_residual = rel_gap(fsum, lhs);
  d.a_repr_gap = rel_gap(d.A, d.A_fourier);
  d.b_repr_gap = rel_gap(d.B, d.B_fourier);
  return d;
}

double LocalizationReport::max_identity() const { return std::max({a_block, b_block, a_low, b_low}); }

LocalizationReport localization_check(const TransportPair& pr, double t, double delta, const CutoffRho& rho,
                                      QuadMode mode, const DyadicCutoffs& c, int sigma_nodes) {
  require(rho.kind() == CutoffRho::Kind::smooth, ErrorCode::parameter,
          "localization identities need a cutoff supported inside [1, 2]; dirac rejected");
  require(t > 0.0 && delta > 0.0, ErrorCode::parameter, "localization check needs t, delta > 0");
  DecompParams blk{t, BlockIndex::dyadic(delta), rho, sigma_nodes, mode};
  DecompParams low{t, BlockIndex::zero(), rho, sigma_nodes, mode};
  auto loc = [&](const Field& h, const BlockIndex& bx, const BlockIndex& bv) {
    return block_project(block_project(h, Group::x, bx, c), Group::v, bv, c);
  };
  const BlockIndex xband = BlockIndex::band(delta / 2.0, 2.0 * delta);
  LocalizationReport rep;
  Field a = average_A(pr.f, blk, c);
  rep.a_block = rel_gap(average_A(loc(pr.f, xband, BlockIndex::band(t * delta / 2.0, 4.0 * t * delta)), blk, c), a);
  rep.negative_control =
      rel_gap(average_A(loc(pr.f, xband, BlockIndex::band(4.0 * t * delta, 8.0 * t * delta)), blk, c), a);
  Field b = average_B(pr.g, blk, c);
  rep.b_block = rel_gap(average_B(loc(pr.g, xband, BlockIndex::lowpass(8.0 * t * delta)), blk, c), b);
  const BlockIndex s2 = BlockIndex::lowpass(2.0), s4t = BlockIndex::lowpass(4.0 * t);
  rep.a_low = rel_gap(average_A(loc(pr.f, s2, s4t), low, c), average_A(pr.f, low, c));
  rep.b_low = rel_gap(average_B(loc(pr.g, s2, s4t), low, c), average_B(pr.g, low, c));
  return rep;
}

// ---- dispersion ---------------------------------------------------------------------

double velocity_support_radius(const Field& h, double rel) {
  require(h.layout() == Layout::xv && h.space() == physical, ErrorCode::usage, "needs a physical xv field");
  const GridSpec& g = h.grid();
  std::vector<double> marg(h.v_count(), 0.0);
  for (std::size_t ix = 0; ix < h.x_count(); ++ix)
    for (std::size_t iv = 0; iv < h.v_count(); ++iv) marg[iv] += std::abs(h.at(ix, iv));
  const double mx = *std::max_element(marg.begin(), marg.end());
  double rad = 0.0;
  std::array<double, 2> v{};
  for (std::size_t iv = 0; iv < marg.size(); ++iv) {
    if (marg[iv] <= rel * mx) continue;
    group_coords(g, iv, {v.data(), std::size_t(g.dim)});
    rad = std::max(rad, std::hypot(v[0], g.dim == 2 ? v[1] : 0.0));
  }
  return rad;
}

DispersiveReport dispersive_estimate_check(const Field& h, double p, const std::vector<double>& ts) {
  require(p >= 1.0, ErrorCode::parameter, "dispersive check needs p >= 1");
  require(!ts.empty(), ErrorCode::parameter, "dispersive check needs a t sweep");
  DispersiveReport rep;
  const double vmax = velocity_support_radius(h);
  rep.t_window = vmax > 0.0 ? h.grid().period / (2.0 * vmax) : kInf;
  const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
  const double expo = h.grid().dim * (1.0 - ip);
  const double den = lebesgue_norm(h, NormKind{1.0, p, true});
  require(den > 0.0, ErrorCode::parameter, "dispersive check needs a nonzero field");
  std::vector<double> lx, ys;
  for (double t : ts) {
    require(t > 0.0 && t <= rep.t_window, ErrorCode::parameter,
            "t = " + std::to_string(t) + " lies outside the aliasing-safe window");
    const double num = lebesgue_norm(duhamel_shift(h, t), NormKind{p, 1.0, true});
    rep.ts.push_back(t);
    rep.ratios.push_back(num / den);
    rep.max_bound_excess = std::max(rep.max_bound_excess, num / den * std::pow(t, expo));
    lx.push_back(std::log2(t));
    ys.push_back(num / den);
  }
  if (ts.size() >= 2) {
    auto fit = fit_log2(lx, ys);
    rep.slope = fit.slope;
    rep.r2 = fit.r2;
  }
  return rep;
}

}  // namespace vavg
