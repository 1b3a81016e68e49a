// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "vavg/averaging.hpp"

#include <array>
#include <cstdio>

namespace vavg {

namespace {

struct NameEntry {
  TheoremId id;
  const char* name;
};

constexpr std::array<NameEntry, 8> kNames{{{TheoremId::P, "P"},
                                           {TheoremId::P2, "P2"},
                                           {TheoremId::PH, "PH"},
                                           {TheoremId::P2H, "P2H"},
                                           {TheoremId::CLASSICAL, "CLASSICAL"},
                                           {TheoremId::MAIN, "MAIN"},
                                           {TheoremId::MAIN2, "MAIN2"},
                                           {TheoremId::PROP_B011, "PROP_B011"}}};

std::string fmt_num(double x) {
  if (std::isinf(x)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void check_exponent(double x, const char* what) {
  require(x >= 1.0, ErrorCode::parameter, std::string("exponent ") + what + " must be >= 1");
}

bool uses_mixed(TheoremId id) {
  return id == TheoremId::P2 || id == TheoremId::P2H || id == TheoremId::CLASSICAL || id == TheoremId::MAIN ||
         id == TheoremId::MAIN2;
}

// Smallest k whose annulus reaches the nonzero lattice, for homogeneous windows.
int lowest_block(const GridSpec& g, const DyadicCutoffs& cut) {
  return int(std::ceil(std::log2(g.lattice_step() / cut.phi_outer())));
}

// Homogeneous Chemin-Lerner norm over the v-blocks of the window, tilde order.
double homogeneous_chl(const Field& f, double r, double s, double p, double q, int k_lo, int k_hi,
                       const DyadicCutoffs& cut) {
  std::vector<double> terms;
  for (int k = k_lo; k <= k_hi; ++k) {
    const BlockIndex b = BlockIndex::dyadic(std::ldexp(1.0, k));
    if (block_flags(f.grid(), b, cut).above_nyquist) continue;
    Field blk = block_project(f, Group::v, b, cut);
    terms.push_back(std::pow(2.0, k * s) * lebesgue_norm(blk, NormKind{r, p, true}));
  }
  return lq_sum(terms, q);
}

double joint_low_norm(const Field& f, double r, double p, const DyadicCutoffs& cut) {
  Field low = block_project(block_project(f, Group::x, BlockIndex::zero(), cut), Group::v, BlockIndex::zero(), cut);
  return lebesgue_norm(low, NormKind{r, p, true});
}

}  // namespace

const char* theorem_name(TheoremId id) {
  for (const auto& e : kNames)
    if (e.id == id) return e.name;
  return "?";
}

TheoremId theorem_from_name(const std::string& s) {
  for (const auto& e : kNames)
    if (s == e.name) return e.id;
  fail(ErrorCode::parameter, "unknown theorem id '" + s + "'");
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::subcritical: return "subcritical";
    case Regime::critical: return "critical";
    case Regime::saturated: return "saturated";
  }
  return "?";
}

GainParams<double> gain_params(const TheoremCase& c) {
  GainParams<double> g;
  g.alpha = c.alpha;
  g.beta = c.beta;
  g.a = c.a;
  g.b = c.b;
  g.ip = recip(c.p);
  g.iq = recip(c.q);
  g.ir = recip(c.r);
  g.ir0 = recip(c.r0);
  g.ip0 = recip(c.p0);
  g.iq0 = recip(c.q0);
  g.ir1 = recip(c.r1);
  g.ip1 = recip(c.p1);
  g.iq1 = recip(c.q1);
  g.dim = c.dim;
  return g;
}

void validate_case(const TheoremCase& c) {
  require(c.dim == 1 || c.dim == 2, ErrorCode::parameter, "dimension must be 1 or 2");
  require(c.epsilon > 0.0, ErrorCode::parameter, "critical loss epsilon must be positive");
  const double D = c.dim;
  const double E = D * (1.0 - recip(c.p));
  const double tol = 1e-12;
  auto need = [](bool ok, const std::string& what) { require(ok, ErrorCode::parameter, "case violates " + what); };
  switch (c.id) {
    case TheoremId::P:
    case TheoremId::P2:
      check_exponent(c.p, "p");
      check_exponent(c.q, "q");
      need(E < 1.0, "D(1-1/p) < 1");
      // p = q = 1, alpha = 0 is the endpoint the L^1 B^0_{1,1} estimate covers.
      need(c.alpha > -E || (c.id == TheoremId::P && c.p == 1.0 && c.q == 1.0 && c.alpha == 0.0),
           "alpha > -D(1-1/p)");
      if (c.id == TheoremId::P2) need(c.b >= c.a - 1.0, "b >= a - 1");
      break;
    case TheoremId::PH:
    case TheoremId::P2H:
      check_exponent(c.p, "p");
      check_exponent(c.q, "q");
      need(c.alpha > -E, "alpha > -D(1-1/p)");
      if (c.id == TheoremId::PH) {
        need(c.beta < 1.0 - E, "beta < 1 - D(1-1/p)");
      } else {
        need(c.b >= c.a - 1.0, "b >= a - 1");
        need(c.beta < 1.0 - E || (std::abs(c.beta + E - 1.0) < tol && c.q == 1.0),
             "beta < 1 - D(1-1/p), or equality with q = 1");
      }
      break;
    case TheoremId::CLASSICAL:
      check_exponent(c.q, "q");
      need(c.alpha > -0.5, "alpha > -1/2");
      need(c.b >= c.a - 1.0, "b >= a - 1");
      break;
    case TheoremId::MAIN: {
      check_exponent(c.p, "p");
      check_exponent(c.q, "q");
      check_exponent(c.r, "r");
      need(c.r <= c.p, "r <= p");
      need(!std::isinf(c.q), "q < inf");
      const double ir = recip(c.r), low = ir - 1.0 - D * (ir - recip(c.p));
      need(low > -ir, "1/r - 1 - D(1/r - 1/p) > -1/r");
      need(c.alpha > low, "alpha > 1/r - 1 - D(1/r - 1/p)");
      need(c.b >= c.a - 1.0, "b >= a - 1");
      break;
    }
    case TheoremId::MAIN2: {
      for (auto [x, n] : {std::pair{c.r0, "r0"}, {c.p0, "p0"}, {c.q0, "q0"}, {c.r1, "r1"}, {c.p1, "p1"}, {c.q1, "q1"}})
        check_exponent(x, n);
      const double ir0 = recip(c.r0), ip0 = recip(c.p0), ir1 = recip(c.r1), ip1 = recip(c.p1);
      need(c.r0 <= c.p0 && ip0 >= 1.0 - ir0 - tol, "r0 <= p0 <= r0'");
      need(c.r1 <= c.p1 && ip1 >= 1.0 - ir1 - tol, "r1 <= p1 <= r1'");
      need(!std::isinf(c.q0) && !std::isinf(c.q1), "q0, q1 < inf");
      need(c.alpha > ir0 - 1.0 - D * (ir0 - ip0), "alpha > 1/r0 - 1 - D(1/r0 - 1/p0)");
      need(c.beta < ir1 - D * (ir1 - ip1), "beta < 1/r1 - D(1/r1 - 1/p1)");
      need(2.0 * ir1 - 1.0 - D * (ir1 - ip1) > 0.0 || (c.p1 == 2.0 && c.r1 == 2.0),
           "2/r1 - 1 - D(1/r1 - 1/p1) > 0 unless p1 = r1 = 2");
      const auto gf = gain_formula(TheoremId::MAIN2, gain_params(c));
      need(gf.theta > 0.0 && gf.theta < 1.0, "theta in (0, 1)");
      const double th = gf.theta;
      need(std::abs((1.0 - th) * ip0 + th * ip1 - ((1.0 - th) * recip(c.q0) + th * recip(c.q1))) < 1e-9,
           "(1-theta)/p0 + theta/p1 = (1-theta)/q0 + theta/q1");
      break;
    }
    case TheoremId::PROP_B011:
      need(c.beta < 1.0, "PROP schedule requires beta < 1");
      break;
  }
}

Gain predicted_gain(const TheoremCase& c) {
  validate_case(c);
  const auto gp = gain_params(c);
  const auto gf = gain_formula(c.id, gp);
  Gain g;
  g.s = gf.s;
  g.regime = gf.regime;
  g.theta = gf.theta;
  g.tested_s = gf.regime == Regime::critical ? gf.s - c.epsilon : gf.s;
  g.p_out = c.p;
  g.q_out = c.q;
  const std::string a = fmt_num(c.a), al = fmt_num(c.alpha), b = fmt_num(c.b), be = fmt_num(c.beta);
  const std::string p = fmt_num(c.p), q = fmt_num(c.q), r = fmt_num(c.r);
  switch (c.id) {
    case TheoremId::P:
      if (gf.regime == Regime::saturated) g.q_out = kInf;
      g.f_space = gf.regime == Regime::saturated ? "L^1_x L^" + p + "_v (joint low block)"
                                                 : "L~^1_x B^" + al + "_{" + p + "," + q + "}(v)";
      g.g_space = "L~^1_x B^" + be + "_{" + p + "," + q + "}(v)";
      break;
    case TheoremId::PH:
      g.homogeneous = true;
      g.f_space = "L~^1_x Bh^" + al + "_{" + p + "," + q + "}(v)";
      g.g_space = "L~^1_x Bh^" + be + "_{" + p + "," + q + "}(v)";
      break;
    case TheoremId::P2:
    case TheoremId::P2H:
      g.homogeneous = c.id == TheoremId::P2H;
      g.f_space = "B^{" + a + "," + al + "}_{1," + p + "," + q + "}";
      g.g_space = "B^{" + b + "," + be + "}_{1," + p + "," + q + "}";
      break;
    case TheoremId::CLASSICAL:
      g.p_out = 2.0;
      g.f_space = "B^{" + a + "," + al + "}_{2,2," + q + "}";
      g.g_space = "B^{" + b + "," + be + "}_{2,2," + q + "}";
      break;
    case TheoremId::MAIN:
      g.f_space = "B^{" + a + "," + al + "}_{" + r + "," + p + "," + q + "}";
      g.g_space = "B^{" + b + "," + be + "}_{" + r + "," + p + "," + q + "}";
      break;
    case TheoremId::MAIN2:
      g.p_out = 1.0 / gf.ip_out;
      g.q_out = g.p_out;
      g.f_space = "B^{" + a + "," + al + "}_{" + fmt_num(c.r0) + "," + fmt_num(c.p0) + "," + fmt_num(c.q0) + "}";
      g.g_space = "B^{" + b + "," + be + "}_{" + fmt_num(c.r1) + "," + fmt_num(c.p1) + "," + fmt_num(c.q1) + "}";
      break;
    case TheoremId::PROP_B011:
      g.p_out = 1.0;
      g.q_out = 1.0;
      g.f_space = "L^1_x B^0_{1,1}(v)";
      g.g_space = "L^1_x B^" + be + "_{1,1}(v)";
      break;
  }
  g.lhs_space = std::string(g.homogeneous ? "Bh^" : "B^") + fmt_num(g.tested_s) + "_{" + fmt_num(g.p_out) + "," +
                fmt_num(g.q_out) + "}(x)";
  return g;
}

double interpolation_schedule(const TheoremCase& c, int k, double lambda) {
  require(k >= 0, ErrorCode::parameter, "schedule scale k must be >= 0");
  if (c.id == TheoremId::PROP_B011) {
    require(c.beta < 1.0, ErrorCode::parameter, "PROP schedule requires beta < 1");
    return std::pow(2.0, k * c.beta / (1.0 - c.beta));
  }
  require(c.id != TheoremId::MAIN2, ErrorCode::parameter, "MAIN2 has no interpolation schedule");
  validate_case(c);
  const auto gp = gain_params(c);
  const double a = uses_mixed(c.id) ? c.a : 0.0, b = uses_mixed(c.id) ? c.b : 0.0;
  if (c.id == TheoremId::PH || c.id == TheoremId::P2H) {
    require(lambda > 0.0, ErrorCode::parameter, "schedule lambda must be positive");
    const double den = 1.0 + c.alpha - c.beta;
    return std::pow(lambda, 1.0 / den) * std::pow(2.0, -k * ((c.alpha - c.beta) + (a - b)) / den);
  }
  if (regime_of(c.id, gp) == Regime::saturated) return kInf;
  const double gamma = std::min(c.beta, beta_threshold(c.id, gp));
  const double den = 1.0 + c.alpha - gamma;
  const double t = std::pow(2.0, -k * ((c.alpha - gamma) + (a - b)) / den);
  require(t >= std::ldexp(1.0, -k) * (1.0 - 1e-12), ErrorCode::numeric, "schedule fell below 2^-k");
  return t;
}

EstimateReport verify_estimate(const TransportPair& pr, const TheoremCase& c, const Field* phi, const Field* chi,
                               const DyadicCutoffs& cut, const VerifyOptions& opt) {
  require(pr.f.layout() == Layout::xv && pr.f.grid() == pr.g.grid(), ErrorCode::usage,
          "verification needs an xv pair on one grid");
  require(pr.f.grid().dim == c.dim, ErrorCode::parameter, "case dimension differs from the grid");
  EstimateReport rep;
  rep.case_name = theorem_name(c.id);
  rep.gain = predicted_gain(c);
  const Gain& gn = rep.gain;
  const bool needs_phi = c.id == TheoremId::CLASSICAL || c.id == TheoremId::MAIN || c.id == TheoremId::MAIN2;
  require(!needs_phi || phi, ErrorCode::parameter, std::string(rep.case_name) + " requires a velocity cutoff");
  if (c.id == TheoremId::MAIN2)
    require(chi || gn.p_out >= c.r0, ErrorCode::parameter, "MAIN2 with p < r0 requires a spatial cutoff");

  Field avg = velocity_average(pr.f, phi);
  if (chi && c.id == TheoremId::MAIN2) avg = broadcast_multiply(avg, *chi);

  const GridSpec& g = pr.f.grid();
  const int K = cut.max_block(g);
  BesovSpec lhs{gn.tested_s, gn.p_out, gn.q_out, gn.homogeneous, 0, K};
  if (gn.homogeneous) lhs.k_min = lowest_block(g, cut);
  auto lres = besov_norm(avg, Group::x, lhs, cut);
  rep.lhs_norm = lres.value;
  rep.lhs_profile = lres.profile;

  const double p = c.p, q = c.q;
  switch (c.id) {
    case TheoremId::P:
      if (gn.regime == Regime::saturated) {
        rep.rhs_f = joint_low_norm(pr.f, 1.0, p, cut);
        rep.rhs_g = lebesgue_norm(pr.g, NormKind{1.0, p, true});
        rep.notes.push_back("Delta_0^{x,v} read as joint low block");
      } else {
        rep.rhs_f = chemin_lerner_norm(pr.f, ChLSpec{1.0, c.alpha, p, q, true}, cut);
        rep.rhs_g = chemin_lerner_norm(pr.g, ChLSpec{1.0, c.beta, p, q, true}, cut);
      }
      rep.rhs = rep.rhs_f + rep.rhs_g;
      break;
    case TheoremId::PH: {
      const int lo = lowest_block(g, cut);
      rep.rhs_f = homogeneous_chl(pr.f, 1.0, c.alpha, p, q, lo, K, cut);
      rep.rhs_g = homogeneous_chl(pr.g, 1.0, c.beta, p, q, lo, K, cut);
      const auto [ef, eg] = ph_exponents(gain_params(c));
      rep.rhs = std::pow(rep.rhs_f, ef) * std::pow(rep.rhs_g, eg);
      rep.notes.push_back("homogeneous sums over the resolvable window");
      break;
    }
    case TheoremId::P2:
    case TheoremId::P2H:
    case TheoremId::CLASSICAL:
    case TheoremId::MAIN: {
      const double r = c.id == TheoremId::CLASSICAL ? 2.0 : c.id == TheoremId::MAIN ? c.r : 1.0;
      const double pv = c.id == TheoremId::CLASSICAL ? 2.0 : p;
      if (gn.regime == Regime::saturated && c.id != TheoremId::P2H) {
        Field low = block_project(block_project(pr.f, Group::x, BlockIndex::zero(), cut), Group::v,
                                  BlockIndex::zero(), cut);
        rep.rhs_f = besov_norm_mixed(low, MixedBesovSpec{c.a, c.alpha, r, pv, q}, cut).value;
        rep.notes.push_back("Delta_0^{x,v} read as joint low block");
      } else {
        rep.rhs_f = besov_norm_mixed(pr.f, MixedBesovSpec{c.a, c.alpha, r, pv, q}, cut).value;
      }
      rep.rhs_g = besov_norm_mixed(pr.g, MixedBesovSpec{c.b, c.beta, r, pv, q}, cut).value;
      rep.rhs = rep.rhs_f + rep.rhs_g;
      if (c.id == TheoremId::P2H) rep.notes.push_back("mixed norms taken inhomogeneous on the grid");
      break;
    }
    case TheoremId::MAIN2:
      rep.rhs_f = besov_norm_mixed(pr.f, MixedBesovSpec{c.a, c.alpha, c.r0, c.p0, c.q0}, cut).value;
      rep.rhs_g = besov_norm_mixed(pr.g, MixedBesovSpec{c.b, c.beta, c.r1, c.p1, c.q1}, cut).value;
      rep.rhs = rep.rhs_f + rep.rhs_g;
      break;
    case TheoremId::PROP_B011:
      rep.rhs_f = chemin_lerner_norm(pr.f, ChLSpec{1.0, 0.0, 1.0, 1.0, false}, cut);
      rep.rhs_g = chemin_lerner_norm(pr.g, ChLSpec{1.0, c.beta, 1.0, 1.0, false}, cut);
      rep.rhs = rep.rhs_f + rep.rhs_g;
      break;
  }
  if (gn.regime == Regime::critical) rep.notes.push_back("critical branch tested at s - epsilon");
  if (c.id == TheoremId::P && c.alpha == 0.0 && c.p == 1.0)
    rep.notes.push_back("endpoint alpha = 0, p = q = 1 covered by the L^1 B^0_{1,1} estimate");

  bool high_zero = true;
  for (const auto& e : rep.lhs_profile.entries) {
    if (e.value > 1e-14 * std::max(1.0, rep.lhs_norm)) high_zero = false;
    if (e.k >= opt.k_lo && e.k <= opt.k_hi && e.truncated) rep.truncated = true;
  }
  if (high_zero) {
    rep.ratio = rep.rhs > 0.0 ? rep.lhs_norm / rep.rhs : 0.0;
    rep.pass = rep.ratio <= opt.budget;
    rep.notes.push_back("average has no high-frequency content");
    return rep;
  }
  rep.ratio = rep.rhs > 0.0 ? rep.lhs_norm / rep.rhs : kInf;
  try {
    rep.fit = regularity_index_fit(rep.lhs_profile, opt.k_lo, std::min(opt.k_hi, K));
  } catch (const Error& e) {
    rep.notes.push_back(e.what());
    rep.pass = false;
    return rep;
  }
  const bool fit_ok = rep.fit.r2 >= opt.r2_min || rep.fit.rms <= opt.rms_max;
  rep.pass = rep.ratio <= opt.budget && rep.fit.index() >= gn.tested_s - opt.slack && fit_ok;
  return rep;
}

BlockBoundReport dyadic_block_bound_check(const TransportPair& pr, const TheoremCase& c, int k, double t,
                                          const CutoffRho& rho, const Field* phi, const DyadicCutoffs& cut) {
  require(k >= 0, ErrorCode::parameter, "block index k must be >= 0");
  require(t >= std::ldexp(1.0, -k) * (1.0 - 1e-12), ErrorCode::parameter, "block bound needs t >= 2^-k");
  const double D = pr.f.grid().dim, p = c.p, beta = c.beta;
  const double E = D * (1.0 - recip(p));
  BlockBoundReport rep;
  rep.k = k;
  rep.t = t;
  rep.j_k = int(std::floor(std::log2(t * std::ldexp(1.0, k)) + 1e-12)) + 1;
  const Field f = phi ? broadcast_multiply(pr.f, *phi) : pr.f;
  const Field gg = phi ? broadcast_multiply(pr.g, *phi) : pr.g;
  const BlockIndex blk = BlockIndex::dyadic(std::ldexp(1.0, k));

  rep.a_norm = lp_norm(average_A_fourier(f, blk, t, rho, cut), p);
  Field fv = block_project(f, Group::v, BlockIndex::dyadic(t * std::ldexp(1.0, k)), cut);
  rep.a_rhs = std::pow(t, -E) * lebesgue_norm(fv, NormKind{1.0, p, true});
  rep.c_a = rep.a_rhs > 0.0 ? rep.a_norm / rep.a_rhs : 0.0;

  rep.b_norm = lp_norm(average_B_fourier(gg, blk, t, rho, cut), p);
  if (rep.b_norm == 0.0) return rep;
  const NormKind nk{1.0, p, true};
  const double low = lebesgue_norm(block_project(gg, Group::v, BlockIndex::zero(), cut), nk);
  auto dyad = [&](int j) {
    const BlockIndex bj = BlockIndex::dyadic(std::ldexp(1.0, j));
    if (block_flags(gg.grid(), bj, cut).above_nyquist) return 0.0;
    return lebesgue_norm(block_project(gg, Group::v, bj, cut), nk);
  };
  const double gap = 1.0 - beta - E;
  double sum;
  if (std::abs(gap) < 1e-12) {
    sum = low;
    for (int j = 0; j <= rep.j_k + 1; ++j) sum += std::pow(2.0, j * beta) * dyad(j);
    rep.b_rhs = sum / t * std::pow(2.0, -k * beta);
  } else {
    sum = std::pow(2.0, -rep.j_k * gap) * low;
    for (int j = 0; j <= rep.j_k + 1; ++j) sum += std::pow(2.0, -(rep.j_k + 1 - j) * gap + j * beta) * dyad(j);
    rep.b_rhs = std::pow(t, -(beta + E)) * std::pow(2.0, -k * beta) * sum;
  }
  rep.c_b = rep.b_rhs > 0.0 ? rep.b_norm / rep.b_rhs : kInf;
  return rep;
}

SlopeReport a_bound_slope(double alpha, double p, int k, const std::vector<double>& ts, const GridSpec& g,
                          const DyadicCutoffs& cut) {
  require(g.dim == 1, ErrorCode::parameter, "A-bound slope runs in D = 1");
  require(ts.size() >= 2, ErrorCode::parameter, "A-bound slope needs at least two t values");
  const double E = 1.0 - recip(p);
  const double freq = std::ldexp(1.0, k);
  Field h(g, Layout::v_only);
  h.set_space(spectral_v);
  for (int i = 0; i < g.n; ++i) h.data()[i] = std::pow(std::max(1.0, std::abs(node_freq(g, i))), -(alpha + E));
  transform_inplace(h, Group::v, Direction::inverse);
  Field f(g, Layout::xv);
  for (int ix = 0; ix < g.n; ++ix)
    for (int iv = 0; iv < g.n; ++iv) f.at(ix, iv) = std::cos(freq * node_coord(g, ix)) * h.data()[iv];
  const CutoffRho rho = CutoffRho::dirac();
  SlopeReport rep;
  for (double t : ts) {
    require(t * freq <= g.axis_nyquist(), ErrorCode::parameter, "t 2^k beyond the velocity Nyquist frequency");
    rep.xs.push_back(std::log2(t));
    rep.values.push_back(lp_norm(average_A_fourier(f, BlockIndex::dyadic(freq), t, rho, cut), p));
  }
  auto fit = fit_log2(rep.xs, rep.values);
  rep.slope = fit.slope;
  rep.r2 = fit.r2;
  return rep;
}

StripReport lambda_strip_decay(double alpha, double q, const std::vector<double>& lambdas, const StripGrid& sg,
                               const DyadicCutoffs& cut, int dim) {
  require(dim == 2, ErrorCode::parameter, "strip profile needs D = 2");
  require(lambdas.size() >= 2, ErrorCode::parameter, "strip sweep needs at least two lambdas");
  const GridSpec g2{2, sg.n, sg.period}, g1{1, sg.n, sg.period};
  g2.validate();
  require(sg.rho_plateau >= 0.0 && sg.rho_plateau < 1.0, ErrorCode::parameter, "rho plateau must lie in [0, 1)");
  const double hw = sg.chi_half_width, ed = sg.chi_edge;
  Field chi = sample_group(
      [&](std::span<const double> y) {
        return cplx(0.5 * (std::erf((y[0] + hw) / ed) - std::erf((y[0] - hw) / ed)), 0.0);
      },
      g1, Layout::v_only);
  transform_inplace(chi, Group::v, Direction::forward);
  // rho^: smooth plateau on [-1, 1] with (1/2pi) int rho^ = 1.
  auto bump = [&](double z) {
    const double u = (std::abs(z) - sg.rho_plateau) / (1.0 - sg.rho_plateau);
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
    return b / (a + b);
  };
  const auto gl = gauss_legendre(64, -1.0, 1.0);
  double mass = 0.0;
  for (std::size_t i = 0; i < gl.size(); ++i) mass += gl.weights[i] * bump(gl.nodes[i]);
  const double norm = 2.0 * kPi / mass;

  StripReport rep;
  rep.predicted = -(std::min(alpha, 0.5) + 0.5);
  std::array<double, 2> xi{};
  for (double lam : lambdas) {
    require(lam >= 1.0, ErrorCode::parameter, "lambda must be >= 1");
    require(lam <= g2.axis_nyquist(), ErrorCode::parameter, "lambda beyond the grid Nyquist frequency");
    Field h(g2, Layout::v_only);
    h.set_space(spectral_v);
    for (std::size_t i = 0; i < h.size(); ++i) {
      group_freqs(g2, i, xi);
      h.data()[i] = norm * bump(xi[0] / lam) / lam * chi.data()[i % std::size_t(sg.n)];
    }
    transform_inplace(h, Group::v, Direction::inverse);
    const double nv = besov_norm(h, Group::v, BesovSpec{-alpha, 2.0, q}, cut).value;
    rep.lambdas.push_back(lam);
    rep.norms.push_back(nv);
    rep.log_corrected.push_back(lam * nv / std::pow(std::log1p(lam), recip(q)));
  }
  std::vector<double> xs;
  for (double l : rep.lambdas) xs.push_back(std::log2(l));
  auto fit = fit_log2(xs, rep.norms);
  rep.slope = fit.slope;
  rep.r2 = fit.r2;
  const auto [mn, mx] = std::minmax_element(rep.log_corrected.begin(), rep.log_corrected.end());
  rep.log_spread = *mx / *mn;
  return rep;
}

}  // namespace vavg
