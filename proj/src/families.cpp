// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "vavg/families.hpp"

#include <array>
#include <cmath>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "vavg/besov.hpp"

namespace vavg {

namespace {

const cplx kI(0.0, 1.0);

double weight_of(const GridSpec& g, std::size_t flat, double index) {
  std::array<double, 2> xi{};
  group_freqs(g, flat, {xi.data(), std::size_t(g.dim)});
  const double r = std::hypot(xi[0], g.dim == 2 ? xi[1] : 0.0);
  return std::pow(std::max(1.0, r), -index - 0.5 * g.dim);
}

bool touches_nyquist(const GridSpec& g, std::size_t flat) {
  for (int d = 0; d < g.dim; ++d) {
    if (lattice_index(g, int(flat % g.n)) == -g.n / 2) return true;
    flat /= g.n;
  }
  return false;
}

double uniform01(boost::random::mt19937_64& eng) { return double(eng() >> 11) * 0x1.0p-53; }

double velocity_norm2(const GridSpec& g, std::size_t iv) {
  std::array<double, 2> v{};
  group_coords(g, iv, {v.data(), std::size_t(g.dim)});
  return v[0] * v[0] + (g.dim == 2 ? v[1] * v[1] : 0.0);
}

// C-infinity step from 1 (u <= 0) to 0 (u >= 1) and its derivative.
double step_down(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
  return b / (a + b);
}

double step_down_derivative(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
  const double da = a / (u * u), db = b / ((1.0 - u) * (1.0 - u));
  return (db * a - b * da) / ((a + b) * (a + b));
}

constexpr double kCoreSigma = 0.5;
constexpr double kCutStart = 4.5;
constexpr double kPlateau = 2.0;
constexpr double kEdge = 0.2;

double plateau(double v) { return 0.5 * (std::erf((v + kPlateau) / kEdge) - std::erf((v - kPlateau) / kEdge)); }

double plateau_derivative(double v) {
  const double c = 1.0 / (kEdge * std::sqrt(kPi));
  const double a = (v + kPlateau) / kEdge, b = (v - kPlateau) / kEdge;
  return c * (std::exp(-a * a) - std::exp(-b * b));
}

std::vector<char> region_mask(const GridSpec& g, const std::vector<std::pair<double, double>>& box, bool present) {
  const std::size_t cnt = present ? g.group_count() : 1;
  std::vector<char> m(cnt, 1);
  if (!present || box.empty()) return m;
  require(box.size() == std::size_t(g.dim), ErrorCode::parameter, "region box needs one interval per axis");
  std::array<double, 2> y{};
  for (std::size_t i = 0; i < cnt; ++i) {
    group_coords(g, i, {y.data(), std::size_t(g.dim)});
    for (int d = 0; d < g.dim; ++d)
      if (y[d] < box[d].first || y[d] > box[d].second) m[i] = 0;
  }
  return m;
}

}  // namespace

Field band_limit(const Field& f, double fraction) {
  require(fraction > 0.0 && fraction <= 1.0, ErrorCode::parameter, "band fraction must lie in (0, 1]");
  const GridSpec& g = f.grid();
  const double cut = fraction * g.axis_nyquist() * (1.0 + 1e-12);
  auto sym = [&](std::span<const double> xi) {
    for (double x : xi)
      if (std::abs(x) > cut) return cplx(0.0);
    return cplx(1.0);
  };
  Field out = f;
  if (f.has_x()) out = apply_multiplier(out, Group::x, sym);
  if (f.has_v()) out = apply_multiplier(out, Group::v, sym);
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Field synthesize_besov_field(const SyntheticSpec& spec, const GridSpec& g) {
  g.validate();
  Field f(g, Layout::xv);
  if (spec.amplitude == 0.0) return f;
  boost::random::mt19937_64 eng(spec.seed);
  boost::random::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> wx(f.x_count()), wv(f.v_count());
  for (std::size_t i = 0; i < wx.size(); ++i) wx[i] = touches_nyquist(g, i) ? 0.0 : weight_of(g, i, spec.x_index);
  for (std::size_t i = 0; i < wv.size(); ++i) wv[i] = touches_nyquist(g, i) ? 0.0 : weight_of(g, i, spec.v_index);
  for (std::size_t ix = 0; ix < f.x_count(); ++ix)
    for (std::size_t iv = 0; iv < f.v_count(); ++iv) {
      const double re = nd(eng), im = nd(eng);
      f.at(ix, iv) = spec.amplitude * wx[ix] * wv[iv] * cplx(re, im);
    }
  f.set_space(spectral_xv);
  transform_inplace(f, Group::both, Direction::inverse);
  // The real part is the Hermitian-symmetrized synthesis.
  for (std::size_t ix = 0; ix < f.x_count(); ++ix)
    for (std::size_t iv = 0; iv < f.v_count(); ++iv) {
      double val = f.at(ix, iv).real();
      if (spec.envelope > 0.0) val *= std::exp(-velocity_norm2(g, iv) / (2.0 * spec.envelope * spec.envelope));
      f.at(ix, iv) = val;
    }
  return f;
}

Field synthesize_velocity_field(double v_index, double amplitude, double envelope, std::uint64_t seed,
                                const GridSpec& g) {
  g.validate();
  Field f(g, Layout::v_only);
  if (amplitude == 0.0) return f;
  boost::random::mt19937_64 eng(seed);
  boost::random::normal_distribution<double> nd(0.0, 1.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double re = nd(eng), im = nd(eng);
    f.data()[i] = touches_nyquist(g, i) ? cplx(0.0) : amplitude * weight_of(g, i, v_index) * cplx(re, im);
  }
  f.set_space(spectral_v);
  transform_inplace(f, Group::v, Direction::inverse);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double val = f.data()[i].real();
    if (envelope > 0.0) val *= std::exp(-velocity_norm2(g, i) / (2.0 * envelope * envelope));
    f.data()[i] = val;
  }
  return f;
}

TransportPair concentrated_family(const ConcentratedSpec& spec, const GridSpec& g) {
  require(g.dim == 1, ErrorCode::parameter, "concentrated family runs in D = 1");
  require(spec.k_min >= 0 && spec.k_min <= spec.k_max, ErrorCode::parameter, "concentrated family needs k_min <= k_max");
  require(spec.sigma > 0.0, ErrorCode::parameter, "concentrated profile width must be positive");
  require(std::ldexp(1.0, spec.k_max) <= 0.5 * g.axis_nyquist(), ErrorCode::parameter,
          "concentrated family frequencies exceed half the Nyquist frequency");
  boost::random::mt19937_64 eng(spec.seed);
  Field f(g, Layout::xv);
  for (int k = spec.k_min; k <= spec.k_max; ++k) {
    const double phase = 2.0 * kPi * uniform01(eng);
    const double amp = std::pow(2.0, -k * spec.decay), fr = std::ldexp(1.0, k);
    const double sc = std::pow(2.0, k * spec.theta);
    for (int ix = 0; ix < g.n; ++ix) {
      const double cx = amp * std::cos(fr * node_coord(g, ix) + phase);
      for (int iv = 0; iv < g.n; ++iv) {
        const double y = sc * node_coord(g, iv) / spec.sigma;
        f.at(ix, iv) += cx * std::exp(-0.5 * y * y);
      }
    }
  }
  return make_pair(f);
}

double counterexample_profile(double y) {
  const double s2 = kCoreSigma * kCoreSigma;
  return std::exp(-y * y / (2.0 * s2)) * step_down(std::abs(y) - kCutStart);
}

double counterexample_profile_derivative(double y) {
  const double s2 = kCoreSigma * kCoreSigma;
  const double gss = std::exp(-y * y / (2.0 * s2));
  const double sg = y < 0.0 ? -1.0 : 1.0;
  return -y / s2 * gss * step_down(std::abs(y) - kCutStart) + gss * sg * step_down_derivative(std::abs(y) - kCutStart);
}

OscillatoryFields oscillatory_counterexample(int n, const GridSpec& g) {
  require(g.dim == 1, ErrorCode::parameter, "oscillatory family runs in D = 1");
  require(n >= 1, ErrorCode::parameter, "oscillation frequency n must be positive");
  require(n <= 0.25 * g.axis_nyquist(), ErrorCode::parameter, "oscillation frequency n beyond a quarter of Nyquist");
  require(g.period >= 2.0 * (kCutStart + 1.0) / n && g.period / 2.0 >= kPlateau + 5.0 * kEdge, ErrorCode::parameter,
          "period too short for the oscillatory profiles");
  const double dn = n;
  OscillatoryFields of;
  of.f = sample_function(
      [&](std::span<const double> x, std::span<const double> v) {
        return cplx(dn * counterexample_profile(dn * x[0]) * std::cos(dn * v[0]) * plateau(v[0]));
      },
      g);
  of.g = sample_function(
      [&](std::span<const double> x, std::span<const double> v) {
        return cplx(v[0] * dn * counterexample_profile_derivative(dn * x[0]) * std::sin(dn * v[0]) * plateau(v[0]));
      },
      g);
  of.h = sample_function(
      [&](std::span<const double> x, std::span<const double> v) {
        const double s = std::sin(dn * v[0]);
        return cplx(dn * counterexample_profile_derivative(dn * x[0]) *
                    (s * plateau(v[0]) + v[0] * s * plateau_derivative(v[0])));
      },
      g);
  Field lhs = apply_transport(of.f);
  Field dvg = apply_multiplier(of.g, Group::v, [](std::span<const double> xi) { return kI * xi[0]; });
  Field diff = lhs - (dvg - of.h);
  const double nl = lp_norm(lhs, 2.0);
  of.identity_residual = lp_norm(diff, 2.0) / nl;
  return of;
}

OscillatoryDiagnostics oscillatory_diagnostics(const OscillatoryFields& of, int n) {
  const GridSpec& g = of.f.grid();
  const double third = kPi / 3.0;
  OscillatoryDiagnostics d;
  d.n = n;
  Field ind = sample_group([&](std::span<const double> v) { return cplx(std::abs(v[0]) <= third ? 1.0 : 0.0); }, g,
                           Layout::v_only);
  Field smooth = sample_group(
      [&](std::span<const double> v) {
        return cplx(0.5 * (std::erf((v[0] + third) / kEdge) - std::erf((v[0] - third) / kEdge)));
      },
      g, Layout::v_only);
  d.average_l1 = lp_norm(velocity_average(of.f, &ind), 1.0);
  d.smooth_average_l1 = lp_norm(velocity_average(of.f, &smooth), 1.0);
  // |cos(n v)| has the same mass on |v| <= pi/2 for every even n.
  const double half = kPi / 2.0;
  Box core{{{-1.0 / n, 1.0 / n}}, {{-half, half}}};
  Box local{{{-1.0, 1.0}}, {{-half, half}}};
  d.concentration = lebesgue_norm(of.f, NormKind{1.0, 1.0, true}, &core);
  d.local_l1 = lebesgue_norm(of.f, NormKind{1.0, 1.0, true}, &local);
  return d;
}

Field scale_x(const Field& f, int R) {
  require(R >= 1 && (R & (R - 1)) == 0, ErrorCode::parameter, "scaling ratio R must be a power of two");
  require(f.grid().dim == 1 && f.has_x(), ErrorCode::parameter, "scaling family runs in D = 1 with an x group");
  require(f.space() == physical, ErrorCode::usage, "scaling needs a physical field");
  if (R == 1) return f;
  const GridSpec& g = f.grid();
  Field sp = transform(f, Group::x, Direction::forward);
  Field out = sp.zeros_like();
  for (int i = 0; i < g.n; ++i) {
    const int m = lattice_index(g, i);
    const long src = long(m) * R;
    if (src < -g.n / 2 || src >= g.n / 2) continue;
    const std::size_t si = std::size_t((src + g.n) % g.n);
    for (std::size_t iv = 0; iv < sp.v_count(); ++iv) out.at(std::size_t(i), iv) = double(R) * sp.at(si, iv);
  }
  transform_inplace(out, Group::x, Direction::inverse);
  return out;
}

TransportPair scaling_family(const TransportPair& base, int R) {
  Field fr = scale_x(base.f, R);
  return make_pair(fr);
}

ScalingExponents scaling_sweep(const TransportPair& base, const Field& phi, const std::vector<int>& Rs,
                               const ScalingNorms& nm) {
  require(Rs.size() >= 2, ErrorCode::parameter, "scaling sweep needs at least two ratios");
  ScalingExponents out;
  std::vector<double> xs, lhs, fn, gn, ratio;
  for (int R : Rs) {
    TransportPair pr = scaling_family(base, R);
    ScalingLedger row;
    row.R = R;
    row.lhs = lp_norm(velocity_average(pr.f, &phi), nm.p);
    row.f_norm = lebesgue_norm(pr.f, NormKind{nm.r0, nm.p0, true});
    row.g_norm = lebesgue_norm(pr.g, NormKind{nm.r1, nm.p1, true});
    out.rows.push_back(row);
    xs.push_back(std::log2(double(R)));
    lhs.push_back(row.lhs);
    fn.push_back(row.f_norm);
    gn.push_back(row.g_norm);
    ratio.push_back(row.lhs / row.f_norm);
  }
  out.lhs_slope = fit_log2(xs, lhs).slope;
  out.f_slope = fit_log2(xs, fn).slope;
  out.g_slope = fit_log2(xs, gn).slope;
  out.ratio_slope = fit_log2(xs, ratio).slope;
  return out;
}

double llogl_young(double z) {
  if (z < 1e-4) return z * z / 2.0 - z * z * z / 6.0 + z * z * z * z / 12.0;
  return (1.0 + z) * std::log1p(z) - z;
}

double llogl_young_inverse(double y) {
  require(y >= 0.0, ErrorCode::parameter, "Young function inverse needs y >= 0");
  double lo = 0.0, hi = 1e12;
  require(llogl_young(hi) >= y, ErrorCode::numeric, "Young function inverse out of bracket");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (llogl_young(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double orlicz_llogl_norm(const Field& f, const Box* region) {
  require(f.space() == physical, ErrorCode::usage, "Orlicz norm needs a physical field");
  const GridSpec& g = f.grid();
  auto mx = region_mask(g, region ? region->x : std::vector<std::pair<double, double>>{}, f.has_x());
  auto mv = region_mask(g, region ? region->v : std::vector<std::pair<double, double>>{}, f.has_v());
  const double cell = std::pow(g.spacing(), g.dim * ((f.has_x() ? 1 : 0) + (f.has_v() ? 1 : 0)));
  std::vector<double> vals;
  double measure = 0.0, top = 0.0;
  for (std::size_t ix = 0; ix < f.x_count(); ++ix)
    for (std::size_t iv = 0; iv < f.v_count(); ++iv) {
      if (!mx[ix] || !mv[iv]) continue;
      measure += cell;
      const double a = std::abs(f.at(ix, iv));
      require(std::isfinite(a), ErrorCode::numeric, "Orlicz norm of a non-finite field");
      vals.push_back(a);
      top = std::max(top, a);
    }
  require(measure > 0.0, ErrorCode::parameter, "Orlicz region has zero measure");
  if (top == 0.0) return 0.0;
  auto excess = [&](double lam) {
    double s = 0.0;
    for (double a : vals) s += llogl_young(a / lam);
    return s * cell - 1.0;
  };
  double lo = top, hi = top;
  int guard = 0;
  while (excess(lo) <= 0.0) {
    lo *= 0.5;
    require(++guard < 400, ErrorCode::numeric, "Orlicz bracket did not converge");
  }
  while (excess(hi) > 0.0) {
    hi *= 2.0;
    require(++guard < 400, ErrorCode::numeric, "Orlicz bracket did not converge");
  }
  while (hi / lo - 1.0 > 1e-12) {
    const double mid = std::sqrt(lo * hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace vavg
