// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "vavg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "json.hpp"
#include "vavg/families.hpp"
#include "vavg/paradifferential.hpp"

namespace vavg {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- reports

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")); }

struct Check {
  std::string name;
  bool verdict = true;
  double value = 0.0;
  std::optional<double> lo, hi;
  bool pass = true;
};

class Report {
 public:
  explicit Report(std::string suite) : suite_(std::move(suite)) {}

  // Verdict on lo <= value <= hi; a non-finite value fails.
  void bound(const std::string& name, double value, std::optional<double> lo, std::optional<double> hi) {
    Check c{name, true, value, lo, hi, std::isfinite(value)};
    if (lo && !(value >= *lo)) c.pass = false;
    if (hi && !(value <= *hi)) c.pass = false;
    checks_.push_back(c);
  }
  void verdict(const std::string& name, double value, bool pass) { checks_.push_back({name, true, value, {}, {}, pass}); }
  void info(const std::string& name, double value, std::optional<double> lo = {}, std::optional<double> hi = {}) {
    Check c{name, false, value, lo, hi, true};
    if (lo && !(value >= *lo)) c.pass = false;
    if (hi && !(value <= *hi)) c.pass = false;
    checks_.push_back(c);
  }
  void merge(const Report& o) {
    checks_.insert(checks_.end(), o.checks_.begin(), o.checks_.end());
    csv_.insert(csv_.end(), o.csv_.begin(), o.csv_.end());
  }
  void csv(const std::string& name, std::string body) { csv_.emplace_back(name, std::move(body)); }

  json details = json::object();

  SuiteOutcome outcome() const {
    SuiteOutcome o;
    o.suite = suite_;
    for (const auto& c : checks_) {
      if (!c.verdict) continue;
      ++o.verdicts;
      if (!c.pass) {
        ++o.failed;
        o.failed_checks.push_back(c.name);
      }
    }
    o.pass = o.failed == 0;
    return o;
  }

  json to_json(const json& settings) const {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["suite"] = suite_;
    j["settings"] = settings;
    j["details"] = details;
    json arr = json::array();
    for (const auto& c : checks_) {
      json e;
      e["name"] = c.name;
      e["kind"] = c.verdict ? "verdict" : "info";
      e["value"] = num(c.value);
      e["lo"] = c.lo ? num(*c.lo) : json(nullptr);
      e["hi"] = c.hi ? num(*c.hi) : json(nullptr);
      e["pass"] = c.pass;
      arr.push_back(e);
    }
    j["checks"] = arr;
    const SuiteOutcome o = outcome();
    j["verdicts"] = o.verdicts;
    j["failed"] = o.failed;
    j["pass"] = o.pass;
    return j;
  }

  std::string checks_csv() const {
    std::ostringstream os;
    os << "name,kind,value,lo,hi,pass\n";
    for (const auto& c : checks_)
      os << c.name << "," << (c.verdict ? "verdict" : "info") << "," << fmt(c.value) << ","
         << (c.lo ? fmt(*c.lo) : "") << "," << (c.hi ? fmt(*c.hi) : "") << "," << (c.pass ? 1 : 0) << "\n";
    return os.str();
  }

  const std::vector<std::pair<std::string, std::string>>& csvs() const { return csv_; }
  const std::string& suite() const { return suite_; }

 private:
  std::string suite_;
  std::vector<Check> checks_;
  std::vector<std::pair<std::string, std::string>> csv_;
};

void write_text(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  require(bool(out), ErrorCode::io, p.string() + ": cannot open for writing");
  out << body;
  require(bool(out), ErrorCode::io, p.string() + ": write failed");
}

// Results land in index order whatever the thread count.
template <class R, class F>
std::vector<R> parallel_map(std::size_t n, int threads, F&& fn) {
  std::vector<R> out(n);
  std::vector<std::exception_ptr> errs(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  const int t = std::max(1, std::min<int>(threads, int(n)));
  if (t == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

// "kind:key=value,key=value"
struct Descriptor {
  std::string kind;
  std::map<std::string, double> values;
  std::string text;
};

std::vector<Descriptor> get_descriptors(const Config& cfg, const std::string& sec, const std::string& key,
                                        const std::string& def,
                                        const std::map<std::string, std::vector<std::string>>& allowed) {
  const std::string raw = cfg.get_string(sec, key, def);
  std::vector<Descriptor> out;
  int idx = 0;
  for (const auto& item : split(raw, '|')) {
    ++idx;
    if (item.empty()) continue;
    Descriptor d;
    d.text = item;
    const auto colon = item.find(':');
    d.kind = trim(item.substr(0, colon));
    auto a = allowed.find(d.kind);
    if (a == allowed.end()) cfg.fail_at(sec, key, "entry " + std::to_string(idx) + ": unknown kind '" + d.kind + "'");
    if (colon != std::string::npos) {
      for (const auto& kv : split(item.substr(colon + 1), ',')) {
        if (kv.empty()) continue;
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
          cfg.fail_at(sec, key, "entry " + std::to_string(idx) + ": '" + kv + "' lacks '='");
        const std::string k = trim(kv.substr(0, eq));
        if (std::find(a->second.begin(), a->second.end(), k) == a->second.end())
          cfg.fail_at(sec, key, "entry " + std::to_string(idx) + ": unknown parameter '" + k + "' for " + d.kind);
        try {
          d.values[k] = parse_exponent(kv.substr(eq + 1));
        } catch (const Error& e) {
          cfg.fail_at(sec, key, "entry " + std::to_string(idx) + ": " + e.what());
        }
      }
    }
    out.push_back(d);
  }
  return out;
}

double dval(const Descriptor& d, const std::string& k, double def) {
  auto it = d.values.find(k);
  return it == d.values.end() ? def : it->second;
}

// ---------------------------------------------------------------- settings

struct Common {
  std::uint64_t seed = 1;
  double cutoff_width = 0.125;
};

GridSpec read_grid(const Config& cfg, const std::string& sec, int dim, int n, double periods) {
  GridSpec g{dim, cfg.get_int(sec, "n", n), 2.0 * kPi * cfg.get_double(sec, "periods", periods)};
  try {
    g.validate();
  } catch (const Error& e) {
    cfg.fail_at(sec, cfg.has(sec, "n") ? "n" : "periods", e.what());
  }
  return g;
}

void need_positive(const Config& cfg, const std::string& sec, const std::string& key, double v) {
  if (!(v > 0.0)) cfg.fail_at(sec, key, "must be positive");
}

json grid_json(const GridSpec& g) { return json{{"dim", g.dim}, {"n", g.n}, {"period", g.period}}; }

Field bump_phi(const GridSpec& g, double radius) {
  return sample_group(
      [radius](std::span<const double> v) {
        double r2 = 0.0;
        for (double x : v) r2 += x * x;
        const double z2 = r2 / (radius * radius);
        return cplx(z2 < 1.0 ? std::exp(-1.0 / (1.0 - z2)) : 0.0, 0.0);
      },
      g, Layout::v_only);
}

Field gaussian_phi(const GridSpec& g, double sigma) {
  return sample_group(
      [sigma](std::span<const double> v) {
        double r2 = 0.0;
        for (double x : v) r2 += x * x;
        return cplx(std::exp(-r2 / (2.0 * sigma * sigma)), 0.0);
      },
      g, Layout::v_only);
}

Field gaussian_xv(const GridSpec& g, double sx, double sv) {
  return sample_function(
      [sx, sv](std::span<const double> x, std::span<const double> v) {
        return cplx(std::exp(-x[0] * x[0] / (2.0 * sx * sx) - v[0] * v[0] / (2.0 * sv * sv)), 0.0);
      },
      g);
}

// ---------------------------------------------------------------- identities

struct IdentitiesCfg {
  GridSpec g;
  double band = 0.5;
  SyntheticSpec field;
  std::vector<double> transfer_ts;
  double transfer_delta = 8.0;
  double decomp_t = 0.125, decomp_delta = 8.0;
  double local_t = 4.0, local_delta = 1.0;
  double local_info_t = 0.5, local_info_delta = 8.0;
  double duhamel_t = 0.5;
  int duhamel_nodes = 64;
  int order_n = 64, order_lo = 16;
  double phi_sigma = 1.0;
  int control_j = 4;
  double tol_partition = 1e-12, tol_transfer = 1e-10, tol_decomp = 1e-8, tol_repr = 1e-7, tol_local = 1e-8;
  double negative_min = 1e-2, tol_bony = 1e-10, tol_support = 1e-10, tol_duhamel = 1e-8, order_tol = 0.2;
};

IdentitiesCfg read_identities(const Config& cfg) {
  const std::string s = "identities";
  IdentitiesCfg c;
  c.g = read_grid(cfg, s, 1, 256, 4.0);
  c.band = cfg.get_double(s, "band_fraction", 0.5);
  if (!(c.band > 0.0 && c.band <= 1.0)) cfg.fail_at(s, "band_fraction", "must lie in (0, 1]");
  c.field.x_index = cfg.get_double(s, "x_index", 1.0);
  c.field.v_index = cfg.get_double(s, "v_index", 1.0);
  c.field.envelope = cfg.get_double(s, "envelope", 1.5);
  c.transfer_ts = cfg.get_doubles(s, "transfer_ts", {1.0, 2.0});
  for (double t : c.transfer_ts) need_positive(cfg, s, "transfer_ts", t);
  c.transfer_delta = cfg.get_double(s, "transfer_delta", 8.0);
  c.decomp_t = cfg.get_double(s, "decomp_t", 0.125);
  c.decomp_delta = cfg.get_double(s, "decomp_delta", 8.0);
  c.local_t = cfg.get_double(s, "local_t", 4.0);
  c.local_delta = cfg.get_double(s, "local_delta", 1.0);
  c.local_info_t = cfg.get_double(s, "local_info_t", 0.5);
  c.local_info_delta = cfg.get_double(s, "local_info_delta", 8.0);
  c.duhamel_t = cfg.get_double(s, "duhamel_t", 0.5);
  c.duhamel_nodes = cfg.get_int(s, "duhamel_nodes", 64);
  c.order_n = cfg.get_int(s, "order_n", 64);
  c.order_lo = cfg.get_int(s, "order_nodes", 16);
  c.phi_sigma = cfg.get_double(s, "phi_sigma", 1.0);
  c.control_j = cfg.get_int(s, "control_j", 4);
  for (const char* k : {"transfer_delta", "decomp_t", "decomp_delta", "local_t", "local_delta", "local_info_t",
                        "local_info_delta", "duhamel_t", "phi_sigma"})
    need_positive(cfg, s, k, cfg.get_double(s, k, 1.0));
  if (c.duhamel_nodes < 1) cfg.fail_at(s, "duhamel_nodes", "must be at least 1");
  if (c.order_lo < 1) cfg.fail_at(s, "order_nodes", "must be at least 1");
  c.tol_partition = cfg.get_double(s, "tol_partition", c.tol_partition);
  c.tol_transfer = cfg.get_double(s, "tol_transfer", c.tol_transfer);
  c.tol_decomp = cfg.get_double(s, "tol_decomp", c.tol_decomp);
  c.tol_repr = cfg.get_double(s, "tol_repr", c.tol_repr);
  c.tol_local = cfg.get_double(s, "tol_local", c.tol_local);
  c.negative_min = cfg.get_double(s, "negative_min", c.negative_min);
  c.tol_bony = cfg.get_double(s, "tol_bony", c.tol_bony);
  c.tol_support = cfg.get_double(s, "tol_support", c.tol_support);
  c.tol_duhamel = cfg.get_double(s, "tol_duhamel", c.tol_duhamel);
  c.order_tol = cfg.get_double(s, "order_tol", c.order_tol);
  return c;
}

void run_identities(const IdentitiesCfg& c, const Common& cm, const DyadicCutoffs& cut, Report& rep) {
  // Partition of unity on a dense radial table up to the largest lattice radius.
  {
    const int K = cut.max_block(c.g) + 2;
    const double rmax = c.g.radial_nyquist() * 1.01;
    double worst = 0.0;
    for (int i = 0; i <= 20000; ++i) {
      const double r = rmax * i / 20000.0;
      double sum = cut.psi(r);
      for (int k = 0; k <= K; ++k) sum += cut.phi(std::ldexp(r, -k));
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    rep.bound("partition.radial_max_error", worst, {}, c.tol_partition);
  }

  SyntheticSpec sp = c.field;
  sp.seed = derive_seed(cm.seed, 1);
  const Field f = band_limit(synthesize_besov_field(sp, c.g), c.band);
  const TransportPair pr = make_pair(f);
  {
    Field acc = f.zeros_like();
    for (const Field& b : inhomogeneous_blocks(f, Group::v, cut)) acc += b;
    rep.bound("partition.block_sum_v", relative_l2(acc, f), {}, c.tol_transfer);
    acc = f.zeros_like();
    for (const Field& b : inhomogeneous_blocks(f, Group::x, cut)) acc += b;
    rep.bound("partition.block_sum_x", relative_l2(acc, f), {}, c.tol_transfer);
  }
  rep.bound("transport.pair_residual", pair_residual(pr), {}, c.tol_transfer);

  for (double t : c.transfer_ts) {
    for (const auto& [tag, blk] : {std::pair{std::string("dyadic"), BlockIndex::dyadic(c.transfer_delta)},
                                   std::pair{std::string("low"), BlockIndex::zero()}}) {
      const auto r = x_to_v_transfer_check(f, t, blk, cut);
      const std::string name = "x_to_v." + tag + ".t=" + fmt(t);
      if (r.skipped)
        rep.info(name + ".skipped", 1.0);
      else
        rep.bound(name, r.residual, {}, c.tol_transfer);
    }
  }

  for (const CutoffRho& rho : {CutoffRho::dirac(), CutoffRho::smooth()}) {
    DecompParams dp;
    dp.t = c.decomp_t;
    dp.delta = BlockIndex::dyadic(c.decomp_delta);
    dp.rho = rho;
    const auto d = dyadic_average_decomposition(pr, dp, cut);
    const std::string base = "decomposition." + rho.name();
    rep.bound(base + ".physical", d.residual, {}, c.tol_decomp);
    rep.bound(base + ".fourier", d.fourier_residual, {}, c.tol_decomp);
    rep.bound(base + ".a_repr_gap", d.a_repr_gap, {}, c.tol_repr);
    rep.bound(base + ".b_repr_gap", d.b_repr_gap, {}, c.tol_repr);
  }

  {
    const auto L = localization_check(pr, c.local_t, c.local_delta, CutoffRho::smooth(), QuadMode::lattice, cut);
    rep.bound("localization.a_block", L.a_block, {}, c.tol_local);
    rep.bound("localization.b_block", L.b_block, {}, c.tol_local);
    rep.bound("localization.a_low", L.a_low, {}, c.tol_local);
    rep.bound("localization.b_low", L.b_low, {}, c.tol_local);
    rep.bound("localization.negative_control", L.negative_control, c.negative_min, {});
    // Gauss quadrature in s leaves a quadrature error on top of the identity.
    const auto G =
        localization_check(pr, c.local_info_t, c.local_info_delta, CutoffRho::smooth(), QuadMode::gauss, cut);
    rep.info("localization.gauss.max_identity", G.max_identity());
    rep.info("localization.gauss.negative_control", G.negative_control);
  }

  {
    const auto d = duhamel_identity_check(pr, c.duhamel_t, QuadRule::gauss_legendre, c.duhamel_nodes);
    rep.bound("duhamel.gauss_legendre", d.residual, {}, c.tol_duhamel);
    GridSpec gs{1, c.order_n, 2.0 * kPi};
    SyntheticSpec so = c.field;
    so.envelope = 1.0;
    so.seed = derive_seed(cm.seed, 2);
    const TransportPair po = make_pair(band_limit(synthesize_besov_field(so, gs), c.band));
    const double lo = duhamel_identity_check(po, c.duhamel_t, QuadRule::midpoint, c.order_lo).residual;
    const double hi = duhamel_identity_check(po, c.duhamel_t, QuadRule::midpoint, 2 * c.order_lo).residual;
    // Midpoint rule is second order: halving the step divides the error by 4.
    rep.bound("duhamel.midpoint_order_ratio", lo / hi, 4.0 * (1.0 - c.order_tol), 4.0 * (1.0 + c.order_tol));
  }

  {
    const Field phi = band_limit(gaussian_phi(c.g, c.phi_sigma), c.band);
    const auto bp = bony_decompose(f, phi, cut);
    rep.bound("bony.reconstruction", bp.reconstruction_residual, {}, c.tol_bony);
    rep.info("bony.truncated", bp.truncated ? 1.0 : 0.0);
    rep.info("bony.literal_low_pass_residual", bony_decompose(f, phi, cut, BonyLowPass::literal).reconstruction_residual);
    const auto sr = support_localization_check(f, phi, cut, BonyLowPass::shifted, c.control_j);
    rep.bound("bony.support_low_block", sr.low_of_paraproduct, {}, c.tol_support);
    rep.bound("bony.support_far_blocks", sr.far_blocks, {}, c.tol_support);
    rep.bound("bony.support_control", sr.control, c.negative_min, {});
    Field one = sample_group([](std::span<const double>) { return cplx(1.0, 0.0); }, c.g, Layout::v_only);
    const auto b1 = bony_decompose(f, one, cut);
    rep.bound("bony.constant_phi.T_phi_f", lp_norm(b1.T_phi_f, 2.0) / lp_norm(f, 2.0), {}, c.tol_bony);
    rep.bound("bony.constant_phi.T_f_phi_plus_R", relative_l2(b1.T_f_phi + b1.remainder, f), {}, c.tol_bony);
  }
}

// ---------------------------------------------------------------- norms

struct NormsCfg {
  GridSpec g;
  int seeds = 3;
  double x_index = 1.0, v_index = 1.5;
  int fit_lo = 1, fit_hi = 4;
  double index_tol = 0.05;
  double chl_s = 0.5;
  GridSpec bern_grid;
  std::vector<int> bern_ks;
  double bern_spread = 4.0;
  int spikes = 3;
  double phi_sigma = 1.0;
  std::vector<double> product_s;
  double product_max = 100.0, spread_max = 10.0;
};

NormsCfg read_norms(const Config& cfg) {
  const std::string s = "norms";
  NormsCfg c;
  c.g = read_grid(cfg, s, 1, 256, 4.0);
  c.seeds = cfg.get_int(s, "seeds", 3);
  if (c.seeds < 1) cfg.fail_at(s, "seeds", "must be at least 1");
  c.x_index = cfg.get_double(s, "x_index", 1.0);
  c.v_index = cfg.get_double(s, "v_index", 1.5);
  c.fit_lo = cfg.get_int(s, "fit_lo", 1);
  c.fit_hi = cfg.get_int(s, "fit_hi", 4);
  if (c.fit_hi - c.fit_lo < 3) cfg.fail_at(s, "fit_hi", "fit window needs at least four blocks");
  c.index_tol = cfg.get_double(s, "index_tol", 0.05);
  c.chl_s = cfg.get_double(s, "chl_s", 0.5);
  c.bern_grid = GridSpec{1, cfg.get_int(s, "bernstein_n", 512), 2.0 * kPi * cfg.get_double(s, "bernstein_periods", 2.0)};
  try {
    c.bern_grid.validate();
  } catch (const Error& e) {
    cfg.fail_at(s, "bernstein_n", e.what());
  }
  c.bern_ks = cfg.get_ints(s, "bernstein_ks", {3, 4, 5, 6});
  c.bern_spread = cfg.get_double(s, "bernstein_spread", 4.0);
  c.spikes = cfg.get_int(s, "bernstein_spikes", 3);
  if (c.spikes < 1) cfg.fail_at(s, "bernstein_spikes", "must be at least 1");
  c.phi_sigma = cfg.get_double(s, "phi_sigma", 1.0);
  need_positive(cfg, s, "phi_sigma", c.phi_sigma);
  c.product_s = cfg.get_doubles(s, "product_s", {-1.0, 0.0, 1.0});
  c.product_max = cfg.get_double(s, "product_max", 100.0);
  c.spread_max = cfg.get_double(s, "spread_max", 10.0);
  return c;
}

void run_norms(const NormsCfg& c, const Common& cm, const DyadicCutoffs& cut, int threads, Report& rep) {
  struct SeedOut {
    Report r{"norms"};
    Field f;
  };
  auto outs = parallel_map<SeedOut>(std::size_t(c.seeds), threads, [&](std::size_t i) {
    SeedOut o;
    Report& r = o.r;
    const std::string tag = "seed" + std::to_string(i);
    o.f = synthesize_besov_field({c.x_index, c.v_index, 1.0, 0.0, derive_seed(cm.seed, 100 + i)}, c.g);
    const Field& f = o.f;
    const double l2 = lp_norm(f, 2.0);
    const auto b0 = besov_norm(f, Group::v, {0.0, 2.0, 2.0}, cut);
    r.bound("besov.l2_sandwich." + tag, b0.value / l2, 1.0 / std::sqrt(2.0), 1.0);

    const auto bv = besov_norm(f, Group::v, {0.0, 2.0, 2.0}, cut);
    const auto bx = besov_norm(f, Group::x, {0.0, 2.0, 2.0}, cut);
    r.bound("index.v." + tag, regularity_index_fit(bv.profile, c.fit_lo, c.fit_hi).index(), c.v_index - c.index_tol,
            c.v_index + c.index_tol);
    r.bound("index.x." + tag, regularity_index_fit(bx.profile, c.fit_lo, c.fit_hi).index(), c.x_index - c.index_tol,
            c.x_index + c.index_tol);
    if (i == 0) {
      std::ostringstream os;
      write_profile_csv(os, bv.profile);
      r.csv("profile_v_seed0", os.str());
    }

    // Monotone in s and non-increasing in q.
    double prev = 0.0;
    bool mono_s = true;
    for (double s : {-1.0, 0.0, 0.5, 1.0}) {
      const double v = besov_norm(f, Group::v, {s, 2.0, 2.0}, cut).value;
      mono_s = mono_s && v >= prev * (1.0 - 1e-14);
      prev = v;
    }
    r.verdict("besov.monotone_in_s." + tag, mono_s ? 1.0 : 0.0, mono_s);
    prev = kInf;
    bool mono_q = true;
    for (double q : {1.0, 2.0, 4.0, kInf}) {
      const double v = besov_norm(f, Group::v, {0.5, 2.0, q}, cut).value;
      mono_q = mono_q && v <= prev * (1.0 + 1e-14);
      prev = v;
    }
    r.verdict("besov.monotone_in_q." + tag, mono_q ? 1.0 : 0.0, mono_q);

    // Chemin-Lerner against the plain mixed norms.
    const double tilde = chemin_lerner_norm(f, {1.0, c.chl_s, 2.0, 2.0, true}, cut);
    const double plain = chemin_lerner_norm(f, {1.0, c.chl_s, 2.0, 2.0, false}, cut);
    r.bound("chl.tilde_over_plain.q_ge_r." + tag, tilde / plain, {}, 1.0 + 1e-12);
    const double tilde_q = chemin_lerner_norm(f, {1.0, c.chl_s, 2.0, 4.0, true}, cut);
    const double mixed1 = besov_norm_mixed(f, {0.0, c.chl_s, 1.0, 2.0, 1.0}, cut).value;
    r.bound("chl.tilde_over_mixed_q1." + tag, tilde_q / mixed1, {}, 1.0 + 1e-12);

    for (auto [rr, pp] : {std::pair{1.0, 2.0}, std::pair{2.0, kInf}, std::pair{1.0, kInf}}) {
      const double a = lebesgue_norm(f, NormKind{rr, pp, false});
      const double b = lebesgue_norm(f, NormKind{rr, pp, true});
      r.bound("minkowski.r=" + fmt(rr) + ".p=" + fmt(pp) + "." + tag, a / b, {}, 1.0 + 1e-12);
    }
    return o;
  });
  for (const auto& o : outs) rep.merge(o.r);

  // Separable field: the mixed block matrix factorizes.
  {
    SyntheticSpec sx{c.x_index, 0.0, 1.0, 0.0, derive_seed(cm.seed, 200)};
    const Field fx = synthesize_besov_field(sx, c.g);
    Field ax = sample_group([](std::span<const double>) { return cplx(1.0, 0.0); }, c.g, Layout::x_only);
    Field av = sample_group([](std::span<const double>) { return cplx(1.0, 0.0); }, c.g, Layout::v_only);
    // x factor from a row of fx, v factor Gaussian.
    for (std::size_t ix = 0; ix < ax.x_count(); ++ix) ax.at(ix, 0) = fx.at(ix, 0);
    av = gaussian_phi(c.g, 1.0);
    Field sep(c.g, Layout::xv);
    for (std::size_t ix = 0; ix < sep.x_count(); ++ix)
      for (std::size_t iv = 0; iv < sep.v_count(); ++iv) sep.at(ix, iv) = ax.at(ix, 0) * av.at(0, iv);
    const double r = 1.0, p = 2.0;
    const auto m = besov_norm_mixed(sep, {0.0, 0.0, r, p, 2.0}, cut);
    const auto xb = inhomogeneous_blocks(ax, Group::x, cut);
    const auto vb = inhomogeneous_blocks(av, Group::v, cut);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < m.blocks.size() && i < xb.size(); ++i)
      for (std::size_t j = 0; j < m.blocks[i].size() && j < vb.size(); ++j) {
        const double want = lp_norm(xb[i], r) * lp_norm(vb[j], p);
        worst = std::max(worst, std::abs(m.blocks[i][j] - want));
        scale = std::max(scale, want);
      }
    rep.bound("mixed.separable_factorization", scale > 0.0 ? worst / scale : worst, {}, 1e-10);
  }

  // Bernstein, L^1 -> L^inf on annulus-localized x fields. Random spike trains
  // concentrate each block in space, where the inequality is sharp; random
  // phase fields spread the block and are reported only.
  {
    std::vector<double> ratios, spread_ratios;
    std::ostringstream os;
    os << "family,seed,k,ratio\n";
    for (int s = 0; s < c.seeds; ++s) {
      const GridSpec& g = c.bern_grid;
      boost::random::mt19937_64 rng(derive_seed(cm.seed, 300 + s));
      boost::random::uniform_int_distribution<int> node(0, g.n - 1);
      boost::random::normal_distribution<double> amp(0.0, 1.0);
      Field spikes(g, Layout::x_only);
      for (int m = 0; m < c.spikes; ++m) spikes.at(std::size_t(node(rng)), 0) += amp(rng);
      const Field noise = [&] {
        const Field full = synthesize_besov_field({0.0, 0.0, 1.0, 0.0, derive_seed(cm.seed, 350 + s)}, g);
        Field fx(g, Layout::x_only);
        for (std::size_t ix = 0; ix < fx.x_count(); ++ix) fx.at(ix, 0) = full.at(ix, 0);
        return fx;
      }();
      for (int k : c.bern_ks) {
        const auto br = bernstein_check(spikes, Group::x, k, 1.0, kInf, cut);
        ratios.push_back(br.ratio);
        os << "spikes," << s << "," << k << "," << fmt(br.ratio) << "\n";
        const auto bn = bernstein_check(noise, Group::x, k, 1.0, kInf, cut);
        spread_ratios.push_back(bn.ratio);
        os << "random_phase," << s << "," << k << "," << fmt(bn.ratio) << "\n";
      }
    }
    rep.csv("bernstein", os.str());
    const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
    rep.bound("bernstein.spread", *mx / *mn, {}, c.bern_spread);
    rep.info("bernstein.max_ratio", *mx);
    const auto [nmn, nmx] = std::minmax_element(spread_ratios.begin(), spread_ratios.end());
    rep.info("bernstein.random_phase.max_ratio", *nmx);
    rep.info("bernstein.random_phase.spread", *nmx / *nmn);
  }

  // Product estimate in the velocity variable.
  {
    std::vector<Field> family;
    for (const auto& o : outs) family.push_back(o.f);
    const Field phi = gaussian_phi(c.g, c.phi_sigma);
    std::ostringstream os;
    os << "s,member,ratio\n";
    for (double s : c.product_s) {
      const auto pr = product_estimate_check(family, phi, {1.0, s, 1.0, 1.0, true}, cut);
      for (std::size_t i = 0; i < pr.ratios.size(); ++i) os << fmt(s) << "," << i << "," << fmt(pr.ratios[i]) << "\n";
      rep.bound("product.max.s=" + fmt(s), pr.max_ratio, {}, c.product_max);
      rep.bound("product.spread.s=" + fmt(s), pr.spread, {}, c.spread_max);
    }
    rep.csv("product", os.str());
    Field one = sample_group([](std::span<const double>) { return cplx(1.0, 0.0); }, c.g, Layout::v_only);
    const auto p1 = product_estimate_check(family, one, {1.0, 0.0, 1.0, 1.0, true}, cut);
    rep.bound("product.constant_phi.min", p1.min_ratio, 0.25, {});
    rep.bound("product.constant_phi.max", p1.max_ratio, {}, 4.0);
  }
}

// ---------------------------------------------------------------- dispersive

struct DispersiveCfg {
  GridSpec g;
  double sigma_x = 0.6, sigma_v = 1.0;
  std::vector<double> ts, ps;
  double slope_tol = 0.15, tol_l1 = 1e-10;
  std::vector<double> a_alphas, a_ps, a_ts;
  double a_slope_tol = 0.2;
  GridSpec bb_grid;
  std::vector<int> bb_ks;
  std::vector<double> bb_ts;
  double bb_alpha = 0.5, budget = 1e3, phi_radius = 2.0;
};

DispersiveCfg read_dispersive(const Config& cfg) {
  const std::string s = "dispersive";
  DispersiveCfg c;
  c.g = read_grid(cfg, s, 1, 512, 16.0);
  c.sigma_x = cfg.get_double(s, "sigma_x", 0.6);
  c.sigma_v = cfg.get_double(s, "sigma_v", 1.0);
  need_positive(cfg, s, "sigma_x", c.sigma_x);
  need_positive(cfg, s, "sigma_v", c.sigma_v);
  c.ts = cfg.get_doubles(s, "ts", {1, 1.5, 2, 3, 4, 6, 8});
  if (c.ts.size() < 2) cfg.fail_at(s, "ts", "needs at least two times");
  for (double t : c.ts) need_positive(cfg, s, "ts", t);
  c.ps = cfg.get_doubles(s, "ps", {1, 2, 4, kInf});
  for (double p : c.ps)
    if (!(p >= 1.0)) cfg.fail_at(s, "ps", "exponents must be >= 1");
  c.slope_tol = cfg.get_double(s, "slope_tol", 0.15);
  c.tol_l1 = cfg.get_double(s, "tol_l1", 1e-10);
  c.a_alphas = cfg.get_doubles(s, "a_alphas", {0.0, 0.5});
  c.a_ps = cfg.get_doubles(s, "a_ps", {2.0, kInf});
  c.a_ts = cfg.get_doubles(s, "a_ts", {1, 2, 4, 8});
  c.a_slope_tol = cfg.get_double(s, "a_slope_tol", 0.2);
  c.bb_grid = GridSpec{1, cfg.get_int(s, "bb_n", 512), 2.0 * kPi * cfg.get_double(s, "bb_periods", 2.0)};
  try {
    c.bb_grid.validate();
  } catch (const Error& e) {
    cfg.fail_at(s, "bb_n", e.what());
  }
  c.bb_ks = cfg.get_ints(s, "bb_ks", {1, 2, 3, 4, 5});
  c.bb_ts = cfg.get_doubles(s, "bb_ts", {0.5, 1.0, 2.0});
  c.bb_alpha = cfg.get_double(s, "bb_alpha", 0.5);
  c.budget = cfg.get_double(s, "budget", 1e3);
  c.phi_radius = cfg.get_double(s, "phi_radius", 2.0);
  return c;
}

void run_dispersive(const DispersiveCfg& c, const Common& cm, const DyadicCutoffs& cut, int threads, Report& rep) {
  const Field h = gaussian_xv(c.g, c.sigma_x, c.sigma_v);
  auto reps = parallel_map<DispersiveReport>(c.ps.size(), threads,
                                             [&](std::size_t i) { return dispersive_estimate_check(h, c.ps[i], c.ts); });
  std::ostringstream os;
  os << "p,t,ratio\n";
  for (std::size_t i = 0; i < c.ps.size(); ++i) {
    const double p = c.ps[i];
    const auto& d = reps[i];
    const std::string tag = "p=" + fmt(p);
    for (std::size_t j = 0; j < d.ts.size(); ++j) os << fmt(p) << "," << fmt(d.ts[j]) << "," << fmt(d.ratios[j]) << "\n";
    if (p == 1.0) {
      double worst = 0.0;
      for (double r : d.ratios) worst = std::max(worst, std::abs(r - 1.0));
      rep.bound("dispersive.l1_invariance", worst, {}, c.tol_l1);
    } else {
      const double want = -(1.0 - recip(p));
      rep.bound("dispersive.slope." + tag, d.slope, want - c.slope_tol, want + c.slope_tol);
    }
    rep.info("dispersive.bound_excess." + tag, d.max_bound_excess);
    rep.info("dispersive.t_window." + tag, d.t_window);
  }
  rep.csv("dispersive", os.str());

  // A-operator decay in t at fixed block.
  {
    struct Job {
      double alpha, p;
    };
    std::vector<Job> jobs;
    for (double a : c.a_alphas)
      for (double p : c.a_ps) jobs.push_back({a, p});
    auto sl = parallel_map<SlopeReport>(jobs.size(), threads, [&](std::size_t i) {
      return a_bound_slope(jobs[i].alpha, jobs[i].p, 0, c.a_ts, c.g, cut);
    });
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const double want = -(jobs[i].alpha + (1.0 - recip(jobs[i].p)));
      rep.bound("a_bound.slope.alpha=" + fmt(jobs[i].alpha) + ".p=" + fmt(jobs[i].p), sl[i].slope,
                want - c.a_slope_tol, want + c.a_slope_tol);
    }
  }

  // Measured constants of the block bounds over (k, t).
  {
    const Field phi = bump_phi(c.bb_grid, c.phi_radius);
    const Field base = synthesize_besov_field({1.0, 1.0, 1.0, 1.0, derive_seed(cm.seed, 400)}, c.bb_grid);
    struct Job {
      double p, beta;
      int k;
      double t;
    };
    std::vector<Job> jobs;
    for (double p : {2.0, kInf})
      for (double beta : {0.0, -0.5})
        for (int k : c.bb_ks) {
          std::vector<double> ts{std::ldexp(1.0, -k)};
          for (double t : c.bb_ts)
            if (t > std::ldexp(1.0, -k)) ts.push_back(t);
          for (double t : ts) jobs.push_back({p, beta, k, t});
        }
    auto out = parallel_map<BlockBoundReport>(jobs.size(), threads, [&](std::size_t i) {
      TheoremCase tc;
      tc.id = TheoremId::P;
      tc.p = jobs[i].p;
      tc.beta = jobs[i].beta;
      tc.alpha = c.bb_alpha;
      // x band around the block, so the right side sees the same x scale as the left.
      const double d = std::ldexp(1.0, jobs[i].k);
      const TransportPair local = make_pair(block_project(base, Group::x, BlockIndex::band(d / 2.0, 2.0 * d), cut));
      return dyadic_block_bound_check(local, tc, jobs[i].k, jobs[i].t, CutoffRho::dirac(), &phi, cut);
    });
    std::ostringstream bs;
    bs << "p,beta,k,t,j_k,c_a,c_b\n";
    std::map<std::string, std::pair<double, double>> a_rng, b_rng;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const auto& r = out[i];
      bs << fmt(jobs[i].p) << "," << fmt(jobs[i].beta) << "," << r.k << "," << fmt(r.t) << "," << r.j_k << ","
         << fmt(r.c_a) << "," << fmt(r.c_b) << "\n";
      const std::string tag = "p=" + fmt(jobs[i].p) + ".beta=" + fmt(jobs[i].beta);
      auto upd = [](std::map<std::string, std::pair<double, double>>& m, const std::string& k, double v) {
        auto it = m.try_emplace(k, v, v).first;
        it->second.first = std::min(it->second.first, v);
        it->second.second = std::max(it->second.second, v);
      };
      upd(a_rng, tag, r.c_a);
      upd(b_rng, tag, r.c_b);
    }
    rep.csv("block_bounds", bs.str());
    for (const auto& [tag, mm] : a_rng) {
      rep.bound("block_bound.c_a.max." + tag, mm.second, {}, c.budget);
      rep.info("block_bound.c_a.spread." + tag, mm.second / mm.first);
    }
    for (const auto& [tag, mm] : b_rng) {
      rep.bound("block_bound.c_b.max." + tag, mm.second, {}, c.budget);
      rep.info("block_bound.c_b.spread." + tag, mm.second / mm.first);
    }
  }
}

// ---------------------------------------------------------------- verify

struct FamilyDesc {
  std::string kind;  // synthetic | concentrated
  std::string text;
  SyntheticSpec synth;
  ConcentratedSpec conc;
  int only_case = 0;  // 1-based, 0 for every case
  bool info = false;
  std::optional<int> k_lo, k_hi;
};

struct VerifyCfg {
  GridSpec g;
  std::vector<TheoremCase> cases;
  std::vector<FamilyDesc> families;
  int seeds = 5;
  double phi_radius = 2.0;
  VerifyOptions opt;
  double spread_max = 10.0;
};

VerifyCfg read_verify(const Config& cfg) {
  const std::string s = "verify";
  VerifyCfg c;
  c.g = read_grid(cfg, s, 1, 512, 2.0);
  c.cases = cfg.get_cases(s, "cases", c.g.dim);
  c.seeds = cfg.get_int(s, "seeds", 5);
  if (c.seeds < 1) cfg.fail_at(s, "seeds", "must be at least 1");
  c.phi_radius = cfg.get_double(s, "phi_radius", 2.0);
  need_positive(cfg, s, "phi_radius", c.phi_radius);
  c.opt.k_lo = cfg.get_int(s, "k_lo", 1);
  c.opt.k_hi = cfg.get_int(s, "k_hi", 6);
  c.opt.slack = cfg.get_double(s, "slack", 0.2);
  c.opt.r2_min = cfg.get_double(s, "r2_min", 0.9);
  c.opt.rms_max = cfg.get_double(s, "rms_max", 0.05);
  c.opt.budget = cfg.get_double(s, "budget", 1e3);
  c.spread_max = cfg.get_double(s, "spread_max", 10.0);
  const std::vector<std::string> common{"case", "info", "k_lo", "k_hi"};
  auto with = [&](std::vector<std::string> v) {
    v.insert(v.end(), common.begin(), common.end());
    return v;
  };
  const auto descs = get_descriptors(cfg, s, "families", "synthetic:x=1,v=1,envelope=1",
                                     {{"synthetic", with({"x", "v", "amplitude", "envelope"})},
                                      {"concentrated", with({"decay", "theta", "kmin", "kmax", "sigma"})}});
  for (const auto& d : descs) {
    FamilyDesc f;
    f.kind = d.kind;
    f.text = d.text;
    f.only_case = int(dval(d, "case", 0));
    if (f.only_case < 0 || f.only_case > int(c.cases.size()))
      cfg.fail_at(s, "families", "'" + d.text + "': case index out of range");
    f.info = dval(d, "info", 0) != 0.0;
    if (d.values.count("k_lo")) f.k_lo = int(dval(d, "k_lo", 1));
    if (d.values.count("k_hi")) f.k_hi = int(dval(d, "k_hi", 6));
    if (d.kind == "synthetic") {
      f.synth = {dval(d, "x", 1.0), dval(d, "v", 1.0), dval(d, "amplitude", 1.0), dval(d, "envelope", 1.0), 0};
    } else {
      f.conc = {dval(d, "decay", 0.0), dval(d, "theta", 1.0), int(dval(d, "kmin", 1)), int(dval(d, "kmax", 5)),
                dval(d, "sigma", 2.0), 0};
      if (f.conc.k_max < f.conc.k_min) cfg.fail_at(s, "families", "'" + d.text + "': kmax below kmin");
    }
    c.families.push_back(f);
  }
  return c;
}

json estimate_json(const EstimateReport& r) {
  json j;
  j["case"] = r.case_name;
  j["family"] = r.family;
  j["seed"] = r.seed;
  j["predicted_s"] = num(r.gain.s);
  j["tested_s"] = num(r.gain.tested_s);
  j["regime"] = regime_name(r.gain.regime);
  j["lhs_space"] = r.gain.lhs_space;
  j["f_space"] = r.gain.f_space;
  j["g_space"] = r.gain.g_space;
  j["lhs_norm"] = num(r.lhs_norm);
  j["rhs_f"] = num(r.rhs_f);
  j["rhs_g"] = num(r.rhs_g);
  j["rhs"] = num(r.rhs);
  j["ratio"] = num(r.ratio);
  j["index"] = num(r.fit.index());
  j["fit_r2"] = num(r.fit.r2);
  j["fit_rms"] = num(r.fit.rms);
  j["fit_points"] = r.fit.points;
  j["truncated"] = r.truncated;
  j["pass"] = r.pass;
  j["notes"] = r.notes;
  return j;
}

std::string case_label(const TheoremCase& c, std::size_t idx) {
  return "case" + std::to_string(idx + 1) + "_" + theorem_name(c.id);
}

void run_verify(const VerifyCfg& c, const Common& cm, const DyadicCutoffs& cut, int threads, Report& rep) {
  struct Job {
    std::size_t ci, fi;
    int seed;
  };
  std::vector<Job> jobs;
  for (std::size_t ci = 0; ci < c.cases.size(); ++ci)
    for (std::size_t fi = 0; fi < c.families.size(); ++fi) {
      const int only = c.families[fi].only_case;
      if (only != 0 && std::size_t(only - 1) != ci) continue;
      for (int s = 0; s < c.seeds; ++s) jobs.push_back({ci, fi, s});
    }
  const Field phi = bump_phi(c.g, c.phi_radius);
  auto out = parallel_map<EstimateReport>(jobs.size(), threads, [&](std::size_t i) {
    const Job& jb = jobs[i];
    const FamilyDesc& fd = c.families[jb.fi];
    const std::uint64_t seed = derive_seed(derive_seed(cm.seed, 500 + jb.fi), std::uint64_t(jb.seed));
    TransportPair pr;
    if (fd.kind == "synthetic") {
      SyntheticSpec sp = fd.synth;
      sp.seed = seed;
      pr = make_pair(synthesize_besov_field(sp, c.g));
    } else {
      ConcentratedSpec sp = fd.conc;
      sp.seed = seed;
      pr = concentrated_family(sp, c.g);
    }
    VerifyOptions o = c.opt;
    if (fd.k_lo) o.k_lo = *fd.k_lo;
    if (fd.k_hi) o.k_hi = *fd.k_hi;
    EstimateReport r = verify_estimate(pr, c.cases[jb.ci], &phi, nullptr, cut, o);
    r.family = fd.text;
    r.seed = seed;
    return r;
  });

  json runs = json::array();
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> ratios;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& jb = jobs[i];
    const EstimateReport& r = out[i];
    const FamilyDesc& fd = c.families[jb.fi];
    const std::string tag = case_label(c.cases[jb.ci], jb.ci) + ".family" + std::to_string(jb.fi + 1) + ".seed" +
                            std::to_string(jb.seed);
    VerifyOptions o = c.opt;
    if (fd.k_hi) o.k_hi = *fd.k_hi;
    const double lo = r.gain.tested_s - o.slack;
    const bool fit_ok = r.fit.r2 >= o.r2_min || r.fit.rms <= o.rms_max;
    if (fd.info) {
      rep.info(tag + ".index", r.fit.index(), lo, {});
      rep.info(tag + ".ratio", r.ratio, {}, o.budget);
      rep.info(tag + ".fit_r2", r.fit.r2);
    } else {
      rep.bound(tag + ".index", r.fit.index(), lo, {});
      rep.bound(tag + ".ratio", r.ratio, {}, o.budget);
      rep.verdict(tag + ".fit_r2", r.fit.r2, fit_ok);
    }
    rep.info(tag + ".fit_rms", r.fit.rms);
    ratios[{jb.ci, jb.fi}].push_back(r.ratio);
    json j = estimate_json(r);
    j["tag"] = tag;
    runs.push_back(j);
    std::ostringstream os;
    write_profile_csv(os, r.lhs_profile);
    rep.csv(tag, os.str());
  }
  for (const auto& [key, v] : ratios) {
    const std::string tag = case_label(c.cases[key.first], key.first) + ".family" + std::to_string(key.second + 1);
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    const double spread = *mn > 0.0 ? *mx / *mn : kInf;
    if (c.families[key.second].info)
      rep.info(tag + ".ratio_spread", spread, {}, c.spread_max);
    else
      rep.bound(tag + ".ratio_spread", spread, {}, c.spread_max);
  }
  rep.details["runs"] = runs;
  json cs = json::array();
  for (std::size_t i = 0; i < c.cases.size(); ++i) {
    const Gain g = predicted_gain(c.cases[i]);
    cs.push_back({{"label", case_label(c.cases[i], i)},
                  {"theorem", theorem_name(c.cases[i].id)},
                  {"predicted_s", num(g.s)},
                  {"tested_s", num(g.tested_s)},
                  {"regime", regime_name(g.regime)},
                  {"lhs_space", g.lhs_space}});
  }
  rep.details["cases"] = cs;
}

// ---------------------------------------------------------------- counterexample

struct CounterCfg {
  GridSpec g;
  std::vector<int> ns;
  double tol_identity = 1e-8, slope_tol = 0.2, mass_tol = 0.1, local_factor = 2.0;
  GridSpec scaling_grid;
  std::vector<int> Rs;
  double sigma_x = 0.8, sigma_v = 1.0, phi_radius = 2.0, exp_tol = 0.05;
  std::vector<ScalingNorms> configs;
};

CounterCfg read_counter(const Config& cfg) {
  const std::string s = "counterexample";
  CounterCfg c;
  c.g = read_grid(cfg, s, 1, 512, 1.0);
  c.ns = cfg.get_ints(s, "ns", {4, 8, 16});
  if (c.ns.size() < 2) cfg.fail_at(s, "ns", "needs at least two values");
  for (int n : c.ns)
    if (n < 1 || 2 * n > c.g.n / 4) cfg.fail_at(s, "ns", "n must be positive and well below the grid Nyquist");
  c.tol_identity = cfg.get_double(s, "tol_identity", c.tol_identity);
  c.slope_tol = cfg.get_double(s, "slope_tol", c.slope_tol);
  c.mass_tol = cfg.get_double(s, "mass_tol", c.mass_tol);
  c.local_factor = cfg.get_double(s, "local_factor", c.local_factor);
  c.scaling_grid =
      GridSpec{1, cfg.get_int(s, "scaling_n", 512), 2.0 * kPi * cfg.get_double(s, "scaling_periods", 16.0)};
  try {
    c.scaling_grid.validate();
  } catch (const Error& e) {
    cfg.fail_at(s, "scaling_n", e.what());
  }
  c.Rs = cfg.get_ints(s, "Rs", {1, 2, 4, 8});
  for (int R : c.Rs)
    if (R < 1 || (R & (R - 1)) != 0) cfg.fail_at(s, "Rs", "ratios must be powers of two");
  if (c.Rs.size() < 2) cfg.fail_at(s, "Rs", "needs at least two ratios");
  c.sigma_x = cfg.get_double(s, "sigma_x", 0.8);
  c.sigma_v = cfg.get_double(s, "sigma_v", 1.0);
  c.phi_radius = cfg.get_double(s, "phi_radius", 2.0);
  c.exp_tol = cfg.get_double(s, "exp_tol", 0.05);
  const std::vector<std::string> keys{"p", "r0", "p0", "r1", "p1"};
  for (const auto& d : get_descriptors(cfg, s, "scaling_configs",
                                       "norms:p=2,r0=1,p0=2,r1=1,p1=2 | norms:p=1,r0=2,p0=2,r1=2,p1=2",
                                       {{"norms", keys}})) {
    ScalingNorms nm{dval(d, "p", 2.0), dval(d, "r0", 1.0), dval(d, "p0", 2.0), dval(d, "r1", 1.0), dval(d, "p1", 2.0)};
    for (double e : {nm.p, nm.r0, nm.p0, nm.r1, nm.p1})
      if (!(e >= 1.0)) cfg.fail_at(s, "scaling_configs", "'" + d.text + "': exponents must be >= 1");
    c.configs.push_back(nm);
  }
  return c;
}

void run_counter(const CounterCfg& c, const DyadicCutoffs&, int threads, Report& rep) {
  struct OscOut {
    double residual = 0.0;
    OscillatoryDiagnostics d;
    double orlicz = 0.0;
  };
  auto osc = parallel_map<OscOut>(c.ns.size(), threads, [&](std::size_t i) {
    const auto of = oscillatory_counterexample(c.ns[i], c.g);
    Box K{{{-1.0, 1.0}}, {{-kPi / 2.0, kPi / 2.0}}};
    return OscOut{of.identity_residual, oscillatory_diagnostics(of, c.ns[i]), orlicz_llogl_norm(of.f, &K)};
  });
  std::ostringstream os;
  os << "n,identity_residual,average_l1,smooth_average_l1,concentration,local_l1,orlicz_llogl\n";
  std::vector<double> xs, avg, smooth;
  for (std::size_t i = 0; i < c.ns.size(); ++i) {
    const auto& o = osc[i];
    const std::string tag = "n=" + std::to_string(c.ns[i]);
    rep.bound("oscillatory.identity." + tag, o.residual, {}, c.tol_identity);
    os << c.ns[i] << "," << fmt(o.residual) << "," << fmt(o.d.average_l1) << "," << fmt(o.d.smooth_average_l1) << ","
       << fmt(o.d.concentration) << "," << fmt(o.d.local_l1) << "," << fmt(o.orlicz) << "\n";
    xs.push_back(std::log2(double(c.ns[i])));
    avg.push_back(o.d.average_l1);
    smooth.push_back(o.d.smooth_average_l1);
    rep.info("oscillatory.orlicz_llogl." + tag, o.orlicz);
  }
  rep.csv("oscillatory", os.str());
  rep.bound("oscillatory.average_decay_slope", fit_log2(xs, avg).slope, -1.0 - c.slope_tol, -1.0 + c.slope_tol);
  rep.info("oscillatory.smooth_average_decay_slope", fit_log2(xs, smooth).slope);
  double drift = 0.0, lmin = kInf, lmax = 0.0;
  for (const auto& o : osc) {
    drift = std::max(drift, std::abs(o.d.concentration / osc.front().d.concentration - 1.0));
    lmin = std::min(lmin, o.d.local_l1);
    lmax = std::max(lmax, o.d.local_l1);
  }
  rep.bound("oscillatory.concentration_drift", drift, {}, c.mass_tol);
  rep.bound("oscillatory.concentration_min", osc.front().d.concentration, 1e-3, {});
  rep.bound("oscillatory.local_l1_spread", lmax / lmin, {}, c.local_factor);

  const TransportPair base = make_pair(gaussian_xv(c.scaling_grid, c.sigma_x, c.sigma_v));
  const Field phi = bump_phi(c.scaling_grid, c.phi_radius);
  auto sweeps = parallel_map<ScalingExponents>(c.configs.size(), threads,
                                               [&](std::size_t i) { return scaling_sweep(base, phi, c.Rs, c.configs[i]); });
  std::ostringstream ss;
  ss << "config,R,lhs,f_norm,g_norm\n";
  for (std::size_t i = 0; i < c.configs.size(); ++i) {
    const auto& nm = c.configs[i];
    const auto& sw = sweeps[i];
    const std::string tag = "scaling.config" + std::to_string(i + 1);
    for (const auto& r : sw.rows)
      ss << i + 1 << "," << r.R << "," << fmt(r.lhs) << "," << fmt(r.f_norm) << "," << fmt(r.g_norm) << "\n";
    const double want_l = recip(nm.p), want_f = recip(nm.r0), want_g = recip(nm.r1) - 1.0;
    const double want_r = want_l - want_f;
    rep.bound(tag + ".lhs_exponent", sw.lhs_slope, want_l - c.exp_tol, want_l + c.exp_tol);
    rep.bound(tag + ".f_exponent", sw.f_slope, want_f - c.exp_tol, want_f + c.exp_tol);
    rep.bound(tag + ".g_exponent", sw.g_slope, want_g - c.exp_tol, want_g + c.exp_tol);
    rep.bound(tag + ".ratio_exponent", sw.ratio_slope, want_r - c.exp_tol, want_r + c.exp_tol);
    // With p < r0 the ratio grows, so no estimate of that shape can hold.
    if (nm.p < nm.r0) rep.bound(tag + ".ratio_grows", sw.ratio_slope, c.exp_tol, {});
  }
  rep.csv("scaling", ss.str());
}

// ---------------------------------------------------------------- lambda strip

struct StripCfg {
  StripGrid sg;
  std::vector<double> lambdas, alphas;
  double q = 2.0, exp_tol = 0.15, log_alpha = 0.5, log_spread_max = 2.0;
};

StripCfg read_strip(const Config& cfg) {
  const std::string s = "lambda_strip";
  StripCfg c;
  c.sg.n = cfg.get_int(s, "n", 48);
  c.sg.period = 2.0 * kPi * cfg.get_double(s, "periods", 1.0);
  if (c.sg.n < 8 || c.sg.n % 2 != 0) cfg.fail_at(s, "n", "must be an even integer >= 8");
  c.sg.chi_half_width = cfg.get_double(s, "chi_half_width", c.sg.chi_half_width);
  c.sg.chi_edge = cfg.get_double(s, "chi_edge", c.sg.chi_edge);
  c.sg.rho_plateau = cfg.get_double(s, "rho_plateau", c.sg.rho_plateau);
  if (!(c.sg.rho_plateau > 0.0 && c.sg.rho_plateau < 1.0)) cfg.fail_at(s, "rho_plateau", "must lie in (0, 1)");
  c.lambdas = cfg.get_doubles(s, "lambdas", {2, 4, 8, 16});
  if (c.lambdas.size() < 2) cfg.fail_at(s, "lambdas", "needs at least two values");
  for (double l : c.lambdas)
    if (!(l >= 1.0)) cfg.fail_at(s, "lambdas", "values must be >= 1");
  c.alphas = cfg.get_doubles(s, "alphas", {0.0, 1.0});
  c.q = cfg.get_double(s, "q", 2.0);
  c.exp_tol = cfg.get_double(s, "exp_tol", 0.15);
  c.log_alpha = cfg.get_double(s, "log_alpha", 0.5);
  c.log_spread_max = cfg.get_double(s, "log_spread_max", 2.0);
  return c;
}

void run_strip(const StripCfg& c, const DyadicCutoffs& cut, int threads, Report& rep) {
  std::vector<double> alphas = c.alphas;
  alphas.push_back(c.log_alpha);
  auto out = parallel_map<StripReport>(alphas.size(), threads, [&](std::size_t i) {
    return lambda_strip_decay(alphas[i], c.q, c.lambdas, c.sg, cut);
  });
  std::ostringstream os;
  os << "alpha,lambda,norm,log_corrected\n";
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const auto& r = out[i];
    for (std::size_t j = 0; j < r.lambdas.size(); ++j)
      os << fmt(alphas[i]) << "," << fmt(r.lambdas[j]) << "," << fmt(r.norms[j]) << "," << fmt(r.log_corrected[j])
         << "\n";
    const std::string tag = "alpha=" + fmt(alphas[i]);
    if (i + 1 < alphas.size()) {
      rep.bound("strip.slope." + tag, r.slope, r.predicted - c.exp_tol, r.predicted + c.exp_tol);
    } else {
      rep.info("strip.slope." + tag, r.slope);
      rep.bound("strip.log_corrected_spread." + tag, r.log_spread, {}, c.log_spread_max);
    }
    rep.info("strip.fit_r2." + tag, r.r2);
  }
  rep.csv("lambda_strip", os.str());
}

// ---------------------------------------------------------------- driver

struct AllSettings {
  Common common;
  std::string out_dir;
  IdentitiesCfg identities;
  NormsCfg norms;
  DispersiveCfg dispersive;
  VerifyCfg verify;
  CounterCfg counter;
  StripCfg strip;
};

AllSettings read_all(const Config& cfg) {
  cfg.check_known(known_config_keys());
  AllSettings a;
  a.common.seed = cfg.get_u64("", "seed", 1);
  a.common.cutoff_width = cfg.get_double("", "cutoff_width", 0.125);
  if (!(a.common.cutoff_width > 0.0 && a.common.cutoff_width < 0.25))
    cfg.fail_at("", "cutoff_width", "must lie in (0, 1/4)");
  a.out_dir = cfg.get_string("", "out_dir", "");
  a.identities = read_identities(cfg);
  a.norms = read_norms(cfg);
  a.dispersive = read_dispersive(cfg);
  a.verify = read_verify(cfg);
  a.counter = read_counter(cfg);
  a.strip = read_strip(cfg);
  return a;
}

json common_json(const Common& cm) { return json{{"seed", cm.seed}, {"cutoff_width", cm.cutoff_width}}; }

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"identities", "norms", "dispersive", "verify", "counterexample",
                                              "lambda-strip"};
  return names;
}

std::map<std::string, std::vector<std::string>> known_config_keys() {
  return {
      {"", {"seed", "cutoff_width", "out_dir"}},
      {"identities",
       {"n", "periods", "band_fraction", "x_index", "v_index", "envelope", "transfer_ts", "transfer_delta", "decomp_t",
        "decomp_delta", "local_t", "local_delta", "local_info_t", "local_info_delta", "duhamel_t", "duhamel_nodes",
        "order_n", "order_nodes", "phi_sigma", "control_j", "tol_partition", "tol_transfer", "tol_decomp", "tol_repr",
        "tol_local", "negative_min", "tol_bony", "tol_support", "tol_duhamel", "order_tol"}},
      {"norms",
       {"n", "periods", "seeds", "x_index", "v_index", "fit_lo", "fit_hi", "index_tol", "chl_s", "bernstein_n",
        "bernstein_periods", "bernstein_ks", "bernstein_spread", "bernstein_spikes", "phi_sigma", "product_s", "product_max",
        "spread_max"}},
      {"dispersive",
       {"n", "periods", "sigma_x", "sigma_v", "ts", "ps", "slope_tol", "tol_l1", "a_alphas", "a_ps", "a_ts",
        "a_slope_tol", "bb_n", "bb_periods", "bb_ks", "bb_ts", "bb_alpha", "budget", "phi_radius"}},
      {"verify",
       {"n", "periods", "cases", "families", "seeds", "phi_radius", "k_lo", "k_hi", "slack", "r2_min", "rms_max",
        "budget", "spread_max"}},
      {"counterexample",
       {"n", "periods", "ns", "tol_identity", "slope_tol", "mass_tol", "local_factor", "scaling_n", "scaling_periods",
        "Rs", "sigma_x", "sigma_v", "phi_radius", "exp_tol", "scaling_configs"}},
      {"lambda_strip",
       {"n", "periods", "chi_half_width", "chi_edge", "rho_plateau", "lambdas", "alphas", "q", "exp_tol", "log_alpha",
        "log_spread_max"}},
  };
}

int run_experiment(const std::string& subcommand, const Config& cfg, const RunOptions& opt,
                   std::vector<SuiteOutcome>* outcomes) {
  std::vector<std::string> suites;
  if (subcommand == "all")
    suites = suite_names();
  else if (std::find(suite_names().begin(), suite_names().end(), subcommand) != suite_names().end())
    suites = {subcommand};
  else
    fail(ErrorCode::usage, "unknown subcommand '" + subcommand + "'");

  AllSettings a = read_all(cfg);
  if (opt.seed) a.common.seed = *opt.seed;
  const std::string out_dir = !opt.out_dir.empty() ? opt.out_dir : (!a.out_dir.empty() ? a.out_dir : "out");
  const DyadicCutoffs cut(a.common.cutoff_width);
  const int threads = std::max(1, opt.threads);
  auto log = [&](const std::string& m) {
    if (opt.log) opt.log(m);
  };

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  require(!ec, ErrorCode::io, out_dir + ": cannot create output directory");

  int exit_code = 0;
  for (const auto& name : suites) {
    log("running " + name);
    Report rep(name);
    json settings = common_json(a.common);
    if (name == "identities") {
      settings["grid"] = grid_json(a.identities.g);
      run_identities(a.identities, a.common, cut, rep);
    } else if (name == "norms") {
      settings["grid"] = grid_json(a.norms.g);
      settings["seeds"] = a.norms.seeds;
      run_norms(a.norms, a.common, cut, threads, rep);
    } else if (name == "dispersive") {
      settings["grid"] = grid_json(a.dispersive.g);
      run_dispersive(a.dispersive, a.common, cut, threads, rep);
    } else if (name == "verify") {
      settings["grid"] = grid_json(a.verify.g);
      settings["seeds"] = a.verify.seeds;
      settings["slack"] = a.verify.opt.slack;
      settings["budget"] = a.verify.opt.budget;
      json fams = json::array();
      for (const auto& f : a.verify.families) fams.push_back(f.text);
      settings["families"] = fams;
      run_verify(a.verify, a.common, cut, threads, rep);
    } else if (name == "counterexample") {
      settings["grid"] = grid_json(a.counter.g);
      settings["scaling_grid"] = grid_json(a.counter.scaling_grid);
      run_counter(a.counter, cut, threads, rep);
    } else {
      settings["grid"] = json{{"dim", 2}, {"n", a.strip.sg.n}, {"period", a.strip.sg.period}};
      settings["q"] = a.strip.q;
      run_strip(a.strip, cut, threads, rep);
    }

    std::string stem = name;
    std::replace(stem.begin(), stem.end(), '-', '_');
    write_text(fs::path(out_dir) / (stem + ".json"), rep.to_json(settings).dump(2) + "\n");
    const fs::path dir = fs::path(out_dir) / stem;
    fs::create_directories(dir, ec);
    require(!ec, ErrorCode::io, dir.string() + ": cannot create directory");
    write_text(dir / "checks.csv", rep.checks_csv());
    for (const auto& [csv_name, body] : rep.csvs()) write_text(dir / (csv_name + ".csv"), body);

    const SuiteOutcome o = rep.outcome();
    log(name + ": " + std::to_string(o.verdicts - o.failed) + "/" + std::to_string(o.verdicts) + " verdicts pass");
    for (const auto& f : o.failed_checks) log("  failed: " + f);
    if (!o.pass) exit_code = 1;
    if (outcomes) outcomes->push_back(o);
  }
  return exit_code;
}

}  // namespace vavg
