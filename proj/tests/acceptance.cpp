// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Acceptance run: executes every suite of a config, then re-reads the JSON
// reports and applies the release thresholds, which are fixed here and do not
// follow the tolerances in the config. Prints one PASS/FAIL line per
// criterion; exits 1 if any fails.

#include <boost/rational.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vavg/averaging.hpp"
#include "vavg/config.hpp"
#include "vavg/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using Q = boost::rational<long long>;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::vector<std::string> problems;
  void need(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double num(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
  }
  return NAN;
}

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", x);
  return b;
}

// Check values by name; missing names are reported as problems.
class Checks {
 public:
  explicit Checks(const json& report) {
    for (const auto& c : report.at("checks")) values_[c.at("name").get<std::string>()] = num(c.at("value"));
  }
  bool has(const std::string& n) const { return values_.count(n) != 0; }
  double get(Criterion& cr, const std::string& n) const {
    auto it = values_.find(n);
    if (it == values_.end()) {
      cr.problems.push_back("missing check " + n);
      return NAN;
    }
    return it->second;
  }
  void at_most(Criterion& cr, const std::string& n, double hi) const {
    const double v = get(cr, n);
    if (has(n)) cr.need(v <= hi, n + " = " + fmt(v) + " > " + fmt(hi));
  }
  void at_least(Criterion& cr, const std::string& n, double lo) const {
    const double v = get(cr, n);
    if (has(n)) cr.need(v >= lo, n + " = " + fmt(v) + " < " + fmt(lo));
  }
  void within(Criterion& cr, const std::string& n, double target, double tol) const {
    const double v = get(cr, n);
    if (has(n)) cr.need(std::abs(v - target) <= tol, n + " = " + fmt(v) + " outside " + fmt(target) + " +- " + fmt(tol));
  }

 private:
  std::map<std::string, double> values_;
};

void grid_is(Criterion& cr, const json& rep, int dim, int n) {
  const auto& g = rep.at("settings").at("grid");
  cr.need(g.at("dim") == dim && g.at("n") == n,
          "grid is D=" + g.at("dim").dump() + ", N=" + g.at("n").dump() + "; expected D=" + std::to_string(dim) +
              ", N=" + std::to_string(n));
}

void time_limit(Criterion& cr, double seconds, double limit) {
  cr.need(seconds <= limit, "took " + fmt(seconds) + " s, limit " + fmt(limit) + " s");
}

// ---- 3: exact gain arithmetic ----------------------------------------------------

vavg::GainParams<Q> gp(Q alpha, Q beta, Q a, Q b, Q ip, Q iq, Q ir, int dim) {
  vavg::GainParams<Q> g;
  g.alpha = alpha;
  g.beta = beta;
  g.a = a;
  g.b = b;
  g.ip = ip;
  g.iq = iq;
  g.ir = ir;
  g.dim = dim;
  return g;
}

void gain_arithmetic(Criterion& cr) {
  using vavg::TheoremId;
  const auto l2 = vavg::gain_formula(TheoremId::CLASSICAL, gp(0, 0, 0, 0, Q(1, 2), Q(1, 2), Q(1, 2), 1));
  cr.need(l2.s == Q(1, 2), "L2 gain at the origin is " + fmt(boost::rational_cast<double>(l2.s)));

  const Q alphas[] = {Q(0), Q(1, 4), Q(1, 2), Q(1), Q(2)};
  const Q betas[] = {Q(-1), Q(0), Q(1, 4), Q(1, 2), Q(3, 4)};
  int n2 = 0, n1 = 0;
  for (Q al : alphas)
    for (Q be : betas)
      for (Q a : {Q(0), Q(1, 2)})
        for (Q b : {Q(0), Q(-1, 3)}) {
          const auto g = gp(al, be, a, b, Q(1, 2), Q(1, 2), Q(1, 2), 1);
          const auto m = vavg::gain_formula(TheoremId::MAIN, g), c = vavg::gain_formula(TheoremId::CLASSICAL, g);
          ++n2;
          cr.need(m.s == c.s && m.regime == c.regime, "general gain differs from the L2 gain at r = 2");
        }
  for (Q al : alphas)
    for (Q be : betas)
      for (Q ip : {Q(1), Q(5, 6), Q(3, 4), Q(1, 2)})
        for (Q a : {Q(0)}) {
          const auto g = gp(al, be, a, Q(1, 5), ip, Q(1, 2), Q(1), 1);
          const auto m = vavg::gain_formula(TheoremId::MAIN, g), p = vavg::gain_formula(TheoremId::P2, g);
          ++n1;
          cr.need(m.s == p.s && m.regime == p.regime, "general gain differs from the mixed L1 gain at r = 1");
        }
  cr.need(n2 == 100 && n1 == 100, "parameter grids are not 100 points");

  vavg::GainParams<Q> m2;
  m2.ir0 = m2.ip0 = m2.iq0 = m2.ir1 = m2.ip1 = m2.iq1 = Q(1, 2);
  const auto f2 = vavg::gain_formula(TheoremId::MAIN2, m2);
  cr.need(f2.theta == Q(1, 2) && f2.s == Q(1, 2), "interpolation gain at the all-2 point is not theta = s = 1/2");

  for (Q al : alphas)
    for (Q be : {Q(-1), Q(0), Q(1, 4)}) {
      const auto [e1, e2] = vavg::ph_exponents(gp(al, be, 0, 0, Q(1), Q(1, 2), Q(1), 1));
      cr.need(e1 + e2 == Q(1), "homogeneous exponents do not sum to 1");
    }
}

// ---- 4: estimate sweep -------------------------------------------------------------

struct Target {
  std::string label;
  double s;
};

void estimate_sweep(Criterion& cr, const json& rep, const vavg::Config& cfg) {
  // Which configured cases are the ones the release criterion names.
  const auto cases = cfg.get_cases("verify", "cases", 1);
  std::map<int, Target> targets;  // 1-based case position
  bool classical = false, p0 = false, p05 = false;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    const std::string label = "case" + std::to_string(i + 1) + "_" + vavg::theorem_name(c.id);
    if (c.id == vavg::TheoremId::CLASSICAL && c.alpha == 1.0 && c.beta == 0.0 && c.a == 0.0 && c.b == 0.0) {
      targets[int(i + 1)] = {label, 0.75};
      classical = true;
    }
    if (c.id == vavg::TheoremId::P && c.p == 1.0 && c.alpha == 0.0 && (c.beta == 0.0 || c.beta == 0.5)) {
      targets[int(i + 1)] = {label, c.alpha / (1.0 + c.alpha - c.beta)};
      (c.beta == 0.0 ? p0 : p05) = true;
    }
  }
  cr.need(classical && p0 && p05, "config lacks one of the L2 and L1 cases");

  // Gated families are the synthetic ones; families flagged info are diagnostics.
  std::map<std::string, std::vector<const json*>> groups;
  for (const auto& r : rep.at("details").at("runs")) {
    const std::string fam = r.at("family");
    if (fam.rfind("synthetic", 0) != 0 || fam.find("info=1") != std::string::npos) continue;
    const std::string tag = r.at("tag");
    const int idx = std::atoi(tag.c_str() + 4);
    if (!targets.count(idx)) continue;
    groups[targets[idx].label + " " + fam].push_back(&r);
  }
  cr.need(!groups.empty(), "no synthetic runs for the named cases");
  for (const auto& [key, runs] : groups) {
    const int idx = std::atoi(key.c_str() + 4);
    const double s = targets[idx].s;
    cr.need(runs.size() >= 5, key + ": only " + std::to_string(runs.size()) + " seeds");
    double lo = INFINITY, hi = 0.0;
    for (const json* r : runs) {
      const double index = num(r->at("index")), r2 = num(r->at("fit_r2")), ratio = num(r->at("ratio"));
      const std::string tag = r->at("tag");
      cr.need(index >= s - 0.2, tag + ": index " + fmt(index) + " < " + fmt(s - 0.2));
      cr.need(r2 >= 0.9, tag + ": fit r2 " + fmt(r2) + " < 0.9");
      cr.need(std::isfinite(ratio) && ratio > 0.0, tag + ": ratio " + fmt(ratio));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    cr.need(hi / lo <= 10.0, key + ": ratio spread " + fmt(hi / lo) + " > 10");
  }
}

// ---- 5: counterexamples -------------------------------------------------------------

std::vector<std::map<std::string, double>> scaling_configs(const vavg::Config& cfg) {
  std::vector<std::map<std::string, double>> out;
  std::string text = cfg.get_string("counterexample", "scaling_configs", "norms:p=2,r0=1,p0=2,r1=1,p1=2");
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, '|')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) continue;
    std::map<std::string, double> kv;
    std::stringstream fields(item.substr(colon + 1));
    std::string f;
    while (std::getline(fields, f, ',')) {
      const auto eq = f.find('=');
      if (eq == std::string::npos) continue;
      std::string k = f.substr(0, eq);
      k.erase(0, k.find_first_not_of(' '));
      k.erase(k.find_last_not_of(' ') + 1);
      kv[k] = vavg::parse_exponent(f.substr(eq + 1));
    }
    out.push_back(kv);
  }
  return out;
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::map<std::string, fs::path> fa, fb;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) fa[fs::relative(e.path(), a).string()] = e.path();
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) fb[fs::relative(e.path(), b).string()] = e.path();
  if (fa.size() != fb.size()) {
    why = "file counts differ (" + std::to_string(fa.size()) + " vs " + std::to_string(fb.size()) + ")";
    return false;
  }
  for (const auto& [rel, p] : fa) {
    auto it = fb.find(rel);
    if (it == fb.end()) {
      why = rel + " missing in rerun";
      return false;
    }
    if (slurp(p) != slurp(it->second)) {
      why = rel + " differs";
      return false;
    }
  }
  why = std::to_string(fa.size()) + " files identical";
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance run"};
  std::string config_path, work = "acceptance_work";
  int threads = 1;
  app.add_option("--config", config_path, "experiment config")->required();
  app.add_option("--work", work, "scratch directory");
  app.add_option("--threads", threads, "worker threads");
  CLI11_PARSE(app, argc, argv);

  const vavg::Config cfg = vavg::Config::load(config_path);
  const fs::path first = fs::path(work) / "run1", second = fs::path(work) / "run2";
  fs::remove_all(work);

  auto log = [](const std::string& line) { std::cerr << "  " << line << "\n"; };
  std::map<std::string, double> seconds;
  std::map<std::string, int> codes;
  for (const auto& suite : vavg::suite_names()) {
    vavg::RunOptions opt;
    opt.out_dir = first.string();
    opt.threads = threads;
    opt.log = log;
    const auto t0 = std::chrono::steady_clock::now();
    codes[suite] = vavg::run_experiment(suite, cfg, opt);
    seconds[suite] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  auto report = [&](const std::string& stem) { return json::parse(slurp(first / (stem + ".json"))); };

  std::vector<Criterion> crit;

  {
    Criterion c{1, "exact identity suite", {}};
    const json r = report("identities");
    const Checks ck(r);
    time_limit(c, seconds["identities"], 60.0);
    grid_is(c, r, 1, 256);
    ck.at_most(c, "partition.radial_max_error", 1e-12);
    for (const char* t : {"1", "2"})
      for (const char* b : {"dyadic", "low"}) ck.at_most(c, std::string("x_to_v.") + b + ".t=" + t, 1e-10);
    for (const char* rho : {"dirac", "smooth"})
      for (const char* form : {"physical", "fourier"})
        ck.at_most(c, std::string("decomposition.") + rho + "." + form, 1e-8);
    for (const char* id : {"a_block", "b_block", "a_low", "b_low"}) ck.at_most(c, std::string("localization.") + id, 1e-8);
    ck.at_least(c, "localization.negative_control", 1e-2);
    ck.at_most(c, "bony.reconstruction", 1e-10);
    ck.at_most(c, "bony.support_low_block", 1e-10);
    ck.at_most(c, "bony.support_far_blocks", 1e-10);
    crit.push_back(c);
  }
  {
    Criterion c{2, "dispersive exponents", {}};
    const json r = report("dispersive");
    const Checks ck(r);
    time_limit(c, seconds["dispersive"], 60.0);
    c.need(r.at("settings").at("grid").at("dim") == 1, "dispersive grid is not one-dimensional");
    ck.at_most(c, "dispersive.l1_invariance", 1e-10);
    for (auto [name, ip] : {std::pair{"2", 0.5}, {"4", 0.25}, {"inf", 0.0}})
      ck.within(c, std::string("dispersive.slope.p=") + name, -(1.0 - ip), 0.15);
    crit.push_back(c);
  }
  {
    Criterion c{3, "gain formula arithmetic", {}};
    const auto t0 = std::chrono::steady_clock::now();
    gain_arithmetic(c);
    time_limit(c, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1.0);
    crit.push_back(c);
  }
  {
    Criterion c{4, "estimate sweep", {}};
    const json r = report("verify");
    time_limit(c, seconds["verify"], 600.0);
    grid_is(c, r, 1, 512);
    estimate_sweep(c, r, cfg);
    crit.push_back(c);
  }
  {
    Criterion c{5, "counterexamples", {}};
    const json r = report("counterexample");
    const Checks ck(r);
    time_limit(c, seconds["counterexample"], 120.0);
    for (const char* n : {"4", "8", "16"}) ck.at_most(c, std::string("oscillatory.identity.n=") + n, 1e-8);
    ck.within(c, "oscillatory.average_decay_slope", -1.0, 0.2);
    ck.at_most(c, "oscillatory.concentration_drift", 0.1);
    const auto confs = scaling_configs(cfg);
    c.need(!confs.empty(), "no scaling configurations");
    bool forcing_case = false;
    for (std::size_t i = 0; i < confs.size(); ++i) {
      const double p = confs[i].count("p") ? confs[i].at("p") : 2.0;
      const double r0 = confs[i].count("r0") ? confs[i].at("r0") : 1.0;
      const double expect = 1.0 / p - 1.0 / r0;
      const std::string n = "scaling.config" + std::to_string(i + 1) + ".ratio_exponent";
      ck.within(c, n, expect, 0.05);
      if (p < r0) {
        forcing_case = true;
        const double v = ck.get(c, n);
        c.need(v > 0.0, n + " does not grow with the scale");
      }
    }
    c.need(forcing_case, "no configuration with p < r0");
    crit.push_back(c);
  }
  {
    Criterion c{6, "lambda-strip decay", {}};
    const json r = report("lambda_strip");
    const Checks ck(r);
    time_limit(c, seconds["lambda-strip"], 300.0);
    grid_is(c, r, 2, 48);
    ck.within(c, "strip.slope.alpha=0", -0.5, 0.15);
    ck.within(c, "strip.slope.alpha=1", -1.0, 0.15);
    const double spread = ck.get(c, "strip.log_corrected_spread.alpha=0.5");
    c.need(std::isfinite(spread) && spread <= 2.0, "log-corrected spread " + fmt(spread) + " exceeds 2");
    crit.push_back(c);
  }
  {
    Criterion c{7, "determinism", {}};
    vavg::RunOptions opt;
    opt.out_dir = second.string();
    opt.threads = threads;
    vavg::run_experiment("all", cfg, opt);
    std::string why;
    c.need(same_tree(first, second, why), why);
    if (c.problems.empty()) c.title += " (" + why + ")";
    crit.push_back(c);
  }

  int failed = 0;
  for (const auto& c : crit) {
    const bool ok = c.problems.empty();
    failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title;
    if (c.id != 3 && c.id != 7) {
      static const std::map<int, std::string> suite{{1, "identities"}, {2, "dispersive"}, {4, "verify"},
                                                    {5, "counterexample"}, {6, "lambda-strip"}};
      std::cout << " [" << fmt(seconds[suite.at(c.id)]) << " s]";
    }
    std::cout << "\n";
    for (const auto& p : c.problems) std::cout << "        " << p << "\n";
  }
  for (const auto& [s, code] : codes)
    if (code != 0) std::cout << "note: suite " << s << " reported failing verdicts\n";
  std::cout << (crit.size() - failed) << "/" << crit.size() << " criteria pass\n";
  return failed ? 1 : 0;
}
