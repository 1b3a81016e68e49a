// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "vavg/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace vavg {

void GridSpec::validate() const {
  require(dim == 1 || dim == 2, ErrorCode::parameter, "grid dim must be 1 or 2");
  require(n >= 2 && n % 2 == 0, ErrorCode::parameter, "grid n must be a positive even integer");
  require(std::isfinite(period) && period > 0.0, ErrorCode::parameter, "grid period must be positive");
}

double GridSpec::radial_nyquist() const { return axis_nyquist() * std::sqrt(double(dim)); }

std::size_t GridSpec::group_count() const {
  std::size_t c = 1;
  for (int d = 0; d < dim; ++d) c *= std::size_t(n);
  return c;
}

const char* layout_name(Layout l) {
  switch (l) {
    case Layout::xv: return "xv";
    case Layout::x_only: return "x";
    case Layout::v_only: return "v";
  }
  return "xv";
}

Layout layout_from_name(const std::string& s) {
  if (s == "xv") return Layout::xv;
  if (s == "x") return Layout::x_only;
  if (s == "v") return Layout::v_only;
  fail(ErrorCode::io, "unknown layout '" + s + "'");
}

Field::Field(const GridSpec& g, Layout layout) : grid_(g), layout_(layout) {
  g.validate();
  data_.assign(x_count() * v_count(), cplx(0.0, 0.0));
}

Field Field::zeros_like() const {
  Field z(grid_, layout_);
  z.space_ = space_;
  return z;
}

bool Field::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& c) { return c == cplx(0.0, 0.0); });
}

static void check_compatible(const Field& a, const Field& b) {
  require(a.grid() == b.grid() && a.layout() == b.layout() && a.space() == b.space(), ErrorCode::usage,
          "field shapes or spaces differ");
}

Field& Field::operator+=(const Field& o) {
  check_compatible(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  check_compatible(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Field& Field::operator*=(cplx a) {
  for (auto& c : data_) c *= a;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(cplx a, Field f) { return f *= a; }

int lattice_index(const GridSpec& g, int i) { return i < g.n / 2 ? i : i - g.n; }

double node_coord(const GridSpec& g, int i) { return lattice_index(g, i) * g.spacing(); }

double node_freq(const GridSpec& g, int i) { return lattice_index(g, i) * g.lattice_step(); }

void group_coords(const GridSpec& g, std::size_t flat, std::span<double> out) {
  for (int d = g.dim - 1; d >= 0; --d) {
    out[d] = node_coord(g, int(flat % g.n));
    flat /= g.n;
  }
}

void group_freqs(const GridSpec& g, std::size_t flat, std::span<double> out) {
  for (int d = g.dim - 1; d >= 0; --d) {
    out[d] = node_freq(g, int(flat % g.n));
    flat /= g.n;
  }
}

Field sample_function(const PointRule& rule, const GridSpec& g, Layout layout) {
  Field f(g, layout);
  std::array<double, 2> xb{}, vb{};
  std::span<const double> xs(xb.data(), f.has_x() ? g.dim : 0);
  std::span<const double> vs(vb.data(), f.has_v() ? g.dim : 0);
  for (std::size_t ix = 0; ix < f.x_count(); ++ix) {
    if (f.has_x()) group_coords(g, ix, {xb.data(), std::size_t(g.dim)});
    for (std::size_t iv = 0; iv < f.v_count(); ++iv) {
      if (f.has_v()) group_coords(g, iv, {vb.data(), std::size_t(g.dim)});
      f.at(ix, iv) = rule(xs, vs);
    }
  }
  return f;
}

Field sample_group(const GroupRule& rule, const GridSpec& g, Layout layout) {
  require(layout != Layout::xv, ErrorCode::usage, "sample_group needs a single-group layout");
  Field f(g, layout);
  std::array<double, 2> yb{};
  for (std::size_t i = 0; i < f.size(); ++i) {
    group_coords(g, i, {yb.data(), std::size_t(g.dim)});
    f.data()[i] = rule({yb.data(), std::size_t(g.dim)});
  }
  return f;
}

// ---- FFT backend -----------------------------------------------------------

namespace {

struct PlanKey {
  int rank, n, howmany, stride, dist, sign;
  auto tie() const { return std::tie(rank, n, howmany, stride, dist, sign); }
  bool operator<(const PlanKey& o) const { return tie() < o.tie(); }
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& kv : plans_) fftw_destroy_plan(kv.second);
  }
  fftw_plan get(const PlanKey& k, fftw_complex* buf) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(k);
    if (it != plans_.end()) return it->second;
    int dims[2] = {k.n, k.n};
    // ESTIMATE never touches the buffer and picks the same algorithm every run.
    fftw_plan p = fftw_plan_many_dft(k.rank, dims, k.howmany, buf, nullptr, k.stride, k.dist, buf, nullptr,
                                     k.stride, k.dist, k.sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    require(p != nullptr, ErrorCode::numeric, "fftw planning failed");
    plans_.emplace(k, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void fft_group(Field& f, bool x_group, int sign) {
  const GridSpec& g = f.grid();
  const int nx = int(f.x_count()), nv = int(f.v_count());
  PlanKey key{g.dim, g.n, x_group ? nv : nx, x_group ? nv : 1, x_group ? 1 : nv, sign};
  auto* buf = reinterpret_cast<fftw_complex*>(f.data().data());
  fftw_plan p = plan_cache().get(key, buf);
  fftw_execute_dft(p, buf, buf);
}

}  // namespace

void transform_inplace(Field& f, Group group, Direction dir) {
  const GridSpec& g = f.grid();
  const bool fwd = dir == Direction::forward;
  auto one = [&](bool x_group) {
    require(x_group ? f.has_x() : f.has_v(), ErrorCode::usage, "field has no such variable group");
    const unsigned bit = x_group ? spectral_x : spectral_v;
    const bool is_spec = (f.space() & bit) != 0;
    require(fwd != is_spec, ErrorCode::usage,
            fwd ? "group already spectral; forward transform refused" : "group already physical; inverse refused");
    fft_group(f, x_group, fwd ? FFTW_FORWARD : FFTW_BACKWARD);
    const double scale = fwd ? std::pow(g.spacing(), g.dim) : std::pow(1.0 / g.period, g.dim);
    for (auto& c : f.data()) c *= scale;
    f.set_space(fwd ? (f.space() | bit) : (f.space() & ~bit));
  };
  if (group == Group::x || group == Group::both) {
    if (group == Group::x || f.has_x()) one(true);
  }
  if (group == Group::v || group == Group::both) {
    if (group == Group::v || f.has_v()) one(false);
  }
}

Field transform(const Field& f, Group group, Direction dir) {
  Field out = f;
  transform_inplace(out, group, dir);
  return out;
}

// ---- norms ------------------------------------------------------------------

namespace {

// Accumulates sum |z|^p or the maximum for p = inf.
struct PowAcc {
  double p;
  double acc = 0.0;
  void add(double a) {
    if (std::isinf(p))
      acc = std::max(acc, a);
    else if (p == 1.0)
      acc += a;
    else if (p == 2.0)
      acc += a * a;
    else
      acc += std::pow(a, p);
  }
  double finish(double cell) const {
    if (std::isinf(p)) return acc;
    if (p == 1.0) return acc * cell;
    if (p == 2.0) return std::sqrt(acc * cell);
    return std::pow(acc * cell, 1.0 / p);
  }
};

std::vector<char> group_mask(const GridSpec& g, const std::vector<std::pair<double, double>>& box, bool present) {
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

double lebesgue_norm(const Field& f, const NormKind& kind, const Box* region) {
  require(f.space() == physical, ErrorCode::usage, "lebesgue_norm needs a physical field");
  require(kind.r >= 1.0 && kind.p >= 1.0, ErrorCode::parameter, "norm exponents must be >= 1");
  const GridSpec& g = f.grid();
  const double cell = std::pow(g.spacing(), g.dim);
  const std::size_t nx = f.x_count(), nv = f.v_count();
  auto mx = group_mask(g, region ? region->x : std::vector<std::pair<double, double>>{}, f.has_x());
  auto mv = group_mask(g, region ? region->v : std::vector<std::pair<double, double>>{}, f.has_v());
  const double cx = f.has_x() ? cell : 1.0, cv = f.has_v() ? cell : 1.0;
  const double px = f.has_x() ? kind.r : 1.0, pv = f.has_v() ? kind.p : 1.0;
  if (!f.has_x() || !f.has_v()) {
    PowAcc a{f.has_x() ? kind.r : kind.p};
    const auto& m = f.has_x() ? mx : mv;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (m[i]) a.add(std::abs(f.data()[i]));
    return a.finish(cell);
  }
  if (kind.x_outer) {
    PowAcc outer{px};
    for (std::size_t ix = 0; ix < nx; ++ix) {
      if (!mx[ix]) continue;
      PowAcc inner{pv};
      for (std::size_t iv = 0; iv < nv; ++iv)
        if (mv[iv]) inner.add(std::abs(f.at(ix, iv)));
      outer.add(inner.finish(cv));
    }
    return outer.finish(cx);
  }
  PowAcc outer{pv};
  for (std::size_t iv = 0; iv < nv; ++iv) {
    if (!mv[iv]) continue;
    PowAcc inner{px};
    for (std::size_t ix = 0; ix < nx; ++ix)
      if (mx[ix]) inner.add(std::abs(f.at(ix, iv)));
    outer.add(inner.finish(cx));
  }
  return outer.finish(cv);
}

double lp_norm(const Field& f, double p) { return lebesgue_norm(f, NormKind::plain(p)); }

// ---- multipliers --------------------------------------------------------------

namespace {

std::vector<cplx> tabulate_symbol(const GridSpec& g, const Symbol& symbol) {
  std::vector<cplx> tab(g.group_count());
  std::array<double, 2> xi{};
  for (std::size_t i = 0; i < tab.size(); ++i) {
    group_freqs(g, i, {xi.data(), std::size_t(g.dim)});
    tab[i] = symbol({xi.data(), std::size_t(g.dim)});
    require(std::isfinite(tab[i].real()) && std::isfinite(tab[i].imag()), ErrorCode::numeric,
            "multiplier symbol returned a non-finite value");
  }
  return tab;
}

void to_space(Field& f, unsigned target) {
  const unsigned cur = f.space();
  if ((cur & spectral_x) && !(target & spectral_x)) transform_inplace(f, Group::x, Direction::inverse);
  if ((cur & spectral_v) && !(target & spectral_v)) transform_inplace(f, Group::v, Direction::inverse);
  if (!(cur & spectral_x) && (target & spectral_x)) transform_inplace(f, Group::x, Direction::forward);
  if (!(cur & spectral_v) && (target & spectral_v)) transform_inplace(f, Group::v, Direction::forward);
}

}  // namespace

Field apply_multiplier(const Field& f, Group group, const Symbol& symbol) {
  require(group != Group::both, ErrorCode::usage, "apply_multiplier acts on one group");
  const bool xg = group == Group::x;
  require(xg ? f.has_x() : f.has_v(), ErrorCode::usage, "field has no such variable group");
  const unsigned orig = f.space();
  Field out = f;
  const unsigned bit = xg ? spectral_x : spectral_v;
  to_space(out, orig | bit);
  auto tab = tabulate_symbol(f.grid(), symbol);
  const std::size_t nx = out.x_count(), nv = out.v_count();
  for (std::size_t ix = 0; ix < nx; ++ix)
    for (std::size_t iv = 0; iv < nv; ++iv) out.at(ix, iv) *= tab[xg ? ix : iv];
  to_space(out, orig);
  return out;
}

Field apply_phase_multiplier(const Field& f, const PhaseSymbol& symbol) {
  require(f.layout() == Layout::xv, ErrorCode::usage, "phase multiplier needs an xv field");
  const unsigned orig = f.space();
  Field out = f;
  to_space(out, spectral_x);
  const GridSpec& g = f.grid();
  const std::size_t nx = out.x_count(), nv = out.v_count();
  std::vector<double> vc(nv * g.dim);
  for (std::size_t iv = 0; iv < nv; ++iv) group_coords(g, iv, {vc.data() + iv * g.dim, std::size_t(g.dim)});
  std::array<double, 2> eta{};
  for (std::size_t ix = 0; ix < nx; ++ix) {
    group_freqs(g, ix, {eta.data(), std::size_t(g.dim)});
    for (std::size_t iv = 0; iv < nv; ++iv) {
      cplx m = symbol({eta.data(), std::size_t(g.dim)}, {vc.data() + iv * g.dim, std::size_t(g.dim)});
      require(std::isfinite(m.real()) && std::isfinite(m.imag()), ErrorCode::numeric,
              "phase symbol returned a non-finite value");
      out.at(ix, iv) *= m;
    }
  }
  to_space(out, orig);
  return out;
}

Field velocity_average(const Field& f, const Field* weight) {
  require(f.layout() == Layout::xv, ErrorCode::usage, "velocity average needs an xv field");
  require(!(f.space() & spectral_v), ErrorCode::usage, "velocity average needs physical v");
  if (weight) {
    require(weight->layout() == Layout::v_only && weight->grid() == f.grid() && weight->space() == physical,
            ErrorCode::usage, "velocity weight must be a physical v-only field on the same grid");
  }
  const GridSpec& g = f.grid();
  const double cell = std::pow(g.spacing(), g.dim);
  Field out(g, Layout::x_only);
  out.set_space(f.space() & spectral_x);
  const std::size_t nx = f.x_count(), nv = f.v_count();
  for (std::size_t ix = 0; ix < nx; ++ix) {
    cplx s(0.0, 0.0);
    for (std::size_t iv = 0; iv < nv; ++iv) s += weight ? f.at(ix, iv) * weight->data()[iv] : f.at(ix, iv);
    out.data()[ix] = s * cell;
  }
  return out;
}

Field broadcast_multiply(const Field& f, const Field& g) {
  require(f.grid() == g.grid() && f.space() == physical && g.space() == physical, ErrorCode::usage,
          "broadcast multiply needs physical fields on the same grid");
  if (g.layout() == f.layout()) {
    Field out = f;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= g.data()[i];
    return out;
  }
  require(f.layout() == Layout::xv, ErrorCode::usage, "broadcast target must be an xv field");
  Field out = f;
  const bool vg = g.layout() == Layout::v_only;
  for (std::size_t ix = 0; ix < out.x_count(); ++ix)
    for (std::size_t iv = 0; iv < out.v_count(); ++iv) out.at(ix, iv) *= g.data()[vg ? iv : ix];
  return out;
}

double max_abs_diff(const Field& a, const Field& b) {
  check_compatible(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double relative_l2(const Field& a, const Field& b) {
  check_compatible(a, b);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a.data()[i] - b.data()[i]);
    den += std::norm(b.data()[i]);
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

// ---- file io ------------------------------------------------------------------

void write_field(const std::string& path, const Field& f, bool single_precision) {
  std::ofstream os(path, std::ios::binary);
  require(bool(os), ErrorCode::io, "cannot open '" + path + "' for writing");
  char period[64];
  std::snprintf(period, sizeof period, "%.17g", f.grid().period);
  os << "vavg-field: 1\n"
     << "dim: " << f.grid().dim << "\n"
     << "n: " << f.grid().n << "\n"
     << "period: " << period << "\n"
     << "layout: " << layout_name(f.layout()) << "\n"
     << "space: " << f.space() << "\n"
     << "scalar: " << (single_precision ? "complex64" : "complex128") << "\n"
     << "byte_order: little\n"
     << "end\n";
  for (const auto& c : f.data()) {
    if (single_precision) {
      float v[2] = {float(c.real()), float(c.imag())};
      os.write(reinterpret_cast<const char*>(v), sizeof v);
    } else {
      double v[2] = {c.real(), c.imag()};
      os.write(reinterpret_cast<const char*>(v), sizeof v);
    }
  }
  require(bool(os), ErrorCode::io, "write to '" + path + "' failed");
}

Field read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(bool(is), ErrorCode::io, "cannot open '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line == "end") break;
    auto colon = line.find(':');
    require(colon != std::string::npos, ErrorCode::io, path + ":" + std::to_string(lineno) + ": expected key: value");
    std::string val = line.substr(colon + 1);
    val.erase(0, val.find_first_not_of(' '));
    kv[line.substr(0, colon)] = val;
  }
  require(line == "end", ErrorCode::io, path + ": header not terminated by 'end'");
  for (const char* k : {"vavg-field", "dim", "n", "period", "layout", "space", "scalar", "byte_order"})
    require(kv.count(k) != 0, ErrorCode::io, path + ": missing header key '" + k + "'");
  require(kv["vavg-field"] == "1", ErrorCode::io, path + ": unsupported format version");
  require(kv["byte_order"] == "little", ErrorCode::io, path + ": only little-endian payloads are supported");
  GridSpec g;
  try {
    g.dim = std::stoi(kv["dim"]);
    g.n = std::stoi(kv["n"]);
    g.period = std::stod(kv["period"]);
  } catch (const std::exception&) {
    fail(ErrorCode::io, path + ": malformed grid header");
  }
  Field f(g, layout_from_name(kv["layout"]));
  f.set_space(unsigned(std::stoul(kv["space"])));
  const bool single = kv["scalar"] == "complex64";
  require(single || kv["scalar"] == "complex128", ErrorCode::io, path + ": unknown scalar type");
  for (auto& c : f.data()) {
    if (single) {
      float v[2];
      is.read(reinterpret_cast<char*>(v), sizeof v);
      c = cplx(v[0], v[1]);
    } else {
      double v[2];
      is.read(reinterpret_cast<char*>(v), sizeof v);
      c = cplx(v[0], v[1]);
    }
  }
  require(bool(is), ErrorCode::io, path + ": payload shorter than header declares");
  return f;
}

}  // namespace vavg
