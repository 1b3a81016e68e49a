// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include "vavg/vavg.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "vavg/experiment.hpp"
#include "vavg/families.hpp"

struct vavg_field {
  vavg::Field f;
};

namespace {

thread_local std::string g_last_error;

vavg_status set_error(vavg_status st, const std::string& msg) {
  g_last_error = msg;
  return st;
}

template <class F>
vavg_status guarded(F&& fn) {
  try {
    fn();
    return VAVG_OK;
  } catch (const vavg::Error& e) {
    return set_error(static_cast<vavg_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(VAVG_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(VAVG_E_INTERNAL, e.what());
  } catch (...) {
    return set_error(VAVG_E_INTERNAL, "unknown failure");
  }
}

vavg::Layout to_layout(int l) {
  switch (l) {
    case VAVG_LAYOUT_XV: return vavg::Layout::xv;
    case VAVG_LAYOUT_X: return vavg::Layout::x_only;
    case VAVG_LAYOUT_V: return vavg::Layout::v_only;
    default: vavg::fail(vavg::ErrorCode::parameter, "unknown layout " + std::to_string(l));
  }
}

int from_layout(vavg::Layout l) {
  return l == vavg::Layout::xv ? VAVG_LAYOUT_XV : (l == vavg::Layout::x_only ? VAVG_LAYOUT_X : VAVG_LAYOUT_V);
}

void need(const void* p, const char* what) {
  vavg::require(p != nullptr, vavg::ErrorCode::usage, std::string(what) + " is null");
}

}  // namespace

extern "C" {

const char* vavg_version(void) { return "0.1.0"; }

const char* vavg_last_error(void) { return g_last_error.c_str(); }

vavg_status vavg_field_create(int dim, int n, double period, int layout, vavg_field** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    vavg::GridSpec g{dim, n, period};
    g.validate();
    *out = new vavg_field{vavg::Field(g, to_layout(layout))};
  });
}

vavg_status vavg_field_read(const char* path, vavg_field** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new vavg_field{vavg::read_field(path)};
  });
}

vavg_status vavg_field_write(const vavg_field* f, const char* path, int single_precision) {
  return guarded([&] {
    need(f, "field");
    need(path, "path");
    vavg::write_field(path, f->f, single_precision != 0);
  });
}

vavg_status vavg_field_info_get(const vavg_field* f, vavg_field_info* info) {
  return guarded([&] {
    need(f, "field");
    need(info, "info");
    info->dim = f->f.grid().dim;
    info->n = f->f.grid().n;
    info->period = f->f.grid().period;
    info->layout = from_layout(f->f.layout());
    info->space = f->f.space();
    info->size = f->f.size();
  });
}

vavg_status vavg_field_set_data(vavg_field* f, const double* data, size_t count) {
  return guarded([&] {
    need(f, "field");
    need(data, "data");
    vavg::require(count == f->f.size(), vavg::ErrorCode::parameter,
                  "expected " + std::to_string(f->f.size()) + " samples, got " + std::to_string(count));
    for (size_t i = 0; i < count; ++i) f->f.data()[i] = vavg::cplx(data[2 * i], data[2 * i + 1]);
  });
}

vavg_status vavg_field_get_data(const vavg_field* f, double* data, size_t count) {
  return guarded([&] {
    need(f, "field");
    need(data, "data");
    vavg::require(count == f->f.size(), vavg::ErrorCode::parameter,
                  "expected " + std::to_string(f->f.size()) + " samples, got " + std::to_string(count));
    for (size_t i = 0; i < count; ++i) {
      data[2 * i] = f->f.data()[i].real();
      data[2 * i + 1] = f->f.data()[i].imag();
    }
  });
}

void vavg_field_free(vavg_field* f) { delete f; }

vavg_status vavg_besov_norm(const vavg_field* f, int group, double s, double p, double q, double cutoff_width,
                            double* out) {
  return guarded([&] {
    need(f, "field");
    need(out, "out");
    vavg::require(group == VAVG_GROUP_X || group == VAVG_GROUP_V, vavg::ErrorCode::parameter, "unknown group");
    vavg::require(cutoff_width > 0.0 && cutoff_width < 0.25, vavg::ErrorCode::parameter,
                  "cutoff width must lie in (0, 1/4)");
    const vavg::DyadicCutoffs cut(cutoff_width);
    vavg::BesovSpec spec{s, p, q, false, 0, 0};
    *out = vavg::besov_norm(f->f, group == VAVG_GROUP_X ? vavg::Group::x : vavg::Group::v, spec, cut).value;
  });
}

vavg_status vavg_predicted_gain(const char* descriptor, int dim, double* s, double* tested_s, int* regime) {
  return guarded([&] {
    need(descriptor, "descriptor");
    vavg::TheoremCase c = vavg::parse_case(descriptor, dim);
    vavg::validate_case(c);
    const vavg::Gain g = vavg::predicted_gain(c);
    if (s) *s = g.s;
    if (tested_s) *tested_s = g.tested_s;
    if (regime) *regime = static_cast<int>(g.regime);
  });
}

vavg_status vavg_run(const char* subcommand, const char* config_path, const char* out_dir, int threads, int has_seed,
                     uint64_t seed, vavg_log_fn log, void* user, int* exit_code) {
  return guarded([&] {
    need(subcommand, "subcommand");
    need(config_path, "config path");
    need(exit_code, "exit_code");
    *exit_code = 2;
    const vavg::Config cfg = vavg::Config::load(config_path);
    vavg::RunOptions opt;
    if (out_dir) opt.out_dir = out_dir;
    opt.threads = threads;
    if (has_seed) opt.seed = seed;
    if (log) opt.log = [log, user](const std::string& line) { log(line.c_str(), user); };
    *exit_code = vavg::run_experiment(subcommand, cfg, opt);
  });
}

}  // extern "C"
