// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vavg/error.hpp"

namespace vavg {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Periodic tensor grid shared by the x and v groups: dim axes each, n points
// per axis, every axis spans one period.
struct GridSpec {
  int dim = 1;
  int n = 64;
  double period = 2.0 * kPi;

  void validate() const;
  double spacing() const { return period / n; }
  double lattice_step() const { return 2.0 * kPi / period; }
  // Largest representable frequency along one axis.
  double axis_nyquist() const { return kPi * n / period; }
  // Largest |xi| over the whole group lattice.
  double radial_nyquist() const;
  std::size_t group_count() const;  // n^dim
  bool operator==(const GridSpec&) const = default;
};

enum class Layout { xv, x_only, v_only };
enum class Group { x, v, both };
enum class Direction { forward, inverse };

// Bit flags recording which groups are in frequency representation.
enum Space : unsigned { physical = 0u, spectral_x = 1u, spectral_v = 2u, spectral_xv = 3u };

const char* layout_name(Layout l);
Layout layout_from_name(const std::string& s);

// Complex samples on the grid. Axes are row-major in the order (x..., v...),
// so the flat index is ix * v_count() + iv.
class Field {
 public:
  Field() = default;
  Field(const GridSpec& g, Layout layout);

  const GridSpec& grid() const { return grid_; }
  Layout layout() const { return layout_; }
  unsigned space() const { return space_; }
  void set_space(unsigned s) { space_ = s; }

  bool has_x() const { return layout_ != Layout::v_only; }
  bool has_v() const { return layout_ != Layout::x_only; }
  std::size_t x_count() const { return has_x() ? grid_.group_count() : 1; }
  std::size_t v_count() const { return has_v() ? grid_.group_count() : 1; }
  std::size_t size() const { return data_.size(); }

  cplx& at(std::size_t ix, std::size_t iv) { return data_[ix * v_count() + iv]; }
  const cplx& at(std::size_t ix, std::size_t iv) const { return data_[ix * v_count() + iv]; }
  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

  Field zeros_like() const;
  bool is_zero() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(cplx a);

 private:
  GridSpec grid_;
  Layout layout_ = Layout::xv;
  unsigned space_ = physical;
  std::vector<cplx> data_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx a, Field f);

// Coordinate of node i on one axis: i*h folded into [-L/2, L/2). Velocity
// products v*eta use this representative.
double node_coord(const GridSpec& g, int i);
// Lattice frequency 2*pi*k/L of FFT-ordered index i, k in [-n/2, n/2).
double node_freq(const GridSpec& g, int i);
int lattice_index(const GridSpec& g, int i);

// Per-axis coordinates (or frequencies) of a flat group index.
void group_coords(const GridSpec& g, std::size_t flat, std::span<double> out);
void group_freqs(const GridSpec& g, std::size_t flat, std::span<double> out);

using PointRule = std::function<cplx(std::span<const double> x, std::span<const double> v)>;
using GroupRule = std::function<cplx(std::span<const double> y)>;
using Symbol = std::function<cplx(std::span<const double> xi)>;

// data[i,j] = rule(x_i, v_j). The rule should be L-periodic per axis.
Field sample_function(const PointRule& rule, const GridSpec& g, Layout layout = Layout::xv);
// Single-group variant for x-only or v-only fields.
Field sample_group(const GroupRule& rule, const GridSpec& g, Layout layout);

// Forward: multiply by (L/n)^D after exp(-i xi.y) sums. Inverse: divide by L^D.
Field transform(const Field& f, Group group, Direction dir);
void transform_inplace(Field& f, Group group, Direction dir);

// Mixed norm: r over x, p over v. With x_outer the v norm is taken first
// (L^r_x L^p_v), otherwise the x norm is taken first (L^p_v L^r_x). For a
// single-group field only the exponent of that group matters.
struct NormKind {
  double r = 2.0;
  double p = 2.0;
  bool x_outer = true;

  static NormKind plain(double p) { return {p, p, true}; }
};

// Axis-aligned box in node coordinates; empty vectors leave a group unrestricted.
struct Box {
  std::vector<std::pair<double, double>> x;
  std::vector<std::pair<double, double>> v;
};

double lebesgue_norm(const Field& f, const NormKind& kind, const Box* region = nullptr);
double lp_norm(const Field& f, double p);

// F^-1[symbol * F f] on one group; restores the input space flags.
Field apply_multiplier(const Field& f, Group group, const Symbol& symbol);
// Multiplier on the x-spectrum that may depend on the velocity node:
// symbol(eta, v). Requires an xv field.
using PhaseSymbol = std::function<cplx(std::span<const double> eta, std::span<const double> v)>;
Field apply_phase_multiplier(const Field& f, const PhaseSymbol& symbol);

// Velocity integral sum_v f(x,v) w(v) h^D, returns an x-only field.
Field velocity_average(const Field& f, const Field* weight = nullptr);

// Multiply an xv field pointwise by a v-only (or x-only) field.
Field broadcast_multiply(const Field& f, const Field& g);

double max_abs_diff(const Field& a, const Field& b);
double relative_l2(const Field& a, const Field& b);

// Binary field file: text header of key: value lines ending with "end",
// then raw little-endian complex payload.
void write_field(const std::string& path, const Field& f, bool single_precision = false);
Field read_field(const std::string& path);

}  // namespace vavg
