#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sll/errors.hpp"

namespace sll {

// Uniform node grid on [x_min, x_max] with m points.
struct Grid {
  double x_min = -10.0;
  double x_max = 10.0;
  std::size_t m = 1025;

  double dx() const { return (x_max - x_min) / static_cast<double>(m - 1); }
  double node(std::size_t i) const { return x_min + dx() * static_cast<double>(i); }
  void validate() const;
  bool operator==(const Grid&) const = default;
};

double trapezoid(std::span<const double> values, double dx);

// Finite-n algorithm state: paired estimate/target vectors.
struct EmpiricalState {
  std::vector<double> x;
  std::vector<double> xi;
  std::size_t k = 0;

  std::size_t n() const { return x.size(); }
  void validate() const;
};

// Discrete representation of the xi-marginal: the target stays fixed along
// the dynamics, so the limiting measure is a weighted family of x-densities,
// one per distinct xi value.
struct XiAtom {
  double xi = 0.0;
  double weight = 1.0;
};

struct XiAtomSet {
  std::vector<XiAtom> atoms;
  void validate() const;
};

// Discretized limiting measure mu_t(x, xi): per-atom probability density on
// a shared x-grid.
struct DensityField {
  XiAtomSet atoms;
  Grid grid;
  std::vector<std::vector<double>> densities;  // [atom][node], units 1/x
  double t = 0.0;

  void validate() const;
  std::size_t atom_index(double xi_value, double tol = 1e-9) const;
};

// Time-indexed order-parameter path on a uniform time grid.
struct OrderParameterPath {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;  // [time index][component]

  std::size_t size() const { return values.size(); }
  std::size_t dim() const { return values.empty() ? 0 : values.front().size(); }
  double time(std::size_t j) const { return t0 + dt * static_cast<double>(j); }
  double t_end() const { return time(size() - 1); }
  void validate() const;
  // piecewise-linear interpolation, clamped at the ends
  std::vector<double> at(double t) const;
};

using Fxy = std::function<double(double x, double xi)>;

// <mu, f> over an empirical measure; permutation-invariant reduction.
double empirical_measure_eval(const EmpiricalState& state, const Fxy& f);

// <mu, f> over a density field via per-atom trapezoid quadrature.
double density_field_eval(const DensityField& field, const Fxy& f);

// Histogram bins: nbins equal-width bins on [lo, hi]; out-of-range samples
// are clamped into the end bins.
struct BinGrid {
  double lo = -10.0;
  double hi = 10.0;
  std::size_t nbins = 100;

  double width() const { return (hi - lo) / static_cast<double>(nbins); }
  void validate() const;
};

// Normalized histogram (density values per bin) of {x_i : xi_i == xi_value}.
std::vector<double> histogram(const EmpiricalState& state, double xi_value, const BinGrid& bins);
std::vector<double> histogram(std::span<const double> samples, const BinGrid& bins);

// Delta initial conditions are represented by a normalized triangular bump
// of half-width 2*dx centered at the nearest grid node.
std::vector<double> triangular_bump(const Grid& grid, double center);
std::vector<double> gaussian_density(const Grid& grid, double mean, double variance);

// Average a node-grid density into bin averages on `bins` (for comparing
// against sample histograms).
std::vector<double> rebin_density(const Grid& grid, std::span<const double> density, const BinGrid& bins);

// CSV: header `t,xi,weight,x,density`, one row per (atom, node).
void write_density_csv(std::ostream& os, const DensityField& field, bool header = true);
std::vector<DensityField> read_density_csv(std::istream& is);

// CSV: header `t,param_name,value`.
void write_order_params_csv(std::ostream& os, const OrderParameterPath& path);
OrderParameterPath read_order_params_csv(std::istream& is);

std::string format_double(double v);  // 17 significant digits

}  // namespace sll
