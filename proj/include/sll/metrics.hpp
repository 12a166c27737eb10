#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sll/measure.hpp"
#include "sll/phi.hpp"
#include "sll/simulate.hpp"

namespace sll {

// e = <mu, (x - xi)^2>
double mse_of(const EmpiricalState& state);
double mse_of(const DensityField& field);

// Q = <mu, x xi>
double overlap_q(const EmpiricalState& state);
double overlap_q(const DensityField& field);

// R = <mu, x phi(x)>
double reg_r(const EmpiricalState& state, const PhiSpec& phi);
double reg_r(const DensityField& field, const PhiSpec& phi);

// Support-recovery operating point at threshold c for the sparse model with
// on-fraction rho: tpr = <mu, 1(x >= c, xi = xi_on)> / rho,
// fpr = <mu, 1(x >= c, xi = 0)> / (1 - rho). `mass_*` are the unnormalized
// <mu, f> values.
struct RocPoint {
  double c = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  double mass_true = 0.0;
  double mass_false = 0.0;
};

RocPoint roc_point(const DensityField& field, double c, double rho, double xi_on_value);
std::vector<RocPoint> roc_curve(const DensityField& field, std::span<const double> thresholds,
                                double rho, double xi_on_value);

// The x-density of one atom (already normalized per atom).
const std::vector<double>& conditional_density_slice(const DensityField& field, double xi_value);

double l1_density_distance(std::span<const double> a, std::span<const double> b, const Grid& grid);

// Alignment of finite-n trials against a PDE order-parameter path.
struct CompareRow {
  double t = 0.0;
  double sim_mean = 0.0;
  double sim_stderr = 0.0;
  double pde_value = 0.0;
  double z = 0.0;  // 0 when stderr == 0 and means match exactly
};

struct CompareReport {
  std::string observable;
  std::vector<CompareRow> rows;
  double max_abs_z = 0.0;
  std::size_t trials = 0;
};

CompareReport compare_sim_to_pde(const std::vector<TrajectoryRecord>& records,
                                 const OrderParameterPath& path, const std::string& observable,
                                 const std::string& path_component);

// CSV: `t,sim_mean,sim_stderr,pde_value,z`; JSON: max |z| and pass flag.
void write_compare_csv(std::ostream& os, const CompareReport& report);
void write_compare_json(std::ostream& os, const CompareReport& report, double z_threshold);

void write_roc_csv(std::ostream& os, std::span<const RocPoint> points);

}  // namespace sll
