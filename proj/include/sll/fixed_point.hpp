#pragma once

#include <iosfwd>
#include <vector>

#include "sll/algorithm_spec.hpp"
#include "sll/fokker_planck.hpp"
#include "sll/measure.hpp"
#include "sll/phi.hpp"

namespace sll {

// Theorem-level coefficient builders.
//   regression: G = tau (xi - x) - phi(x),   Lambda = tau^2 (sigma^2 + e),
//               order parameter e = <mu, (x - xi)^2>.
AlgorithmSpec make_regression_spec(double tau, double sigma, const PhiSpec& phi);

//   pca: G = tau omega Q xi - tau beta phi(x)
//            - tau x [omega Q - beta R + (tau/2)(1 + omega Q^2)],
//        Lambda = tau^2 (1 + omega Q^2), Q = <mu, x xi>, R = <mu, x phi(x)>.
AlgorithmSpec make_pca_spec(double tau, double omega, double beta, const PhiSpec& phi);

struct FixedPointReport {
  std::vector<std::size_t> iterations_per_interval;
  std::vector<double> interval_lengths;
  std::vector<std::vector<double>> iterate_distances;  // per interval, per iteration
  double final_sup_distance = 0.0;
  bool converged = false;
};

struct SolveOptions {
  double dt = 1e-3;      // PDE time step
  double q_dt = 1e-2;    // order-parameter grid step
  double delta_T = 5.0;  // fixed-point interval length
  double tol = 1e-6;
  std::size_t max_iter = 50;
  std::size_t max_halvings = 8;
  std::vector<double> store_times;  // density snapshots (final field always kept)
};

struct SolveResult {
  OrderParameterPath q_path;          // over [0, T] on the q grid
  std::vector<DensityField> fields;   // at store_times (plus final time)
  FixedPointReport report;
  FpDiagnostics diagnostics;
};

// Self-consistent solve of the nonlinear PDE by iterating F_b(F_a(.)) to a
// fixed point over successive intervals, halving an interval on
// non-convergence.
SolveResult solve_scaling_limit_pde(const AlgorithmSpec& spec, const DensityField& mu0, double T,
                                    const SolveOptions& opts = {});

void write_fixed_point_report_json(std::ostream& os, const FixedPointReport& report);
void write_diagnostics_json(std::ostream& os, const FpDiagnostics& diag);

}  // namespace sll
