#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sll/algorithm_spec.hpp"
#include "sll/measure.hpp"
#include "sll/rng.hpp"

namespace sll {

// Scalar path on a uniform time grid, values[j] at t0 + j*dt.
struct ScalarPath {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;

  double t_end() const { return t0 + dt * static_cast<double>(values.size() - 1); }
  double at(double t) const;  // clamped linear interpolation
  OrderParameterPath as_order_params(const std::string& name) const;
};

// Regression special case phi == 0: the weak PDE closes on
// e = <mu, (x-xi)^2> with e' = -2 tau e + tau^2 (sigma^2 + e).
// Integrates with RK4 and checks against the closed form
//   e(t) = (e0 - e*) exp((tau^2 - 2 tau) t) + e*,  e* = tau sigma^2 / (2 - tau)
// to 1e-9. tau >= 2 is the unstable regime; a warning is printed to stderr.
ScalarPath regression_mse_ode(double tau, double sigma, double e0, double T, double dt);
double regression_mse_analytic(double tau, double sigma, double e0, double t);
double regression_mse_stationary(double tau, double sigma);

// PCA special case beta == 0: Q = <mu, x xi> closes on
//   Q' = tau Q [ omega (1 - Q) - (tau/2)(1 + omega Q^2) ]
// (uses <xi^2> = 1; the diffusion term drops since d^2(x xi)/dx^2 = 0).
// RK4 integration; |Q| > 1 + 1e-6 raises a model-violation error.
ScalarPath pca_overlap_ode(double tau, double omega, double q0, double T, double dt);
double pca_overlap_rhs(double tau, double omega, double q);

// Euler-Maruyama ensemble for the decoupled SDE
//   dX = G(X, xi, Q(t)) dt + sqrt(Lambda(Q(t))) dB
// at a single xi atom. Histograms are recorded at `record_times`.
struct SdeEnsembleResult {
  std::vector<double> times;
  std::vector<std::vector<double>> histograms;  // [time][bin], normalized
  BinGrid bins;
  std::size_t divergent = 0;  // particles frozen at |X| > 1e6
};

SdeEnsembleResult decoupled_sde_ensemble(const AlgorithmSpec& spec,
                                         const OrderParameterPath& q_path, double xi_value,
                                         const std::function<double(Rng&)>& x0_sampler,
                                         std::size_t particles, double T, double dt,
                                         std::uint64_t seed, const std::vector<double>& record_times,
                                         const BinGrid& bins);

// Analytic stationary density of the OU case G = -tau x, Lambda = tau^2 sigma^2:
// N(0, tau sigma^2 / 2) on the grid.
std::vector<double> ou_stationary_density(double tau, double sigma, const Grid& grid);

// Effective potential E_xi(x) = (tau/2)(x - xi)^2 + beta Phi(x) with
// grid-based local-minima detection (no root polishing).
struct PotentialResult {
  std::vector<double> values;
  std::vector<double> minima;  // x locations of interior local minima
};

PotentialResult effective_potential(double tau, double beta,
                                    const std::function<double(double)>& Phi, double xi_value,
                                    const Grid& grid);

}  // namespace sll
