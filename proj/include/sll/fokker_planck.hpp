#pragma once

#include <functional>
#include <vector>

#include "sll/algorithm_spec.hpp"
#include "sll/measure.hpp"

namespace sll {

// Per-run conservation and positivity diagnostics.
struct FpDiagnostics {
  double max_mass_drift = 0.0;  // max per-step |trapezoid mass change|
  long clip_count = 0;          // negative nodes clipped to zero
  double clipped_mass = 0.0;    // total |negative| mass removed by clipping
  std::size_t steps = 0;

  void merge(const FpDiagnostics& o) {
    max_mass_drift = std::max(max_mass_drift, o.max_mass_drift);
    clip_count += o.clip_count;
    clipped_mass += o.clipped_mass;
    steps += o.steps;
  }
};

// One Chang-Cooper / Crank-Nicolson step of
//   d/dt u = d/dx ( -G u + (Lambda/2) d/dx u )
// with zero-flux boundaries, applied in place to a single atom density.
void fp_step_atom(std::vector<double>& u, const Grid& grid,
                  const std::function<double(double)>& drift, double lambda, double dt,
                  FpDiagnostics& diag, std::size_t atom_index);

// Spec-level step over a whole field (drift may read xi).
DensityField fp_step(const DensityField& field, const Fxy& drift, double diffusion_coeff, double dt,
                     FpDiagnostics* diag = nullptr);

// Frozen-coefficient PDE problem: advance the density with the order
// parameters supplied as a fixed path (the F_a map).
struct FrozenPdeProblem {
  const AlgorithmSpec* spec = nullptr;
  OrderParameterPath q_path;
  double t_start = 0.0;
  double t_end = 0.0;
  double dt = 1e-3;

  void validate() const;
};

using FrozenObserver = std::function<void(std::size_t q_index, double t, const DensityField&)>;

// Evolve `initial` from t_start to t_end; invokes the observer at every
// q-grid node inside [t_start, t_end] (including both ends).
void solve_frozen_observe(const FrozenPdeProblem& problem, const DensityField& initial,
                          const FrozenObserver& observer, FpDiagnostics* diag = nullptr);

std::vector<DensityField> solve_frozen(const FrozenPdeProblem& problem, const DensityField& initial,
                                       FpDiagnostics* diag = nullptr);

// The F_b map: extract order parameters from a density path.
OrderParameterPath order_params_from_density(const std::vector<DensityField>& fields,
                                             const AlgorithmSpec& spec);

}  // namespace sll
