#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sll/measure.hpp"
#include "sll/phi.hpp"
#include "sll/rng.hpp"

namespace sll {

enum class SampleDist { gaussian, rademacher };

// Streaming regularized regression, one rank-one update per sample.
struct RegressionModel {
  double tau = 0.2;
  double sigma = 1.0;
  PhiSpec phi;  // regularizer gradient, strength folded into phi.beta
  SampleDist sensing_dist = SampleDist::gaussian;

  void validate() const;
};

// Streaming regularized PCA (Oja-type update with sphere projection).
struct PcaModel {
  double tau = 0.2;
  double omega = 2.0;
  double beta = 0.0;  // regularization strength multiplying unit phi
  PhiSpec phi;        // unit-strength gradient (phi.beta typically 1)
  SampleDist spike_dist = SampleDist::rademacher;
  SampleDist noise_dist = SampleDist::gaussian;

  void validate() const;
};

struct TrajectoryRecord {
  std::vector<double> times;  // rescaled t = k/n, strictly increasing
  std::map<std::string, std::vector<double>> observables;
  std::vector<std::pair<double, EmpiricalState>> snapshots;
  uint64_t seed = 0;
};

// One regression update: x' = eta[x + tau (y - a.x/sqrt(n)) a/sqrt(n)],
// with the sample draws supplied by the caller. Mutates state in place.
// All inner products use permutation-invariant reductions so that permuting
// the coordinates and the draws jointly permutes the trajectory bitwise.
void regression_step(EmpiricalState& state, const RegressionModel& model, std::span<const double> a,
                     double w);

// One PCA update with supplied draws; preserves ||x|| = sqrt(n).
void pca_step(EmpiricalState& state, const PcaModel& model, std::span<const double> a, double c);

// Per-step sample source. The default implementation draws from an Rng;
// tests substitute permuted or forced draws.
class DrawProvider {
 public:
  virtual ~DrawProvider() = default;
  virtual void regression_draws(std::span<double> a, double& w) = 0;
  virtual void pca_draws(std::span<double> a, double& c) = 0;
};

class RngDrawProvider : public DrawProvider {
 public:
  RngDrawProvider(uint64_t seed, SampleDist sensing, SampleDist spike, double sigma)
      : rng_(seed), sensing_(sensing), spike_(spike), sigma_(sigma) {}
  void regression_draws(std::span<double> a, double& w) override;
  void pca_draws(std::span<double> a, double& c) override;

 private:
  Rng rng_;
  SampleDist sensing_;
  SampleDist spike_;
  double sigma_;
};

struct RunOptions {
  std::vector<double> record_times;    // defaults to ~200 uniform times if empty
  std::vector<double> snapshot_times;  // opt-in; empty keeps no snapshots
};

TrajectoryRecord run_regression(EmpiricalState state, const RegressionModel& model, double T,
                                uint64_t seed, const RunOptions& opts);
TrajectoryRecord run_pca(EmpiricalState state, const PcaModel& model, double T, uint64_t seed,
                         const RunOptions& opts);

// Variants with caller-supplied draws (exchangeability and forced-draw tests).
TrajectoryRecord run_regression(EmpiricalState state, const RegressionModel& model, double T,
                                DrawProvider& draws, const RunOptions& opts);
TrajectoryRecord run_pca(EmpiricalState state, const PcaModel& model, double T, DrawProvider& draws,
                         const RunOptions& opts);

// Toy 1-D SGD: x' = x - (tau/n)[f'(x) + sqrt(n) v], v ~ N(0, sigma^2).
struct ToySgdResult {
  std::vector<double> times;
  std::vector<std::vector<double>> samples;  // [time][trial]
};

ToySgdResult toy_sgd_1d_run(const std::function<double(double)>& f_prime, double tau, double sigma,
                            std::size_t n, double T, const std::function<double(Rng&)>& x0_sampler,
                            std::size_t trials, uint64_t seed,
                            const std::vector<double>& record_times);

// Monte Carlo estimate of the conditional moments of the rank-one increment
// g^i = tau (w - a.(x-xi)/sqrt(n)) a^i / sqrt(n) at a frozen state.
struct MomentProbe {
  double mean_g = 0.0, se_mean_g = 0.0;
  double mean_g2 = 0.0, se_mean_g2 = 0.0;
  double mean_gigj = 0.0, se_mean_gigj = 0.0;
  std::size_t i = 0, j = 1;
};

MomentProbe gki_moment_probe(const EmpiricalState& state, const RegressionModel& model,
                             std::size_t samples, uint64_t seed, std::size_t i = 0,
                             std::size_t j = 1);

// Target/initial vector construction.
std::vector<double> make_sparse_target(std::size_t n, double rho, double on_value);
void normalize_to_sphere(std::vector<double>& v);  // scales to ||v|| = sqrt(n)

// TrajectoryRecord CSV: `t,observable,value,seed`; snapshots: `t,i,x,xi`.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec, bool header = true);
std::vector<TrajectoryRecord> read_trajectory_csv(std::istream& is);
void write_snapshots_csv(std::ostream& os, const TrajectoryRecord& rec, bool header = true);

}  // namespace sll
