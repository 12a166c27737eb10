#include "sll/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace sll {

double ScalarPath::at(double t) const {
  if (values.empty()) fail(ErrorCode::invalid_argument, "empty scalar path");
  if (values.size() == 1 || !(dt > 0.0)) return values.front();
  const double s = (t - t0) / dt;
  if (s <= 0.0) return values.front();
  const auto last = values.size() - 1;
  if (s >= static_cast<double>(last)) return values.back();
  const auto j = static_cast<std::size_t>(s);
  const double frac = s - static_cast<double>(j);
  return values[j] * (1.0 - frac) + values[j + 1] * frac;
}

OrderParameterPath ScalarPath::as_order_params(const std::string& name) const {
  OrderParameterPath path;
  path.t0 = t0;
  path.dt = dt;
  path.names = {name};
  path.values.reserve(values.size());
  for (double v : values) path.values.push_back({v});
  return path;
}

namespace {

// Classical RK4 for a scalar autonomous ODE.
ScalarPath rk4_path(const std::function<double(double)>& rhs, double y0, double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) fail(ErrorCode::invalid_argument, "ODE path requires T, dt > 0");
  const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(T / dt)));
  ScalarPath path;
  path.t0 = 0.0;
  path.dt = T / static_cast<double>(steps);
  path.values.reserve(steps + 1);
  double y = y0;
  path.values.push_back(y);
  for (std::size_t s = 0; s < steps; ++s) {
    const double h = path.dt;
    const double k1 = rhs(y);
    const double k2 = rhs(y + 0.5 * h * k1);
    const double k3 = rhs(y + 0.5 * h * k2);
    const double k4 = rhs(y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    path.values.push_back(y);
  }
  return path;
}

}  // namespace

double regression_mse_stationary(double tau, double sigma) {
  return tau * sigma * sigma / (2.0 - tau);
}

double regression_mse_analytic(double tau, double sigma, double e0, double t) {
  const double es = regression_mse_stationary(tau, sigma);
  return (e0 - es) * std::exp((tau * tau - 2.0 * tau) * t) + es;
}

ScalarPath regression_mse_ode(double tau, double sigma, double e0, double T, double dt) {
  if (!(tau > 0.0)) fail(ErrorCode::invalid_argument, "mse ode requires tau > 0");
  if (!(sigma >= 0.0) || !(e0 >= 0.0))
    fail(ErrorCode::invalid_argument, "mse ode requires sigma >= 0 and e0 >= 0");
  if (tau >= 2.0)
    std::cerr << "warning: tau = " << tau << " >= 2 is outside the stable regime of the mse ODE\n";

  auto path = rk4_path(
      [tau, sigma](double e) { return -2.0 * tau * e + tau * tau * (sigma * sigma + e); }, e0, T, dt);

  for (std::size_t j = 0; j < path.values.size(); ++j) {
    const double t = path.t0 + path.dt * static_cast<double>(j);
    const double exact = regression_mse_analytic(tau, sigma, e0, t);
    if (std::abs(path.values[j] - exact) > 1e-9 * std::max(1.0, std::abs(exact)))
      fail(ErrorCode::solver, "RK4 mse path disagrees with the closed form at t = " +
                                  std::to_string(t) + " beyond 1e-9");
  }
  return path;
}

double pca_overlap_rhs(double tau, double omega, double q) {
  return tau * q * (omega * (1.0 - q) - 0.5 * tau * (1.0 + omega * q * q));
}

ScalarPath pca_overlap_ode(double tau, double omega, double q0, double T, double dt) {
  if (!(tau > 0.0) || !(omega > 0.0))
    fail(ErrorCode::invalid_argument, "overlap ode requires tau, omega > 0");
  if (std::abs(q0) > 1.0 + 1e-12)
    fail(ErrorCode::invalid_argument, "overlap ode requires |Q0| <= 1");

  auto path = rk4_path([tau, omega](double q) { return pca_overlap_rhs(tau, omega, q); }, q0, T, dt);
  for (double q : path.values) {
    if (std::abs(q) > 1.0 + 1e-6)
      fail(ErrorCode::evaluation,
           "overlap ODE left [-1, 1]: Q = " + std::to_string(q) + " (model violation)");
  }
  return path;
}

SdeEnsembleResult decoupled_sde_ensemble(const AlgorithmSpec& spec,
                                         const OrderParameterPath& q_path, double xi_value,
                                         const std::function<double(Rng&)>& x0_sampler,
                                         std::size_t particles, double T, double dt,
                                         std::uint64_t seed, const std::vector<double>& record_times,
                                         const BinGrid& bins) {
  if (particles < 1000) fail(ErrorCode::invalid_argument, "sde ensemble requires >= 1000 particles");
  if (!(T > 0.0) || !(dt > 0.0)) fail(ErrorCode::invalid_argument, "sde ensemble requires T, dt > 0");
  q_path.validate();
  bins.validate();

  const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(T / dt)));
  const double h = T / static_cast<double>(steps);
  const double sqrt_h = std::sqrt(h);
  constexpr double kDivergeBound = 1e6;

  // map record times to step indices (0 .. steps)
  std::vector<double> marks = record_times;
  std::sort(marks.begin(), marks.end());
  std::vector<std::size_t> mark_steps;
  for (double tm : marks) {
    const auto s = static_cast<std::size_t>(
        std::clamp<long long>(std::llround(tm / h), 0, static_cast<long long>(steps)));
    if (mark_steps.empty() || mark_steps.back() != s) mark_steps.push_back(s);
  }
  if (mark_steps.empty()) mark_steps.push_back(steps);

  Rng rng(split_seed(seed, 0));
  std::vector<double> x(particles);
  std::vector<char> dead(particles, 0);
  for (auto& v : x) v = x0_sampler(rng);

  SdeEnsembleResult result;
  result.bins = bins;

  auto record = [&](std::size_t step_idx) {
    std::vector<double> alive;
    alive.reserve(particles);
    for (std::size_t p = 0; p < particles; ++p)
      if (!dead[p]) alive.push_back(x[p]);
    if (alive.empty()) fail(ErrorCode::divergence, "all sde particles diverged");
    result.times.push_back(h * static_cast<double>(step_idx));
    result.histograms.push_back(histogram(alive, bins));
  };

  std::size_t next_mark = 0;
  if (mark_steps[next_mark] == 0) {
    record(0);
    ++next_mark;
  }

  std::vector<double> noise(particles);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t_mid = h * (static_cast<double>(s) + 0.5);
    const auto q = spec.capped(q_path.at(t_mid));
    const double lam = spec.diffusion_checked(q);
    const double vol = std::sqrt(lam);
    rng.fill_gaussian(noise);
    for (std::size_t p = 0; p < particles; ++p) {
      if (dead[p]) continue;
      double v = x[p] + h * spec.drift(x[p], xi_value, q) + sqrt_h * vol * noise[p];
      if (!std::isfinite(v) || std::abs(v) > kDivergeBound) {
        dead[p] = 1;
        ++result.divergent;
        continue;
      }
      x[p] = v;
    }
    if (next_mark < mark_steps.size() && mark_steps[next_mark] == s + 1) {
      record(s + 1);
      ++next_mark;
    }
  }

  if (static_cast<double>(result.divergent) > 1e-3 * static_cast<double>(particles))
    fail(ErrorCode::divergence, std::to_string(result.divergent) + " of " +
                                    std::to_string(particles) + " sde particles diverged (> 0.1%)");
  return result;
}

std::vector<double> ou_stationary_density(double tau, double sigma, const Grid& grid) {
  if (!(tau > 0.0) || !(sigma > 0.0))
    fail(ErrorCode::invalid_argument, "ou stationary density requires tau, sigma > 0");
  return gaussian_density(grid, 0.0, 0.5 * tau * sigma * sigma);
}

PotentialResult effective_potential(double tau, double beta,
                                    const std::function<double(double)>& Phi, double xi_value,
                                    const Grid& grid) {
  grid.validate();
  if (!Phi) fail(ErrorCode::invalid_argument, "effective potential requires a regularizer");
  PotentialResult out;
  out.values.resize(grid.m);
  for (std::size_t i = 0; i < grid.m; ++i) {
    const double xv = grid.node(i);
    const double d = xv - xi_value;
    out.values[i] = 0.5 * tau * d * d + beta * Phi(xv);
  }
  for (std::size_t i = 1; i + 1 < grid.m; ++i) {
    if (out.values[i] < out.values[i - 1] && out.values[i] <= out.values[i + 1])
      out.minima.push_back(grid.node(i));
  }
  return out;
}

}  // namespace sll
