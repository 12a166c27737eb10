#include "sll/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace sll {

AlgorithmSpec make_regression_spec(double tau, double sigma, const PhiSpec& phi) {
  if (!(tau > 0.0)) fail(ErrorCode::invalid_argument, "regression spec requires tau > 0");
  if (!(sigma >= 0.0)) fail(ErrorCode::invalid_argument, "regression spec requires sigma >= 0");
  AlgorithmSpec spec;
  spec.name = "regression";
  spec.drift = [tau, phi](double x, double xi, std::span<const double>) {
    return tau * (xi - x) - phi.grad(x);
  };
  spec.diffusion = [tau, sigma](std::span<const double> q) {
    return tau * tau * (sigma * sigma + q[0]);
  };
  spec.order_params = {[](double x, double xi) {
    const double d = x - xi;
    return d * d;
  }};
  spec.order_param_names = {"e"};
  return spec;
}

AlgorithmSpec make_pca_spec(double tau, double omega, double beta, const PhiSpec& phi) {
  if (!(tau > 0.0)) fail(ErrorCode::invalid_argument, "pca spec requires tau > 0");
  if (!(omega > 0.0)) fail(ErrorCode::invalid_argument, "pca spec requires omega > 0");
  if (!(beta >= 0.0)) fail(ErrorCode::invalid_argument, "pca spec requires beta >= 0");
  AlgorithmSpec spec;
  spec.name = "pca";
  spec.drift = [tau, omega, beta, phi](double x, double xi, std::span<const double> q) {
    const double Q = q[0];
    const double R = q[1];
    return tau * omega * Q * xi - tau * beta * phi.grad(x) -
           tau * x * (omega * Q - beta * R + 0.5 * tau * (1.0 + omega * Q * Q));
  };
  spec.diffusion = [tau, omega](std::span<const double> q) {
    return tau * tau * (1.0 + omega * q[0] * q[0]);
  };
  spec.order_params = {[](double x, double xi) { return x * xi; },
                       [phi](double x, double) { return x * phi.grad(x); }};
  spec.order_param_names = {"Q", "R"};
  return spec;
}

namespace {

std::vector<double> order_params_of(const AlgorithmSpec& spec, const DensityField& field) {
  std::vector<double> q(spec.dim());
  for (std::size_t l = 0; l < spec.dim(); ++l) q[l] = density_field_eval(field, spec.order_params[l]);
  return q;
}

double l1_dist(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) d += std::abs(a[l] - b[l]);
  return d;
}

struct Context {
  const AlgorithmSpec& spec;
  const SolveOptions& opts;
  double q_dt;
  double dt;
  SolveResult& result;
  std::vector<std::pair<std::size_t, bool>> store_nodes;  // (global q node, stored)
};

// Fixed-point iteration over one stretch of `count` q intervals starting at
// global node `node0`. Appends Q values for nodes node0+1 .. node0+count and
// returns the evolved field. Recursively halves on non-convergence.
DensityField solve_stretch(Context& ctx, std::size_t node0, std::size_t count, DensityField field,
                           std::size_t depth) {
  const double t_a = ctx.q_dt * static_cast<double>(node0);
  const double t_b = ctx.q_dt * static_cast<double>(node0 + count);

  const auto q_init = order_params_of(ctx.spec, field);
  std::vector<std::vector<double>> q_cur(count + 1, q_init);

  std::vector<double> distances;
  bool converged = false;
  DensityField final_field = field;
  std::vector<std::pair<std::size_t, DensityField>> stores;

  for (std::size_t iter = 0; iter < ctx.opts.max_iter && !converged; ++iter) {
    OrderParameterPath path;
    path.t0 = t_a;
    path.dt = ctx.q_dt;
    path.names = ctx.spec.order_param_names;
    path.values = q_cur;

    FrozenPdeProblem problem{&ctx.spec, std::move(path), t_a, t_b, ctx.dt};
    std::vector<std::vector<double>> q_new(count + 1);
    stores.clear();
    solve_frozen_observe(
        problem, field,
        [&](std::size_t qj, double, const DensityField& f) {
          q_new[qj] = order_params_of(ctx.spec, f);
          if (qj == count) final_field = f;
          for (auto& [node, done] : ctx.store_nodes) {
            if (!done && node == node0 + qj) stores.emplace_back(node, f);
          }
        },
        &ctx.result.diagnostics);

    double d = 0.0;
    for (std::size_t j = 0; j <= count; ++j) d = std::max(d, l1_dist(q_new[j], q_cur[j]));
    distances.push_back(d);
    q_cur = std::move(q_new);
    if (d < ctx.opts.tol) converged = true;
  }

  if (!converged) {
    if (depth >= ctx.opts.max_halvings || count < 2 ||
        ctx.q_dt * static_cast<double>(count / 2) < 2.0 * ctx.dt) {
      fail(ErrorCode::fixed_point,
           "fixed-point iteration did not converge on [" + std::to_string(t_a) + ", " +
               std::to_string(t_b) + "] after " + std::to_string(ctx.opts.max_iter) +
               " iterations at minimum interval length");
    }
    const std::size_t half = count / 2;
    auto mid = solve_stretch(ctx, node0, half, std::move(field), depth + 1);
    return solve_stretch(ctx, node0 + half, count - half, std::move(mid), depth + 1);
  }

  for (std::size_t j = 1; j <= count; ++j) ctx.result.q_path.values.push_back(q_cur[j]);
  for (auto& [node, f] : stores) {
    for (auto& [want, done] : ctx.store_nodes) {
      if (want == node && !done) {
        done = true;
        ctx.result.fields.push_back(std::move(f));
        break;
      }
    }
  }
  ctx.result.report.iterations_per_interval.push_back(distances.size());
  ctx.result.report.interval_lengths.push_back(t_b - t_a);
  ctx.result.report.iterate_distances.push_back(std::move(distances));
  ctx.result.report.final_sup_distance = ctx.result.report.iterate_distances.back().back();
  return final_field;
}

}  // namespace

SolveResult solve_scaling_limit_pde(const AlgorithmSpec& spec, const DensityField& mu0, double T,
                                    const SolveOptions& opts) {
  if (!(T > 0.0)) fail(ErrorCode::invalid_argument, "solve requires T > 0");
  if (!(opts.tol > 0.0) || opts.max_iter < 1)
    fail(ErrorCode::invalid_argument, "solve requires tol > 0 and max_iter >= 1");
  mu0.validate();
  if (spec.dim() == 0) fail(ErrorCode::invalid_argument, "algorithm spec has no order parameters");

  const auto total_nodes =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(T / opts.q_dt)));
  const double q_dt = T / static_cast<double>(total_nodes);
  const double dt = std::min(opts.dt, q_dt);

  SolveResult result;
  result.q_path.t0 = 0.0;
  result.q_path.dt = q_dt;
  result.q_path.names = spec.order_param_names;

  Context ctx{spec, opts, q_dt, dt, result, {}};
  for (double ts : opts.store_times) {
    const auto node = static_cast<std::size_t>(
        std::clamp<long long>(std::llround(ts / q_dt), 0, static_cast<long long>(total_nodes)));
    ctx.store_nodes.emplace_back(node, false);
  }

  DensityField field = mu0;
  field.t = 0.0;
  result.q_path.values.push_back(order_params_of(spec, field));
  // store_times at t = 0
  for (auto& [node, done] : ctx.store_nodes) {
    if (node == 0 && !done) {
      done = true;
      result.fields.push_back(field);
    }
  }

  const auto nodes_per_interval =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opts.delta_T / q_dt)));
  std::size_t node = 0;
  while (node < total_nodes) {
    const std::size_t count = std::min(nodes_per_interval, total_nodes - node);
    field = solve_stretch(ctx, node, count, std::move(field), 0);
    node += count;
  }

  field.t = T;
  result.fields.push_back(std::move(field));
  result.report.converged = true;
  std::sort(result.fields.begin(), result.fields.end(),
            [](const DensityField& a, const DensityField& b) { return a.t < b.t; });
  return result;
}

void write_fixed_point_report_json(std::ostream& os, const FixedPointReport& report) {
  nlohmann::json j;
  j["converged"] = report.converged;
  j["final_sup_distance"] = report.final_sup_distance;
  j["iterations_per_interval"] = report.iterations_per_interval;
  j["interval_lengths"] = report.interval_lengths;
  j["iterate_distances"] = report.iterate_distances;
  os << j.dump(2) << '\n';
}

void write_diagnostics_json(std::ostream& os, const FpDiagnostics& diag) {
  nlohmann::json j;
  j["max_mass_drift"] = diag.max_mass_drift;
  j["clip_count"] = diag.clip_count;
  j["clipped_mass"] = diag.clipped_mass;
  j["steps"] = diag.steps;
  os << j.dump(2) << '\n';
}

}  // namespace sll
