#include "sll/fokker_planck.hpp"

#include <algorithm>
#include <cmath>

namespace sll {

namespace {

// Chang-Cooper weight for the flux form F = A u + B u_x with A = -G, B = Lambda/2.
// delta(w) = 1/w - 1/(e^w - 1), w = A dx / B; series expansion near w = 0.
double cc_delta(double a, double b_over_dx, double dx) {
  if (b_over_dx <= 0.0) {
    // pure advection: upwind in the transport velocity -A
    return a > 0.0 ? 0.0 : (a < 0.0 ? 1.0 : 0.5);
  }
  const double w = a * dx / (b_over_dx * dx);
  if (std::abs(w) < 1e-6) return 0.5 - w / 12.0;
  if (w > 700.0) return 1.0 / w;
  if (w < -700.0) return 1.0 / w + 1.0;
  return 1.0 / w - 1.0 / std::expm1(w);
}

// Thomas solve of (I - c*L) u' = rhs where L is tridiagonal (lower/diag/upper).
void solve_cn(const std::vector<double>& lower, const std::vector<double>& diag,
              const std::vector<double>& upper, double c, std::vector<double>& rhs,
              std::size_t atom_index) {
  const std::size_t m = diag.size();
  static thread_local std::vector<double> cp, dp;
  cp.assign(m, 0.0);
  dp.assign(m, 0.0);

  double piv = 1.0 - c * diag[0];
  if (std::abs(piv) < 1e-300)
    fail(ErrorCode::solver, "singular tridiagonal system (atom " + std::to_string(atom_index) + ")");
  cp[0] = (-c * upper[0]) / piv;
  dp[0] = rhs[0] / piv;
  for (std::size_t i = 1; i < m; ++i) {
    const double li = -c * lower[i];
    piv = (1.0 - c * diag[i]) - li * cp[i - 1];
    if (std::abs(piv) < 1e-300)
      fail(ErrorCode::solver,
           "singular tridiagonal system (atom " + std::to_string(atom_index) + ")");
    if (i + 1 < m) cp[i] = (-c * upper[i]) / piv;
    dp[i] = (rhs[i] - li * dp[i - 1]) / piv;
  }
  rhs[m - 1] = dp[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) rhs[i] = dp[i] - cp[i] * rhs[i + 1];
}

}  // namespace

void fp_step_atom(std::vector<double>& u, const Grid& grid,
                  const std::function<double(double)>& drift, double lambda, double dt,
                  FpDiagnostics& diag, std::size_t atom_index) {
  if (!(lambda >= 0.0)) fail(ErrorCode::invalid_argument, "diffusion coefficient must be >= 0");
  if (!(dt > 0.0 && dt <= 0.1)) fail(ErrorCode::invalid_argument, "fp step requires 0 < dt <= 0.1");
  const std::size_t m = grid.m;
  const double dx = grid.dx();
  const double b_over_dx = 0.5 * lambda / dx;

  // assemble L: du_i/dt = (F_{i+1/2} - F_{i-1/2}) / dx with zero-flux ends
  static thread_local std::vector<double> lower, diagv, upper, rhs, flux_l, flux_r;
  lower.assign(m, 0.0);
  diagv.assign(m, 0.0);
  upper.assign(m, 0.0);
  flux_l.assign(m - 1, 0.0);  // coefficient of u_i in face i+1/2
  flux_r.assign(m - 1, 0.0);  // coefficient of u_{i+1}

  for (std::size_t f = 0; f < m - 1; ++f) {
    const double xm = grid.x_min + dx * (static_cast<double>(f) + 0.5);
    const double a = -drift(xm);
    const double delta = cc_delta(a, b_over_dx, dx);
    flux_l[f] = a * delta - b_over_dx;
    flux_r[f] = a * (1.0 - delta) + b_over_dx;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (i < m - 1) {
      diagv[i] += flux_l[i] / dx;
      upper[i] = flux_r[i] / dx;
    }
    if (i > 0) {
      lower[i] = -flux_l[i - 1] / dx;
      diagv[i] -= flux_r[i - 1] / dx;
    }
  }

  const double mass_before = trapezoid(u, dx);

  // Crank-Nicolson: (I - dt/2 L) u' = (I + dt/2 L) u
  const double c = 0.5 * dt;
  rhs.assign(m, 0.0);
  rhs[0] = u[0] + c * (diagv[0] * u[0] + upper[0] * u[1]);
  for (std::size_t i = 1; i + 1 < m; ++i)
    rhs[i] = u[i] + c * (lower[i] * u[i - 1] + diagv[i] * u[i] + upper[i] * u[i + 1]);
  rhs[m - 1] = u[m - 1] + c * (lower[m - 1] * u[m - 2] + diagv[m - 1] * u[m - 1]);

  solve_cn(lower, diagv, upper, c, rhs, atom_index);

  for (std::size_t i = 0; i < m; ++i) {
    double v = rhs[i];
    if (v < 0.0) {
      diag.clip_count += 1;
      diag.clipped_mass += -v * dx;
      v = 0.0;
    }
    u[i] = v;
  }

  const double mass_after = trapezoid(u, dx);
  const double drift_mass = std::abs(mass_after - mass_before);
  diag.max_mass_drift = std::max(diag.max_mass_drift, drift_mass);
  diag.steps += 1;
  if (drift_mass > 1e-8)
    fail(ErrorCode::conservation, "mass drift " + std::to_string(drift_mass) + " in one step (atom " +
                                      std::to_string(atom_index) + ")");
}

DensityField fp_step(const DensityField& field, const Fxy& drift, double diffusion_coeff, double dt,
                     FpDiagnostics* diag) {
  field.validate();
  DensityField out = field;
  FpDiagnostics local;
  for (std::size_t a = 0; a < out.atoms.atoms.size(); ++a) {
    const double xi = out.atoms.atoms[a].xi;
    fp_step_atom(out.densities[a], out.grid, [&](double x) { return drift(x, xi); },
                 diffusion_coeff, dt, local, a);
  }
  out.t = field.t + dt;
  if (diag) diag->merge(local);
  return out;
}

void FrozenPdeProblem::validate() const {
  if (!spec) fail(ErrorCode::invalid_argument, "frozen problem needs an algorithm spec");
  q_path.validate();
  if (!(t_end >= t_start)) fail(ErrorCode::invalid_argument, "frozen problem requires t_end >= t_start");
  if (!(dt > 0.0) || dt > q_path.dt + 1e-15)
    fail(ErrorCode::invalid_argument, "frozen problem requires 0 < dt <= q_path.dt");
  if (q_path.t0 > t_start + 1e-12 || q_path.t_end() < t_end - 1e-12)
    fail(ErrorCode::invalid_argument, "q path does not cover the requested interval");
}

void solve_frozen_observe(const FrozenPdeProblem& problem, const DensityField& initial,
                          const FrozenObserver& observer, FpDiagnostics* diag) {
  problem.validate();
  initial.validate();
  const AlgorithmSpec& spec = *problem.spec;

  // align the marching grid with the q grid: integer sub-steps per q node
  const double q_dt = problem.q_path.dt;
  const auto sub = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(q_dt / problem.dt - 1e-12)));
  const double dt = q_dt / static_cast<double>(sub);

  const double span = problem.t_end - problem.t_start;
  const auto q_nodes = static_cast<std::size_t>(std::llround(span / q_dt));
  if (std::abs(static_cast<double>(q_nodes) * q_dt - span) > 1e-9 * std::max(1.0, span))
    fail(ErrorCode::invalid_argument, "interval length must be a multiple of the q grid step");

  DensityField field = initial;
  field.t = problem.t_start;
  FpDiagnostics local;

  observer(0, field.t, field);
  for (std::size_t qj = 0; qj < q_nodes; ++qj) {
    for (std::size_t s = 0; s < sub; ++s) {
      const double t = problem.t_start + q_dt * static_cast<double>(qj) + dt * static_cast<double>(s);
      const double t_mid = t + 0.5 * dt;
      const auto q_mid = spec.capped(problem.q_path.at(t_mid));
      const double lambda = spec.diffusion_checked(q_mid);
      for (std::size_t a = 0; a < field.atoms.atoms.size(); ++a) {
        const double xi = field.atoms.atoms[a].xi;
        fp_step_atom(field.densities[a], field.grid,
                     [&](double x) { return spec.drift(x, xi, q_mid); }, lambda, dt, local, a);
      }
    }
    field.t = problem.t_start + q_dt * static_cast<double>(qj + 1);
    observer(qj + 1, field.t, field);
  }
  if (diag) diag->merge(local);
}

std::vector<DensityField> solve_frozen(const FrozenPdeProblem& problem, const DensityField& initial,
                                       FpDiagnostics* diag) {
  std::vector<DensityField> out;
  solve_frozen_observe(problem, initial,
                       [&](std::size_t, double, const DensityField& f) { out.push_back(f); }, diag);
  return out;
}

OrderParameterPath order_params_from_density(const std::vector<DensityField>& fields,
                                             const AlgorithmSpec& spec) {
  if (fields.empty()) fail(ErrorCode::invalid_argument, "no density fields given");
  OrderParameterPath path;
  path.t0 = fields.front().t;
  path.dt = fields.size() > 1 ? fields[1].t - fields[0].t : 1.0;
  path.names = spec.order_param_names;
  for (const auto& f : fields) {
    std::vector<double> q(spec.dim());
    for (std::size_t l = 0; l < spec.dim(); ++l) q[l] = density_field_eval(f, spec.order_params[l]);
    path.values.push_back(std::move(q));
  }
  return path;
}

}  // namespace sll
