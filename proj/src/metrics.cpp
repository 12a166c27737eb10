#include "sll/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace sll {

namespace {

double eval_both(const EmpiricalState& state, const Fxy& f) { return empirical_measure_eval(state, f); }
double eval_both(const DensityField& field, const Fxy& f) { return density_field_eval(field, f); }

template <class M>
double mse_impl(const M& m) {
  return eval_both(m, [](double x, double xi) {
    const double d = x - xi;
    return d * d;
  });
}

template <class M>
double q_impl(const M& m) {
  return eval_both(m, [](double x, double xi) { return x * xi; });
}

template <class M>
double r_impl(const M& m, const PhiSpec& phi) {
  return eval_both(m, [&phi](double x, double) { return x * phi.grad(x); });
}

// trapezoid integral of `density` over [c, x_max] with a partial cell at c
double tail_mass(const Grid& grid, const std::vector<double>& density, double c) {
  const double dx = grid.dx();
  if (c <= grid.x_min) return trapezoid(density, dx);
  if (c >= grid.x_max) return 0.0;
  const auto cell = std::min(static_cast<std::size_t>((c - grid.x_min) / dx), grid.m - 2);
  const double s = (c - grid.node(cell)) / dx;
  const double u0 = density[cell];
  const double u1 = density[cell + 1];
  const double uc = u0 + (u1 - u0) * s;
  double mass = 0.5 * (uc + u1) * (1.0 - s) * dx;
  for (std::size_t i = cell + 1; i + 1 < grid.m; ++i) mass += 0.5 * (density[i] + density[i + 1]) * dx;
  return mass;
}

}  // namespace

double mse_of(const EmpiricalState& state) { return mse_impl(state); }
double mse_of(const DensityField& field) { return mse_impl(field); }
double overlap_q(const EmpiricalState& state) { return q_impl(state); }
double overlap_q(const DensityField& field) { return q_impl(field); }
double reg_r(const EmpiricalState& state, const PhiSpec& phi) { return r_impl(state, phi); }
double reg_r(const DensityField& field, const PhiSpec& phi) { return r_impl(field, phi); }

RocPoint roc_point(const DensityField& field, double c, double rho, double xi_on_value) {
  field.validate();
  if (!(rho > 0.0 && rho < 1.0)) fail(ErrorCode::invalid_argument, "roc requires rho in (0, 1)");
  const auto on = field.atom_index(xi_on_value);
  const auto off = field.atom_index(0.0);
  RocPoint pt;
  pt.c = c;
  pt.mass_true = field.atoms.atoms[on].weight * tail_mass(field.grid, field.densities[on], c);
  pt.mass_false = field.atoms.atoms[off].weight * tail_mass(field.grid, field.densities[off], c);
  pt.tpr = std::clamp(pt.mass_true / rho, 0.0, 1.0);
  pt.fpr = std::clamp(pt.mass_false / (1.0 - rho), 0.0, 1.0);
  return pt;
}

std::vector<RocPoint> roc_curve(const DensityField& field, std::span<const double> thresholds,
                                double rho, double xi_on_value) {
  std::vector<RocPoint> out;
  out.reserve(thresholds.size());
  for (double c : thresholds) out.push_back(roc_point(field, c, rho, xi_on_value));
  return out;
}

const std::vector<double>& conditional_density_slice(const DensityField& field, double xi_value) {
  return field.densities[field.atom_index(xi_value)];
}

double l1_density_distance(std::span<const double> a, std::span<const double> b, const Grid& grid) {
  grid.validate();
  if (a.size() != grid.m || b.size() != grid.m)
    fail(ErrorCode::invalid_argument, "l1 distance requires both densities on the given grid");
  std::vector<double> diff(grid.m);
  for (std::size_t i = 0; i < grid.m; ++i) diff[i] = std::abs(a[i] - b[i]);
  return trapezoid(diff, grid.dx());
}

CompareReport compare_sim_to_pde(const std::vector<TrajectoryRecord>& records,
                                 const OrderParameterPath& path, const std::string& observable,
                                 const std::string& path_component) {
  if (records.empty()) fail(ErrorCode::invalid_argument, "compare requires at least one record");
  path.validate();
  const auto comp_it = std::find(path.names.begin(), path.names.end(), path_component);
  if (comp_it == path.names.end())
    fail(ErrorCode::invalid_argument, "path has no component named '" + path_component + "'");
  const auto comp = static_cast<std::size_t>(comp_it - path.names.begin());

  const auto& times = records.front().times;
  for (const auto& rec : records) {
    if (!rec.observables.count(observable))
      fail(ErrorCode::invalid_argument, "record lacks observable '" + observable + "'");
    if (rec.times.size() != times.size())
      fail(ErrorCode::invalid_argument, "records have mismatched time grids");
  }

  CompareReport report;
  report.observable = observable;
  report.trials = records.size();
  const double n_trials = static_cast<double>(records.size());
  const double eps = 1e-9 * std::max(1.0, path.t_end());

  for (std::size_t j = 0; j < times.size(); ++j) {
    const double t = times[j];
    if (t < path.t0 - eps || t > path.t_end() + eps) continue;
    double sum = 0.0, sumsq = 0.0;
    for (const auto& rec : records) {
      const double v = rec.observables.at(observable)[j];
      sum += v;
      sumsq += v * v;
    }
    CompareRow row;
    row.t = t;
    row.sim_mean = sum / n_trials;
    const double var = std::max(0.0, (sumsq - sum * sum / n_trials) / std::max(1.0, n_trials - 1.0));
    row.sim_stderr = std::sqrt(var / n_trials);
    row.pde_value = path.at(t)[comp];
    const double diff = row.sim_mean - row.pde_value;
    if (row.sim_stderr > 0.0) {
      row.z = diff / row.sim_stderr;
    } else {
      row.z = std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(row.pde_value)) ? 0.0 : 1e12;
    }
    report.max_abs_z = std::max(report.max_abs_z, std::abs(row.z));
    report.rows.push_back(row);
  }
  if (report.rows.empty())
    fail(ErrorCode::invalid_argument, "no overlap between record times and the PDE path");
  return report;
}

void write_compare_csv(std::ostream& os, const CompareReport& report) {
  os << "t,sim_mean,sim_stderr,pde_value,z\n";
  for (const auto& r : report.rows) {
    os << format_double(r.t) << ',' << format_double(r.sim_mean) << ',' << format_double(r.sim_stderr)
       << ',' << format_double(r.pde_value) << ',' << format_double(r.z) << '\n';
  }
}

void write_compare_json(std::ostream& os, const CompareReport& report, double z_threshold) {
  nlohmann::json j;
  j["observable"] = report.observable;
  j["trials"] = report.trials;
  j["times"] = report.rows.size();
  j["max_abs_z"] = report.max_abs_z;
  j["z_threshold"] = z_threshold;
  j["pass"] = report.max_abs_z <= z_threshold;
  os << j.dump(2) << '\n';
}

void write_roc_csv(std::ostream& os, std::span<const RocPoint> points) {
  os << "c,tpr,fpr,mass_true,mass_false\n";
  for (const auto& p : points) {
    os << format_double(p.c) << ',' << format_double(p.tpr) << ',' << format_double(p.fpr) << ','
       << format_double(p.mass_true) << ',' << format_double(p.mass_false) << '\n';
  }
}

}  // namespace sll
