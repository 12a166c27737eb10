#include "sll/measure.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "sll/reduce.hpp"

namespace sll {

void Grid::validate() const {
  if (m < 2) fail(ErrorCode::invalid_argument, "grid needs at least 2 nodes");
  if (!(x_max > x_min)) fail(ErrorCode::invalid_argument, "grid requires x_max > x_min");
  if (!std::isfinite(x_min) || !std::isfinite(x_max))
    fail(ErrorCode::invalid_argument, "grid bounds must be finite");
}

double trapezoid(std::span<const double> values, double dx) {
  if (values.size() < 2) return 0.0;
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * dx;
}

void EmpiricalState::validate() const {
  if (x.empty()) fail(ErrorCode::invalid_argument, "empirical state must have n >= 1");
  if (x.size() != xi.size())
    fail(ErrorCode::invalid_argument, "estimate and target vectors must have identical length");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(xi[i]))
      fail(ErrorCode::invalid_argument, "non-finite entry at coordinate " + std::to_string(i));
  }
}

void XiAtomSet::validate() const {
  if (atoms.empty()) fail(ErrorCode::invalid_argument, "atom set is empty");
  double total = 0.0;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    if (!(atoms[a].weight > 0.0))
      fail(ErrorCode::invalid_argument, "atom weight must be strictly positive");
    total += atoms[a].weight;
    for (std::size_t b = 0; b < a; ++b) {
      if (atoms[a].xi == atoms[b].xi)
        fail(ErrorCode::invalid_argument, "duplicate xi atom value");
    }
  }
  if (std::abs(total - 1.0) > 1e-12)
    fail(ErrorCode::invalid_argument, "atom weights must sum to 1");
}

void DensityField::validate() const {
  atoms.validate();
  grid.validate();
  if (densities.size() != atoms.atoms.size())
    fail(ErrorCode::invalid_argument, "density row count does not match atom count");
  for (std::size_t a = 0; a < densities.size(); ++a) {
    const auto& d = densities[a];
    if (d.size() != grid.m)
      fail(ErrorCode::invalid_argument, "density row length does not match grid");
    for (double v : d) {
      if (!(v >= 0.0)) fail(ErrorCode::invalid_argument, "negative or non-finite density value");
    }
    const double mass = trapezoid(d, grid.dx());
    if (std::abs(mass - 1.0) > 1e-8)
      fail(ErrorCode::invalid_argument,
           "atom " + std::to_string(a) + " density integrates to " + std::to_string(mass));
  }
}

std::size_t DensityField::atom_index(double xi_value, double tol) const {
  for (std::size_t a = 0; a < atoms.atoms.size(); ++a) {
    if (std::abs(atoms.atoms[a].xi - xi_value) <= tol) return a;
  }
  fail(ErrorCode::invalid_argument, "no atom at xi = " + std::to_string(xi_value));
}

void OrderParameterPath::validate() const {
  if (!(dt > 0.0)) fail(ErrorCode::invalid_argument, "order-parameter path requires dt > 0");
  if (values.size() < 2) fail(ErrorCode::invalid_argument, "order-parameter path needs >= 2 nodes");
  const std::size_t r = values.front().size();
  for (const auto& v : values) {
    if (v.size() != r) fail(ErrorCode::invalid_argument, "ragged order-parameter path");
    for (double q : v) {
      if (!std::isfinite(q)) fail(ErrorCode::invalid_argument, "non-finite order parameter");
    }
  }
}

std::vector<double> OrderParameterPath::at(double t) const {
  const double s = (t - t0) / dt;
  if (s <= 0.0) return values.front();
  if (s >= static_cast<double>(size() - 1)) return values.back();
  const std::size_t j = static_cast<std::size_t>(s);
  const double w = s - static_cast<double>(j);
  std::vector<double> out(dim());
  for (std::size_t l = 0; l < dim(); ++l)
    out[l] = (1.0 - w) * values[j][l] + w * values[j + 1][l];
  return out;
}

double empirical_measure_eval(const EmpiricalState& state, const Fxy& f) {
  state.validate();
  InvariantSum s;
  for (std::size_t i = 0; i < state.n(); ++i) {
    const double v = f(state.x[i], state.xi[i]);
    if (!std::isfinite(v))
      fail(ErrorCode::evaluation, "non-finite functional value at coordinate " + std::to_string(i));
    s.add(v);
  }
  return s.value() / static_cast<double>(state.n());
}

double density_field_eval(const DensityField& field, const Fxy& f) {
  double total = 0.0;
  const double dx = field.grid.dx();
  for (std::size_t a = 0; a < field.atoms.atoms.size(); ++a) {
    const double xi = field.atoms.atoms[a].xi;
    const auto& d = field.densities[a];
    double s = 0.5 * (f(field.grid.node(0), xi) * d.front() +
                      f(field.grid.node(field.grid.m - 1), xi) * d.back());
    for (std::size_t i = 1; i + 1 < field.grid.m; ++i) s += f(field.grid.node(i), xi) * d[i];
    total += field.atoms.atoms[a].weight * s * dx;
  }
  return total;
}

void BinGrid::validate() const {
  if (nbins == 0) fail(ErrorCode::invalid_argument, "histogram needs at least 1 bin");
  if (!(hi > lo)) fail(ErrorCode::invalid_argument, "histogram requires hi > lo");
}

std::vector<double> histogram(std::span<const double> samples, const BinGrid& bins) {
  bins.validate();
  if (samples.empty()) fail(ErrorCode::evaluation, "histogram over empty selection");
  std::vector<double> counts(bins.nbins, 0.0);
  const double w = bins.width();
  for (double v : samples) {
    auto b = static_cast<long long>(std::floor((v - bins.lo) / w));
    b = std::clamp<long long>(b, 0, static_cast<long long>(bins.nbins) - 1);
    counts[static_cast<std::size_t>(b)] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(samples.size()) * w);
  for (auto& c : counts) c *= norm;
  return counts;
}

std::vector<double> histogram(const EmpiricalState& state, double xi_value, const BinGrid& bins) {
  state.validate();
  std::vector<double> sel;
  for (std::size_t i = 0; i < state.n(); ++i) {
    if (std::abs(state.xi[i] - xi_value) <= 1e-12) sel.push_back(state.x[i]);
  }
  if (sel.empty())
    fail(ErrorCode::evaluation, "no coordinates with xi = " + std::to_string(xi_value));
  return histogram(sel, bins);
}

std::vector<double> triangular_bump(const Grid& grid, double center) {
  grid.validate();
  const double dx = grid.dx();
  const double half_width = 2.0 * dx;
  const double c = grid.node(static_cast<std::size_t>(
      std::clamp(std::llround((center - grid.x_min) / dx), 0LL, static_cast<long long>(grid.m - 1))));
  std::vector<double> d(grid.m, 0.0);
  for (std::size_t i = 0; i < grid.m; ++i) {
    const double u = std::abs(grid.node(i) - c) / half_width;
    if (u < 1.0) d[i] = (1.0 - u) / half_width;
  }
  const double mass = trapezoid(d, dx);
  for (auto& v : d) v /= mass;
  return d;
}

std::vector<double> gaussian_density(const Grid& grid, double mean, double variance) {
  grid.validate();
  if (!(variance > 0.0)) fail(ErrorCode::invalid_argument, "gaussian density needs variance > 0");
  std::vector<double> d(grid.m);
  const double inv2v = 0.5 / variance;
  const double norm = 1.0 / std::sqrt(2.0 * M_PI * variance);
  for (std::size_t i = 0; i < grid.m; ++i) {
    const double u = grid.node(i) - mean;
    d[i] = norm * std::exp(-u * u * inv2v);
  }
  const double mass = trapezoid(d, grid.dx());
  for (auto& v : d) v /= mass;
  return d;
}

std::vector<double> rebin_density(const Grid& grid, std::span<const double> density,
                                  const BinGrid& bins) {
  bins.validate();
  // piecewise-linear density integrated exactly over each bin
  auto value_at = [&](double x) -> double {
    if (x <= grid.x_min) return density.front();
    if (x >= grid.x_max) return density.back();
    const double s = (x - grid.x_min) / grid.dx();
    const auto j = static_cast<std::size_t>(s);
    const double w = s - static_cast<double>(j);
    return (1.0 - w) * density[j] + w * density[j + 1];
  };
  std::vector<double> out(bins.nbins);
  const std::size_t sub = 8;
  for (std::size_t b = 0; b < bins.nbins; ++b) {
    const double lo = bins.lo + bins.width() * static_cast<double>(b);
    const double h = bins.width() / static_cast<double>(sub);
    double s = 0.5 * (value_at(lo) + value_at(lo + bins.width()));
    for (std::size_t q = 1; q < sub; ++q) s += value_at(lo + h * static_cast<double>(q));
    out[b] = s * h / bins.width();
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void write_density_csv(std::ostream& os, const DensityField& field, bool header) {
  if (header) os << "t,xi,weight,x,density\n";
  for (std::size_t a = 0; a < field.atoms.atoms.size(); ++a) {
    const auto& atom = field.atoms.atoms[a];
    for (std::size_t i = 0; i < field.grid.m; ++i) {
      os << format_double(field.t) << ',' << format_double(atom.xi) << ','
         << format_double(atom.weight) << ',' << format_double(field.grid.node(i)) << ','
         << format_double(field.densities[a][i]) << '\n';
    }
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    fail(ErrorCode::io, "bad numeric field in CSV: '" + s + "'");
  }
}

}  // namespace

std::vector<DensityField> read_density_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) fail(ErrorCode::io, "empty density CSV");
  if (split_csv_line(line) != std::vector<std::string>{"t", "xi", "weight", "x", "density"})
    fail(ErrorCode::io, "density CSV header mismatch");

  struct Row {
    double t, xi, weight, x, density;
  };
  std::vector<Row> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 5) fail(ErrorCode::io, "density CSV row must have 5 fields");
    rows.push_back({parse_double(f[0]), parse_double(f[1]), parse_double(f[2]), parse_double(f[3]),
                    parse_double(f[4])});
  }
  if (rows.empty()) fail(ErrorCode::io, "density CSV has no data rows");

  std::vector<DensityField> fields;
  std::size_t i = 0;
  while (i < rows.size()) {
    const double t = rows[i].t;
    DensityField field;
    field.t = t;
    std::vector<double> xs;
    while (i < rows.size() && rows[i].t == t) {
      const double xi = rows[i].xi;
      const double weight = rows[i].weight;
      std::vector<double> dens;
      xs.clear();
      while (i < rows.size() && rows[i].t == t && rows[i].xi == xi) {
        xs.push_back(rows[i].x);
        dens.push_back(rows[i].density);
        ++i;
      }
      field.atoms.atoms.push_back({xi, weight});
      field.densities.push_back(std::move(dens));
    }
    if (xs.size() < 2) fail(ErrorCode::io, "density CSV atom with fewer than 2 nodes");
    field.grid = Grid{xs.front(), xs.back(), xs.size()};
    field.validate();
    fields.push_back(std::move(field));
  }
  return fields;
}

void write_order_params_csv(std::ostream& os, const OrderParameterPath& path) {
  os << "t,param_name,value\n";
  for (std::size_t j = 0; j < path.size(); ++j) {
    for (std::size_t l = 0; l < path.dim(); ++l) {
      const std::string& name = l < path.names.size() ? path.names[l] : ("q" + std::to_string(l));
      os << format_double(path.time(j)) << ',' << name << ',' << format_double(path.values[j][l])
         << '\n';
    }
  }
}

OrderParameterPath read_order_params_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) fail(ErrorCode::io, "empty order-parameter CSV");
  if (split_csv_line(line) != std::vector<std::string>{"t", "param_name", "value"})
    fail(ErrorCode::io, "order-parameter CSV header mismatch");

  OrderParameterPath path;
  std::vector<double> times;
  std::map<std::string, std::size_t> name_index;
  std::vector<std::vector<double>> columns;  // [component][time]
  double current_t = 0.0;
  bool any = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 3) fail(ErrorCode::io, "order-parameter CSV row must have 3 fields");
    const double t = parse_double(f[0]);
    const double v = parse_double(f[2]);
    if (!any || t != current_t) {
      times.push_back(t);
      current_t = t;
      any = true;
    }
    auto [it, inserted] = name_index.emplace(f[1], path.names.size());
    if (inserted) {
      path.names.push_back(f[1]);
      columns.emplace_back();
    }
    auto& col = columns[it->second];
    if (col.size() + 1 != times.size())
      fail(ErrorCode::io, "order-parameter CSV has a ragged component '" + f[1] + "'");
    col.push_back(v);
  }
  if (times.size() < 2) fail(ErrorCode::io, "order-parameter CSV needs >= 2 time nodes");
  for (const auto& col : columns) {
    if (col.size() != times.size())
      fail(ErrorCode::io, "order-parameter CSV components cover different time sets");
  }
  path.t0 = times.front();
  path.dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t j = 1; j < times.size(); ++j) {
    if (std::abs(times[j] - times[j - 1] - path.dt) > 1e-9 * std::max(1.0, std::abs(times.back())))
      fail(ErrorCode::io, "order-parameter CSV times are not uniform");
  }
  path.values.assign(times.size(), std::vector<double>(path.names.size()));
  for (std::size_t l = 0; l < columns.size(); ++l) {
    for (std::size_t j = 0; j < times.size(); ++j) path.values[j][l] = columns[l][j];
  }
  path.validate();
  return path;
}

}  // namespace sll
