#include "sll/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sll/errors.hpp"
#include "sll/fixed_point.hpp"
#include "sll/metrics.hpp"
#include "sll/oracles.hpp"
#include "sll/simulate.hpp"

namespace sll {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::config, "config parse error in '" + path + "': " + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::config, "config root must be a JSON object");
  return j;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return it.key() == k; }) == allowed.end())
      fail(ErrorCode::config, "unknown key '" + it.key() + "' in " + where);
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(ErrorCode::config, "missing key '" + std::string(key) + "' in " + where);
  return *it;
}

double num(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) fail(ErrorCode::config, "'" + std::string(key) + "' in " + where + " must be a number");
  return v.get<double>();
}

double num_or(const json& obj, const char* key, double def) {
  auto it = obj.find(key);
  if (it == obj.end()) return def;
  if (!it->is_number()) fail(ErrorCode::config, "'" + std::string(key) + "' must be a number");
  return it->get<double>();
}

std::string str(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) fail(ErrorCode::config, "'" + std::string(key) + "' in " + where + " must be a string");
  return v.get<std::string>();
}

std::vector<double> num_list(const json& v, const std::string& where) {
  if (!v.is_array()) fail(ErrorCode::config, where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(ErrorCode::config, where + " must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  std::ofstream os(dir / name);
  if (!os) fail(ErrorCode::io, "cannot write '" + (dir / name).string() + "'");
  os.precision(17);
  return os;
}

fs::path prepare_out_dir(const RunContext& ctx) {
  fs::path dir(ctx.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create output directory '" + dir.string() + "'");
  return dir;
}

void write_resolved_config(const fs::path& dir, const json& resolved) {
  auto os = open_out(dir, "resolved_config.json");
  os << resolved.dump(2) << '\n';
}

// resolve a path in the config relative to the config file's directory
std::string resolve_path(const std::string& config_path, const std::string& p) {
  fs::path fp(p);
  if (fp.is_absolute()) return p;
  return (fs::path(config_path).parent_path() / fp).string();
}

PhiSpec parse_phi(const json& obj, const std::string& where) {
  if (!obj.is_object()) fail(ErrorCode::config, where + " must be an object");
  const std::string name = str(obj, "name", where);
  if (name == "none") {
    check_keys(obj, {"name"}, where);
    return PhiSpec::none();
  }
  if (name == "l1") {
    check_keys(obj, {"name", "beta"}, where);
    return PhiSpec::l1(num(obj, "beta", where));
  }
  if (name == "smoothed_l1") {
    check_keys(obj, {"name", "beta", "epsilon"}, where);
    return PhiSpec::smoothed_l1(num(obj, "beta", where), num_or(obj, "epsilon", 1e-3));
  }
  if (name == "elastic") {
    check_keys(obj, {"name", "beta", "lambda1", "lambda2"}, where);
    return PhiSpec::elastic(num_or(obj, "beta", 1.0), num(obj, "lambda1", where),
                            num(obj, "lambda2", where));
  }
  if (name == "tanh") {
    check_keys(obj, {"name", "beta", "alpha"}, where);
    return PhiSpec::tanh_reg(num(obj, "beta", where), num_or(obj, "alpha", 2.0));
  }
  fail(ErrorCode::config, "unknown regularizer '" + name + "' in " + where +
                              " (expected none, l1, smoothed_l1, elastic, tanh)");
}

json phi_json(const PhiSpec& phi) {
  json j;
  j["name"] = phi.name();
  if (phi.kind == PhiSpec::Kind::none) return j;
  j["beta"] = phi.beta;
  if (phi.kind == PhiSpec::Kind::smoothed_l1) j["epsilon"] = phi.epsilon;
  if (phi.kind == PhiSpec::Kind::elastic) {
    j["lambda1"] = phi.lambda1;
    j["lambda2"] = phi.lambda2;
  }
  if (phi.kind == PhiSpec::Kind::tanh_kind) j["alpha"] = phi.alpha;
  return j;
}

SampleDist parse_dist(const json& obj, const char* key, SampleDist def) {
  auto it = obj.find(key);
  if (it == obj.end()) return def;
  const std::string s = it->get<std::string>();
  if (s == "gaussian") return SampleDist::gaussian;
  if (s == "rademacher") return SampleDist::rademacher;
  fail(ErrorCode::config, std::string("'") + key + "' must be gaussian or rademacher");
}

const char* dist_name(SampleDist d) { return d == SampleDist::gaussian ? "gaussian" : "rademacher"; }

Grid parse_grid(const json& obj, const std::string& where) {
  check_keys(obj, {"x_min", "x_max", "m"}, where);
  Grid g;
  g.x_min = num_or(obj, "x_min", g.x_min);
  g.x_max = num_or(obj, "x_max", g.x_max);
  g.m = static_cast<std::size_t>(num_or(obj, "m", static_cast<double>(g.m)));
  g.validate();
  return g;
}

json grid_json(const Grid& g) { return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"m", g.m}}; }

// ---- model section -------------------------------------------------------

struct ModelConfig {
  std::string type;  // regression | pca | toy_sgd
  RegressionModel regression;
  PcaModel pca;
  double toy_tau = 1.0, toy_sigma = 1.0;
  std::string toy_f_prime = "quadratic";
  json resolved;
};

ModelConfig parse_model(const json& cfg) {
  const json& m = require(cfg, "model", "config");
  ModelConfig mc;
  mc.type = str(m, "type", "model");
  if (mc.type == "regression") {
    check_keys(m, {"type", "tau", "sigma", "phi", "sensing"}, "model");
    mc.regression.tau = num(m, "tau", "model");
    mc.regression.sigma = num_or(m, "sigma", 1.0);
    if (m.contains("phi")) mc.regression.phi = parse_phi(m["phi"], "model.phi");
    mc.regression.sensing_dist = parse_dist(m, "sensing", SampleDist::gaussian);
    mc.regression.validate();
    mc.resolved = {{"type", "regression"},
                   {"tau", mc.regression.tau},
                   {"sigma", mc.regression.sigma},
                   {"phi", phi_json(mc.regression.phi)},
                   {"sensing", dist_name(mc.regression.sensing_dist)}};
  } else if (mc.type == "pca") {
    check_keys(m, {"type", "tau", "omega", "beta", "phi", "spike", "noise"}, "model");
    mc.pca.tau = num(m, "tau", "model");
    mc.pca.omega = num(m, "omega", "model");
    mc.pca.beta = num_or(m, "beta", 0.0);
    mc.pca.phi = m.contains("phi") ? parse_phi(m["phi"], "model.phi") : PhiSpec::l1(1.0);
    mc.pca.spike_dist = parse_dist(m, "spike", SampleDist::rademacher);
    mc.pca.noise_dist = parse_dist(m, "noise", SampleDist::gaussian);
    mc.pca.validate();
    mc.resolved = {{"type", "pca"},          {"tau", mc.pca.tau},
                   {"omega", mc.pca.omega},  {"beta", mc.pca.beta},
                   {"phi", phi_json(mc.pca.phi)}, {"spike", dist_name(mc.pca.spike_dist)},
                   {"noise", dist_name(mc.pca.noise_dist)}};
  } else if (mc.type == "toy_sgd") {
    check_keys(m, {"type", "tau", "sigma", "f_prime"}, "model");
    mc.toy_tau = num(m, "tau", "model");
    mc.toy_sigma = num(m, "sigma", "model");
    mc.toy_f_prime = m.contains("f_prime") ? str(m, "f_prime", "model") : "quadratic";
    if (mc.toy_f_prime != "quadratic" && mc.toy_f_prime != "double_well")
      fail(ErrorCode::config, "model.f_prime must be quadratic or double_well");
    mc.resolved = {{"type", "toy_sgd"},
                   {"tau", mc.toy_tau},
                   {"sigma", mc.toy_sigma},
                   {"f_prime", mc.toy_f_prime}};
  } else {
    fail(ErrorCode::config, "model.type must be regression, pca, or toy_sgd");
  }
  return mc;
}

std::function<double(double)> toy_f_prime_fn(const std::string& name) {
  if (name == "quadratic") return [](double x) { return x; };
  return [](double x) { return x * x * x - x; };  // double_well: f = x^4/4 - x^2/2
}

// ---- signal / initial-state section --------------------------------------

struct SignalConfig {
  // target
  std::string kind = "constant";  // constant | sparse
  double value = 0.0;
  double rho = 0.1;
  double on_value = 1.0;
  // initial estimate
  std::string x0_kind = "gaussian";  // gaussian | constant
  double x0_mean = 0.0;
  double x0_variance = 1.0;
  double x0_value = 0.0;
  json resolved;
};

SignalConfig parse_signal(const json& cfg) {
  SignalConfig sc;
  if (cfg.contains("signal")) {
    const json& s = cfg["signal"];
    check_keys(s, {"kind", "value", "rho", "on_value", "x0"}, "signal");
    sc.kind = s.contains("kind") ? str(s, "kind", "signal") : "constant";
    if (sc.kind == "constant") {
      sc.value = num_or(s, "value", 0.0);
    } else if (sc.kind == "sparse") {
      sc.rho = num(s, "rho", "signal");
      sc.on_value = num(s, "on_value", "signal");
      if (!(sc.rho > 0.0 && sc.rho < 1.0)) fail(ErrorCode::config, "signal.rho must lie in (0, 1)");
    } else {
      fail(ErrorCode::config, "signal.kind must be constant or sparse");
    }
    if (s.contains("x0")) {
      const json& x0 = s["x0"];
      check_keys(x0, {"kind", "mean", "variance", "value"}, "signal.x0");
      sc.x0_kind = str(x0, "kind", "signal.x0");
      if (sc.x0_kind == "gaussian") {
        sc.x0_mean = num_or(x0, "mean", 0.0);
        sc.x0_variance = num_or(x0, "variance", 1.0);
        if (!(sc.x0_variance > 0.0)) fail(ErrorCode::config, "signal.x0.variance must be > 0");
      } else if (sc.x0_kind == "constant") {
        sc.x0_value = num(x0, "value", "signal.x0");
      } else {
        fail(ErrorCode::config, "signal.x0.kind must be gaussian or constant");
      }
    }
  }
  json x0j = sc.x0_kind == "gaussian"
                 ? json{{"kind", "gaussian"}, {"mean", sc.x0_mean}, {"variance", sc.x0_variance}}
                 : json{{"kind", "constant"}, {"value", sc.x0_value}};
  sc.resolved = sc.kind == "sparse"
                    ? json{{"kind", "sparse"}, {"rho", sc.rho}, {"on_value", sc.on_value}, {"x0", x0j}}
                    : json{{"kind", "constant"}, {"value", sc.value}, {"x0", x0j}};
  return sc;
}

EmpiricalState build_state(const SignalConfig& sc, std::size_t n, bool sphere, std::uint64_t seed) {
  EmpiricalState state;
  state.xi = sc.kind == "sparse" ? make_sparse_target(n, sc.rho, sc.on_value)
                                 : std::vector<double>(n, sc.value);
  state.x.resize(n);
  if (sc.x0_kind == "gaussian") {
    Rng rng(split_seed(seed, 0x90));
    const double sd = std::sqrt(sc.x0_variance);
    for (auto& v : state.x) v = sc.x0_mean + sd * rng.gaussian();
  } else {
    std::fill(state.x.begin(), state.x.end(), sc.x0_value);
  }
  if (sphere) normalize_to_sphere(state.x);
  return state;
}

// ---- initial density section (solve-pde / roc) ----------------------------

DensityField parse_initial(const json& cfg) {
  const json& init = require(cfg, "initial", "config");
  check_keys(init, {"grid", "atoms"}, "initial");
  DensityField field;
  field.grid = init.contains("grid") ? parse_grid(init["grid"], "initial.grid") : Grid{};
  const json& atoms = require(init, "atoms", "initial");
  if (!atoms.is_array() || atoms.empty()) fail(ErrorCode::config, "initial.atoms must be a non-empty array");
  for (const auto& a : atoms) {
    check_keys(a, {"xi", "weight", "density"}, "initial.atoms[]");
    XiAtom atom;
    atom.xi = num(a, "xi", "initial.atoms[]");
    atom.weight = num_or(a, "weight", 1.0);
    const json& d = require(a, "density", "initial.atoms[]");
    const std::string kind = str(d, "kind", "initial.atoms[].density");
    if (kind == "gaussian") {
      check_keys(d, {"kind", "mean", "variance"}, "initial.atoms[].density");
      field.densities.push_back(
          gaussian_density(field.grid, num(d, "mean", "density"), num(d, "variance", "density")));
    } else if (kind == "delta") {
      check_keys(d, {"kind", "center"}, "initial.atoms[].density");
      field.densities.push_back(triangular_bump(field.grid, num(d, "center", "density")));
    } else {
      fail(ErrorCode::config, "initial.atoms[].density.kind must be gaussian or delta");
    }
    field.atoms.atoms.push_back(atom);
  }
  field.t = 0.0;
  field.validate();
  return field;
}

json initial_json(const json& cfg, const DensityField& field) {
  json j = cfg.at("initial");
  j["grid"] = grid_json(field.grid);
  return j;
}

// ---- solver section -------------------------------------------------------

struct SolverConfig {
  double T = 10.0;
  SolveOptions opts;
  double cap_b = 1e6;
  json resolved;
};

SolverConfig parse_solver(const json& cfg) {
  SolverConfig sc;
  const json& s = require(cfg, "solver", "config");
  check_keys(s, {"T", "dt", "q_dt", "delta_T", "tol", "max_iter", "max_halvings", "cap_b",
                 "store_times"},
             "solver");
  sc.T = num(s, "T", "solver");
  sc.opts.dt = num_or(s, "dt", sc.opts.dt);
  sc.opts.q_dt = num_or(s, "q_dt", sc.opts.q_dt);
  sc.opts.delta_T = num_or(s, "delta_T", sc.opts.delta_T);
  sc.opts.tol = num_or(s, "tol", sc.opts.tol);
  sc.opts.max_iter = static_cast<std::size_t>(num_or(s, "max_iter", 50));
  sc.opts.max_halvings = static_cast<std::size_t>(num_or(s, "max_halvings", 8));
  sc.cap_b = num_or(s, "cap_b", 1e6);
  if (s.contains("store_times")) sc.opts.store_times = num_list(s["store_times"], "solver.store_times");
  sc.resolved = {{"T", sc.T},
                 {"dt", sc.opts.dt},
                 {"q_dt", sc.opts.q_dt},
                 {"delta_T", sc.opts.delta_T},
                 {"tol", sc.opts.tol},
                 {"max_iter", sc.opts.max_iter},
                 {"max_halvings", sc.opts.max_halvings},
                 {"cap_b", sc.cap_b},
                 {"store_times", sc.opts.store_times}};
  return sc;
}

AlgorithmSpec spec_from_model(const ModelConfig& mc, double cap_b) {
  AlgorithmSpec spec;
  if (mc.type == "regression") {
    spec = make_regression_spec(mc.regression.tau, mc.regression.sigma, mc.regression.phi);
  } else if (mc.type == "pca") {
    spec = make_pca_spec(mc.pca.tau, mc.pca.omega, mc.pca.beta, mc.pca.phi);
  } else {
    fail(ErrorCode::config, "solve-pde supports model.type regression or pca");
  }
  spec.cap_b = cap_b;
  return spec;
}

// block-partitioned deterministic parallel loop
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += threads) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string output_name(const json& cfg, const char* key, const char* def) {
  if (!cfg.contains("outputs")) return def;
  const json& o = cfg["outputs"];
  check_keys(o, {"trajectories", "snapshots", "densities", "order_params", "report", "diagnostics",
                 "compare_csv", "compare_json", "roc", "potential", "samples"},
             "outputs");
  auto it = o.find(key);
  return it == o.end() ? def : it->get<std::string>();
}

}  // namespace

// ---- commands --------------------------------------------------------------

int cmd_simulate(const std::string& config_path, const RunContext& ctx) {
  const json cfg = load_config(config_path);
  check_keys(cfg, {"model", "signal", "simulation", "outputs"}, "config");
  const ModelConfig mc = parse_model(cfg);
  const SignalConfig sig = parse_signal(cfg);

  const json& sim = require(cfg, "simulation", "config");
  check_keys(sim, {"n", "T", "trials", "seed", "record_times", "snapshot_times"}, "simulation");
  const auto n = static_cast<std::size_t>(num(sim, "n", "simulation"));
  const double T = num(sim, "T", "simulation");
  const auto trials = static_cast<std::size_t>(num_or(sim, "trials", 1));
  const std::uint64_t seed = ctx.seed ? *ctx.seed
                                      : static_cast<std::uint64_t>(num_or(sim, "seed", 1));
  if (n < 1 || trials < 1) fail(ErrorCode::config, "simulation.n and simulation.trials must be >= 1");
  RunOptions opts;
  if (sim.contains("record_times")) opts.record_times = num_list(sim["record_times"], "record_times");
  if (sim.contains("snapshot_times"))
    opts.snapshot_times = num_list(sim["snapshot_times"], "snapshot_times");

  const fs::path dir = prepare_out_dir(ctx);
  json resolved = {{"command", "simulate"},
                   {"model", mc.resolved},
                   {"signal", sig.resolved},
                   {"simulation",
                    {{"n", n},
                     {"T", T},
                     {"trials", trials},
                     {"seed", seed},
                     {"record_times", opts.record_times},
                     {"snapshot_times", opts.snapshot_times}}}};
  write_resolved_config(dir, resolved);

  if (mc.type == "toy_sgd") {
    std::vector<double> marks = opts.record_times;
    if (marks.empty()) {
      for (int j = 0; j <= 20; ++j) marks.push_back(T * j / 20.0);
    }
    auto x0 = [&](Rng& rng) {
      return sig.x0_kind == "gaussian" ? sig.x0_mean + std::sqrt(sig.x0_variance) * rng.gaussian()
                                       : sig.x0_value;
    };
    const auto res = toy_sgd_1d_run(toy_f_prime_fn(mc.toy_f_prime), mc.toy_tau, mc.toy_sigma, n, T,
                                    x0, trials, seed, marks);
    auto os = open_out(dir, output_name(cfg, "samples", "samples.csv"));
    os << "t,trial,x\n";
    for (std::size_t j = 0; j < res.times.size(); ++j) {
      for (std::size_t tr = 0; tr < res.samples[j].size(); ++tr)
        os << format_double(res.times[j]) << ',' << tr << ',' << format_double(res.samples[j][tr])
           << '\n';
    }
    std::cout << "toy_sgd: " << trials << " trials, " << res.times.size() << " record times\n";
    return 0;
  }

  std::vector<TrajectoryRecord> records(trials);
  parallel_for(trials, ctx.threads, [&](std::size_t tr) {
    const std::uint64_t trial_seed = split_seed(seed, tr);
    EmpiricalState state = build_state(sig, n, mc.type == "pca", trial_seed);
    records[tr] = mc.type == "regression"
                      ? run_regression(std::move(state), mc.regression, T, trial_seed, opts)
                      : run_pca(std::move(state), mc.pca, T, trial_seed, opts);
  });

  {
    auto os = open_out(dir, output_name(cfg, "trajectories", "trajectories.csv"));
    for (std::size_t tr = 0; tr < trials; ++tr) write_trajectory_csv(os, records[tr], tr == 0);
  }
  if (!opts.snapshot_times.empty()) {
    auto os = open_out(dir, output_name(cfg, "snapshots", "snapshots.csv"));
    for (std::size_t tr = 0; tr < trials; ++tr) write_snapshots_csv(os, records[tr], tr == 0);
  }
  for (std::size_t tr = 0; tr < trials; ++tr) {
    const auto& rec = records[tr];
    std::ostringstream line;
    line << "trial " << tr << " seed " << rec.seed;
    for (const auto& [name, vals] : rec.observables)
      line << ' ' << name << "(T)=" << format_double(vals.back());
    std::cout << line.str() << '\n';
  }
  return 0;
}

int cmd_solve_pde(const std::string& config_path, const RunContext& ctx) {
  const json cfg = load_config(config_path);
  check_keys(cfg, {"model", "initial", "solver", "outputs"}, "config");
  const ModelConfig mc = parse_model(cfg);
  const DensityField mu0 = parse_initial(cfg);
  const SolverConfig sol = parse_solver(cfg);
  const AlgorithmSpec spec = spec_from_model(mc, sol.cap_b);

  const fs::path dir = prepare_out_dir(ctx);
  write_resolved_config(dir, json{{"command", "solve-pde"},
                                  {"model", mc.resolved},
                                  {"initial", initial_json(cfg, mu0)},
                                  {"solver", sol.resolved}});

  const auto result = solve_scaling_limit_pde(spec, mu0, sol.T, sol.opts);
  {
    auto os = open_out(dir, output_name(cfg, "densities", "densities.csv"));
    bool first = true;
    for (const auto& f : result.fields) {
      write_density_csv(os, f, first);
      first = false;
    }
  }
  {
    auto os = open_out(dir, output_name(cfg, "order_params", "order_params.csv"));
    write_order_params_csv(os, result.q_path);
  }
  {
    auto os = open_out(dir, output_name(cfg, "report", "fixed_point_report.json"));
    write_fixed_point_report_json(os, result.report);
  }
  {
    auto os = open_out(dir, output_name(cfg, "diagnostics", "diagnostics.json"));
    write_diagnostics_json(os, result.diagnostics);
  }
  std::cout << "solve-pde: " << result.report.interval_lengths.size() << " intervals, final sup distance "
            << format_double(result.report.final_sup_distance) << '\n';
  return 0;
}

int cmd_compare(const std::string& config_path, const RunContext& ctx) {
  const json cfg = load_config(config_path);
  check_keys(cfg, {"compare", "outputs"}, "config");
  const json& c = require(cfg, "compare", "config");
  check_keys(c, {"sim_csv", "pde_csv", "observable", "path_component", "z_max"}, "compare");
  const std::string sim_csv = resolve_path(config_path, str(c, "sim_csv", "compare"));
  const std::string pde_csv = resolve_path(config_path, str(c, "pde_csv", "compare"));
  const std::string observable = str(c, "observable", "compare");
  std::string component;
  if (c.contains("path_component")) {
    component = str(c, "path_component", "compare");
  } else if (observable == "mse") {
    component = "e";
  } else if (observable == "overlap_q") {
    component = "Q";
  } else if (observable == "reg_r") {
    component = "R";
  } else {
    component = observable;
  }
  const double z_max = num_or(c, "z_max", 4.0);

  std::ifstream sim_in(sim_csv);
  if (!sim_in) fail(ErrorCode::io, "cannot open '" + sim_csv + "'");
  const auto records = read_trajectory_csv(sim_in);
  std::ifstream pde_in(pde_csv);
  if (!pde_in) fail(ErrorCode::io, "cannot open '" + pde_csv + "'");
  const auto path = read_order_params_csv(pde_in);

  const auto report = compare_sim_to_pde(records, path, observable, component);

  const fs::path dir = prepare_out_dir(ctx);
  write_resolved_config(dir, json{{"command", "compare"},
                                  {"compare",
                                   {{"sim_csv", sim_csv},
                                    {"pde_csv", pde_csv},
                                    {"observable", observable},
                                    {"path_component", component},
                                    {"z_max", z_max}}}});
  {
    auto os = open_out(dir, output_name(cfg, "compare_csv", "compare.csv"));
    write_compare_csv(os, report);
  }
  {
    auto os = open_out(dir, output_name(cfg, "compare_json", "compare.json"));
    write_compare_json(os, report, z_max);
  }
  std::cout << "compare: " << report.trials << " trials, max |z| = " << format_double(report.max_abs_z)
            << (report.max_abs_z <= z_max ? " (pass)" : " (fail)") << '\n';
  return report.max_abs_z <= z_max ? 0 : 1;
}

int cmd_roc(const std::string& config_path, const RunContext& ctx) {
  const json cfg = load_config(config_path);
  check_keys(cfg, {"model", "initial", "solver", "roc", "outputs"}, "config");
  const ModelConfig mc = parse_model(cfg);
  const DensityField mu0 = parse_initial(cfg);
  SolverConfig sol = parse_solver(cfg);

  const json& r = require(cfg, "roc", "config");
  check_keys(r, {"times", "thresholds", "rho", "xi_on"}, "roc");
  const auto times = num_list(require(r, "times", "roc"), "roc.times");
  if (times.empty()) fail(ErrorCode::config, "roc.times must be non-empty");
  const double rho = num(r, "rho", "roc");
  const double xi_on = num(r, "xi_on", "roc");
  const json& th = require(r, "thresholds", "roc");
  check_keys(th, {"lo", "hi", "count"}, "roc.thresholds");
  const double lo = num(th, "lo", "roc.thresholds");
  const double hi = num(th, "hi", "roc.thresholds");
  const auto count = static_cast<std::size_t>(num(th, "count", "roc.thresholds"));
  if (count < 2 || !(hi > lo)) fail(ErrorCode::config, "roc.thresholds needs hi > lo and count >= 2");
  std::vector<double> thresholds(count);
  for (std::size_t i = 0; i < count; ++i)
    thresholds[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);

  sol.opts.store_times = times;
  sol.resolved["store_times"] = times;
  const AlgorithmSpec spec = spec_from_model(mc, sol.cap_b);

  const fs::path dir = prepare_out_dir(ctx);
  write_resolved_config(
      dir, json{{"command", "roc"},
                {"model", mc.resolved},
                {"initial", initial_json(cfg, mu0)},
                {"solver", sol.resolved},
                {"roc",
                 {{"times", times},
                  {"thresholds", {{"lo", lo}, {"hi", hi}, {"count", count}}},
                  {"rho", rho},
                  {"xi_on", xi_on}}}});

  const auto result = solve_scaling_limit_pde(spec, mu0, sol.T, sol.opts);
  auto os = open_out(dir, output_name(cfg, "roc", "roc.csv"));
  os << "t,c,tpr,fpr\n";
  for (double tq : times) {
    const auto it = std::min_element(result.fields.begin(), result.fields.end(),
                                     [tq](const DensityField& a, const DensityField& b) {
                                       return std::abs(a.t - tq) < std::abs(b.t - tq);
                                     });
    for (const auto& pt : roc_curve(*it, thresholds, rho, xi_on)) {
      os << format_double(it->t) << ',' << format_double(pt.c) << ',' << format_double(pt.tpr) << ','
         << format_double(pt.fpr) << '\n';
    }
  }
  std::cout << "roc: " << times.size() << " times x " << count << " thresholds\n";
  return 0;
}

int cmd_potential(const std::string& config_path, const RunContext& ctx) {
  const json cfg = load_config(config_path);
  check_keys(cfg, {"potential", "outputs"}, "config");
  const json& p = require(cfg, "potential", "config");
  check_keys(p, {"tau", "xi", "Phi", "betas", "grid"}, "potential");
  const double tau = num(p, "tau", "potential");
  const double xi = num(p, "xi", "potential");
  PhiSpec base = parse_phi(require(p, "Phi", "potential"), "potential.Phi");
  const Grid grid = p.contains("grid") ? parse_grid(p["grid"], "potential.grid") : Grid{};

  std::vector<double> betas;
  const json& b = require(p, "betas", "potential");
  if (b.is_array()) {
    betas = num_list(b, "potential.betas");
  } else {
    check_keys(b, {"lo", "hi", "count"}, "potential.betas");
    const double lo = num(b, "lo", "potential.betas");
    const double hi = num(b, "hi", "potential.betas");
    const auto count = static_cast<std::size_t>(num(b, "count", "potential.betas"));
    if (count < 2 || !(hi >= lo)) fail(ErrorCode::config, "potential.betas needs hi >= lo, count >= 2");
    for (std::size_t i = 0; i < count; ++i)
      betas.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  if (betas.empty()) fail(ErrorCode::config, "potential.betas must be non-empty");

  const fs::path dir = prepare_out_dir(ctx);
  write_resolved_config(dir, json{{"command", "potential"},
                                  {"potential",
                                   {{"tau", tau},
                                    {"xi", xi},
                                    {"Phi", phi_json(base)},
                                    {"betas", betas},
                                    {"grid", grid_json(grid)}}}});

  auto os = open_out(dir, output_name(cfg, "potential", "potential.csv"));
  os << "beta,x,E,minima_count\n";
  for (double beta : betas) {
    // beta multiplies the unit-strength penalty; base.beta acts as Phi's own scale
    const auto res = effective_potential(
        tau, beta, [&](double x) { return base.penalty(x); }, xi, grid);
    for (std::size_t i = 0; i < grid.m; ++i) {
      os << format_double(beta) << ',' << format_double(grid.node(i)) << ','
         << format_double(res.values[i]) << ',' << res.minima.size() << '\n';
    }
  }
  std::cout << "potential: " << betas.size() << " beta values on " << grid.m << " nodes\n";
  return 0;
}

int run_command(const std::string& command, const std::string& config_path, const RunContext& ctx) {
  if (command == "simulate") return cmd_simulate(config_path, ctx);
  if (command == "solve-pde") return cmd_solve_pde(config_path, ctx);
  if (command == "compare") return cmd_compare(config_path, ctx);
  if (command == "roc") return cmd_roc(config_path, ctx);
  if (command == "potential") return cmd_potential(config_path, ctx);
  fail(ErrorCode::invalid_argument, "unknown command '" + command +
                                        "' (expected simulate, solve-pde, compare, roc, potential)");
}

}  // namespace sll
