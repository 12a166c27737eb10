// Acceptance gate: one PASS/FAIL line per criterion, exit code = number of
// failures. Heavy simulations share the Example-3 PDE solution.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "sll/fixed_point.hpp"
#include "sll/fokker_planck.hpp"
#include "sll/metrics.hpp"
#include "sll/oracles.hpp"
#include "sll/reduce.hpp"
#include "sll/simulate.hpp"

using namespace sll;

namespace {

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

DensityField one_atom(const Grid& grid, double xi, double mean, double var) {
  DensityField f;
  f.grid = grid;
  f.atoms.atoms = {{xi, 1.0}};
  f.densities = {gaussian_density(grid, mean, var)};
  f.validate();
  return f;
}

double hist_l1(const std::vector<double>& hist, const std::vector<double>& ref, double width) {
  double l1 = 0.0;
  for (std::size_t b = 0; b < hist.size(); ++b) l1 += std::abs(hist[b] - ref[b]) * width;
  return l1;
}

// ---- Example 3: sparse regression with l1 regularization -------------------

constexpr double kEx3Tau = 0.2;
constexpr double kEx3Sigma = 1.0;
constexpr double kEx3Beta = 0.1;
constexpr double kEx3Rho = 0.1;

RegressionModel example3_model() {
  RegressionModel m;
  m.tau = kEx3Tau;
  m.sigma = kEx3Sigma;
  m.phi = PhiSpec::l1(kEx3Beta);
  m.sensing_dist = SampleDist::rademacher;
  return m;
}

EmpiricalState example3_state(std::size_t n, std::uint64_t seed) {
  EmpiricalState s;
  s.xi = make_sparse_target(n, kEx3Rho, 1.0);
  s.x.resize(n);
  Rng rng(split_seed(seed, 0x90));
  rng.fill_gaussian(s.x);
  return s;
}

SolveResult solve_example3_pde() {
  auto spec = make_regression_spec(kEx3Tau, kEx3Sigma, PhiSpec::l1(kEx3Beta));
  Grid grid{-8.0, 8.0, 1025};
  DensityField mu0;
  mu0.grid = grid;
  mu0.atoms.atoms = {{0.0, 1.0 - kEx3Rho}, {1.0, kEx3Rho}};
  mu0.densities = {gaussian_density(grid, 0.0, 1.0), gaussian_density(grid, 0.0, 1.0)};
  mu0.validate();
  SolveOptions opts;
  opts.dt = 2e-3;
  opts.q_dt = 0.01;
  opts.store_times = {0.2, 0.5, 2.0, 4.0, 8.0, 10.0};
  return solve_scaling_limit_pde(spec, mu0, 10.0, opts);
}

const DensityField& field_at(const SolveResult& sol, double t) {
  const auto it = std::min_element(sol.fields.begin(), sol.fields.end(),
                                   [t](const DensityField& a, const DensityField& b) {
                                     return std::abs(a.t - t) < std::abs(b.t - t);
                                   });
  return *it;
}

// fixed-point evidence gathered from the solves of criteria 1-3
struct NamedReport {
  std::string config;
  FixedPointReport report;
};
std::vector<NamedReport> g_reports;

// ---- criteria ---------------------------------------------------------------

bool criterion1() {
  Timer timer;
  const double tau = 0.2, sigma = 1.0, e0 = 1.0, T = 10.0;
  auto spec = make_regression_spec(tau, sigma, PhiSpec::none());
  Grid grid{-8.0, 8.0, 1025};
  auto mu0 = one_atom(grid, 0.0, 0.0, e0);
  SolveOptions opts;
  opts.dt = 2e-3;
  opts.q_dt = 0.01;
  auto sol = solve_scaling_limit_pde(spec, mu0, T, opts);
  g_reports.push_back({"regression closed-form", sol.report});

  double max_rel = 0.0;
  for (std::size_t j = 0; j < sol.q_path.size(); ++j) {
    const double exact = regression_mse_analytic(tau, sigma, e0, sol.q_path.time(j));
    max_rel = std::max(max_rel, std::abs(sol.q_path.values[j][0] - exact) / exact);
  }
  const double secs = timer.seconds();
  report(1, "regression e(t) vs closed form",
         max_rel < 1e-3 && sol.report.converged && secs < 30.0,
         fmt("max rel err %.2e, %.1fs", max_rel, secs));
  return max_rel < 1e-3;
}

bool criterion2() {
  Timer timer;
  const double tau = 0.2, omega = 2.0, q0 = 0.1, T = 5.0;
  auto spec = make_pca_spec(tau, omega, 0.0, PhiSpec::none());
  Grid grid{-6.0, 6.0, 1025};
  auto mu0 = one_atom(grid, 1.0, q0, 0.5);
  SolveOptions opts;
  opts.dt = 2e-3;
  opts.q_dt = 0.01;
  auto sol = solve_scaling_limit_pde(spec, mu0, T, opts);
  g_reports.push_back({"pca overlap", sol.report});

  auto oracle = pca_overlap_ode(tau, omega, q0, T, 1e-3);
  double max_err = 0.0;
  for (std::size_t j = 0; j < sol.q_path.size(); ++j)
    max_err = std::max(max_err, std::abs(sol.q_path.values[j][0] - oracle.at(sol.q_path.time(j))));
  const double secs = timer.seconds();
  report(2, "pca Q(t) vs overlap ODE", max_err < 1e-3 && sol.report.converged && secs < 60.0,
         fmt("max err %.2e, %.1fs", max_err, secs));
  return max_err < 1e-3;
}

bool criterion3(const SolveResult& pde) {
  Timer timer;
  const auto model = example3_model();
  const std::vector<double> times{0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
  const std::vector<std::size_t> ns{500, 2000, 10000};
  const std::size_t trials = 100;

  std::vector<double> sup_dev;
  double max_z = 0.0;
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    const std::size_t n = ns[ni];
    RunOptions opts;
    opts.record_times = times;
    std::vector<TrajectoryRecord> records;
    records.reserve(trials);
    for (std::size_t tr = 0; tr < trials; ++tr) {
      const std::uint64_t seed = split_seed(1000 + n, tr);
      records.push_back(run_regression(example3_state(n, seed), model, 10.0, seed, opts));
    }
    auto rep = compare_sim_to_pde(records, pde.q_path, "mse", "e");
    double dev = 0.0;
    for (const auto& row : rep.rows) {
      dev = std::max(dev, std::abs(row.sim_mean - row.pde_value));
      if (n == 10000 && (row.t == 1.0 || row.t == 5.0 || row.t == 10.0))
        max_z = std::max(max_z, std::abs(row.z));
    }
    sup_dev.push_back(dev);
  }
  const bool monotone = sup_dev[0] > sup_dev[1] && sup_dev[1] > sup_dev[2];
  const double secs = timer.seconds();
  const bool pass = max_z <= 4.0 && monotone && secs < 600.0;
  report(3, "finite-n mse converges to the PDE",
         pass,
         fmt("max |z| %.2f at n=1e4; sup dev %.1e > ", max_z, sup_dev[0]) +
             fmt("%.1e > %.1e, ", sup_dev[1], sup_dev[2]) + fmt("%.0fs", secs));
  return pass;
}

bool criterion4(const SolveResult& pde) {
  Timer timer;
  const auto model = example3_model();
  const std::size_t n = 100000;
  const std::vector<double> snap_times{0.2, 2.0, 4.0, 10.0};
  RunOptions opts;
  opts.record_times = {10.0};
  opts.snapshot_times = snap_times;
  const std::uint64_t seed = split_seed(42, 0);
  auto rec = run_regression(example3_state(n, seed), model, 10.0, seed, opts);

  BinGrid bins{-3.0, 5.0, 50};
  double worst = 0.0;
  for (const auto& [t, state] : rec.snapshots) {
    const auto& f = field_at(pde, t);
    auto hist = histogram(state, 1.0, bins);
    auto ref = rebin_density(f.grid, conditional_density_slice(f, 1.0), bins);
    worst = std::max(worst, hist_l1(hist, ref, bins.width()));
  }
  const double secs = timer.seconds();
  const bool pass = worst <= 0.1 && rec.snapshots.size() == snap_times.size() && secs < 300.0;
  report(4, "n=1e5 conditional densities match pi_t(x|xi=1)", pass,
         fmt("worst L1 %.3f, %.0fs", worst, secs));
  return pass;
}

bool criterion5() {
  Timer timer;
  const double tau = 0.5, sigma = 1.0, e0 = 1.0, T = 2.0;
  auto spec = make_regression_spec(tau, sigma, PhiSpec::none());
  auto e_path = regression_mse_ode(tau, sigma, e0, T, 1e-3);

  OrderParameterPath q;
  q.dt = 0.02;
  q.names = {"e"};
  for (std::size_t j = 0; j <= 100; ++j) q.values.push_back({e_path.at(q.dt * j)});

  Grid grid{-6.0, 6.0, 601};
  FrozenPdeProblem problem{&spec, q, 0.0, T, 5e-3};
  auto fields = solve_frozen(problem, one_atom(grid, 0.0, 0.0, e0));

  const std::vector<double> checkpoints{0.4, 0.8, 1.2, 1.6, 2.0};
  auto res = decoupled_sde_ensemble(
      spec, q, 0.0, [](Rng& r) { return r.gaussian(); }, 100000, T, 5e-3, 2024u, checkpoints,
      BinGrid{-4.0, 4.0, 50});

  double worst = 0.0;
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    const auto node = static_cast<std::size_t>(std::llround(checkpoints[k] / q.dt));
    auto ref = rebin_density(grid, fields[node].densities[0], res.bins);
    worst = std::max(worst, hist_l1(res.histograms[k], ref, res.bins.width()));
  }
  const double secs = timer.seconds();
  const bool pass = worst <= 0.05 && res.divergent == 0 && secs < 120.0;
  report(5, "Euler-Maruyama ensemble vs frozen PDE", pass,
         fmt("worst L1 %.3f over 5 times, %.0fs", worst, secs));
  return pass;
}

bool criterion6() {
  Timer timer;
  const std::size_t n = 200, samples = 100000;
  RegressionModel m;
  m.tau = 0.5;
  m.sigma = 1.0;

  // three frozen states: at the target, generic, uniformly shifted
  std::vector<EmpiricalState> states;
  {
    EmpiricalState s;
    s.xi = make_sparse_target(n, 0.1, 1.0);
    s.x = s.xi;
    states.push_back(s);
  }
  {
    EmpiricalState s;
    s.xi = make_sparse_target(n, 0.1, 1.0);
    s.x.resize(n);
    Rng rng(7);
    rng.fill_gaussian(s.x);
    states.push_back(s);
  }
  {
    EmpiricalState s = states.front();
    for (auto& v : s.x) v += 1.0;
    states.push_back(s);
  }

  // conditional moments of g_i = tau (w - a.(x-xi)/sqrt n) a_i / sqrt n for
  // gaussian sensing:
  //   E g_i = -tau d_i / n
  //   E g_i^2 = tau^2 (sigma^2 + e + 2 d_i^2 / n) / n
  //   E g_i g_j = 2 tau^2 d_i d_j / n^2
  double worst_sigmas = 0.0;
  for (std::size_t si = 0; si < states.size(); ++si) {
    const auto& s = states[si];
    auto p = gki_moment_probe(s, m, samples, 100 + si, 0, 1);
    const double d0 = s.x[0] - s.xi[0];
    const double d1 = s.x[1] - s.xi[1];
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += (s.x[i] - s.xi[i]) * (s.x[i] - s.xi[i]);
    e /= static_cast<double>(n);
    const double nn = static_cast<double>(n);
    const double pred_g = -m.tau * d0 / nn;
    const double pred_g2 = m.tau * m.tau * (m.sigma * m.sigma + e + 2.0 * d0 * d0 / nn) / nn;
    const double pred_gg = 2.0 * m.tau * m.tau * d0 * d1 / (nn * nn);
    worst_sigmas = std::max(worst_sigmas, std::abs(p.mean_g - pred_g) / p.se_mean_g);
    worst_sigmas = std::max(worst_sigmas, std::abs(p.mean_g2 - pred_g2) / p.se_mean_g2);
    worst_sigmas = std::max(worst_sigmas, std::abs(p.mean_gigj - pred_gg) / p.se_mean_gigj);
  }
  const double secs = timer.seconds();
  const bool pass = worst_sigmas <= 4.0 && secs < 60.0;
  report(6, "rank-one increment moment identities", pass,
         fmt("worst deviation %.2f standard errors, %.1fs", worst_sigmas, secs));
  return pass;
}

bool criterion7() {
  Timer timer;
  // 1e4-step drift-diffusion evolution
  Grid grid{-6.0, 6.0, 513};
  auto u = gaussian_density(grid, 0.0, 1.0);
  FpDiagnostics diag;
  for (std::size_t s = 0; s < 10000; ++s)
    fp_step_atom(u, grid, [](double x) { return -0.5 * x; }, 0.25, 1e-3, diag, 0);
  const bool pde_ok = diag.max_mass_drift <= 1e-8 && diag.clipped_mass <= 1e-10;

  // 1e5 pca steps at n=1000: each step checks the incoming norm to 1e-9 sqrt n
  const std::size_t n = 1000;
  EmpiricalState s;
  s.x.resize(n);
  Rng init(13);
  init.fill_gaussian(s.x);
  s.xi.assign(n, 1.0);
  for (std::size_t i = 0; i < n; i += 2) s.xi[i] = -1.0;
  normalize_to_sphere(s.x);
  PcaModel pm;
  pm.tau = 0.2;
  pm.omega = 2.0;
  RunOptions opts;
  opts.record_times = {100.0};
  auto rec = run_pca(std::move(s), pm, 100.0, 99u, opts);  // 1e5 steps, throws on norm drift
  const bool pca_ok = !rec.times.empty();

  const double secs = timer.seconds();
  report(7, "conservation and sphere-projection invariants", pde_ok && pca_ok,
         fmt("mass drift %.1e, clipped %.1e, ", diag.max_mass_drift, diag.clipped_mass) +
             fmt("%.0fs", secs));
  return pde_ok && pca_ok;
}

namespace perm {

class PermutedDraws : public DrawProvider {
 public:
  PermutedDraws(DrawProvider& inner, const std::vector<std::size_t>& p)
      : inner_(inner), perm_(p), tmp_(p.size()) {}
  void regression_draws(std::span<double> a, double& w) override {
    inner_.regression_draws(tmp_, w);
    for (std::size_t i = 0; i < perm_.size(); ++i) a[i] = tmp_[perm_[i]];
  }
  void pca_draws(std::span<double> a, double& c) override {
    inner_.pca_draws(tmp_, c);
    for (std::size_t i = 0; i < perm_.size(); ++i) a[i] = tmp_[perm_[i]];
  }

 private:
  DrawProvider& inner_;
  const std::vector<std::size_t>& perm_;
  std::vector<double> tmp_;
};

}  // namespace perm

bool criterion8() {
  Timer timer;
  const std::size_t n = 128;
  const double T = 0.3;
  RunOptions opts;
  opts.record_times = {0.1, 0.2, 0.3};

  RegressionModel rm = example3_model();
  rm.sensing_dist = SampleDist::gaussian;
  PcaModel pm;
  pm.tau = 0.2;
  pm.omega = 2.0;
  pm.beta = 0.1;
  pm.phi = PhiSpec::l1(1.0);

  EmpiricalState reg0 = example3_state(n, 5u);
  EmpiricalState pca0;
  pca0.x.resize(n);
  Rng init(6);
  init.fill_gaussian(pca0.x);
  pca0.xi.assign(n, 1.0);
  for (std::size_t i = 0; i < n; i += 2) pca0.xi[i] = -1.0;
  normalize_to_sphere(pca0.x);

  RngDrawProvider reg_base(11u, rm.sensing_dist, SampleDist::rademacher, rm.sigma);
  auto reg_ref = run_regression(reg0, rm, T, reg_base, opts);
  RngDrawProvider pca_base(12u, pm.noise_dist, pm.spike_dist, 0.0);
  auto pca_ref = run_pca(pca0, pm, T, pca_base, opts);

  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0u);
  std::mt19937_64 gen(2718);
  bool all_equal = true;
  for (int rep = 0; rep < 20 && all_equal; ++rep) {
    std::shuffle(p.begin(), p.end(), gen);
    EmpiricalState reg_p, pca_p;
    for (auto i : p) {
      reg_p.x.push_back(reg0.x[i]);
      reg_p.xi.push_back(reg0.xi[i]);
      pca_p.x.push_back(pca0.x[i]);
      pca_p.xi.push_back(pca0.xi[i]);
    }
    RngDrawProvider ri(11u, rm.sensing_dist, SampleDist::rademacher, rm.sigma);
    perm::PermutedDraws rp(ri, p);
    auto reg_run = run_regression(reg_p, rm, T, rp, opts);
    RngDrawProvider pi(12u, pm.noise_dist, pm.spike_dist, 0.0);
    perm::PermutedDraws pp(pi, p);
    auto pca_run = run_pca(pca_p, pm, T, pp, opts);

    all_equal = reg_run.observables.at("mse") == reg_ref.observables.at("mse") &&
                pca_run.observables.at("overlap_q") == pca_ref.observables.at("overlap_q") &&
                pca_run.observables.at("reg_r") == pca_ref.observables.at("reg_r");
  }
  const double secs = timer.seconds();
  report(8, "exchangeability: joint permutation is bitwise invisible", all_equal,
         fmt("20 permutations, %.1fs", secs));
  return all_equal;
}

bool criterion9(const SolveResult& pde) {
  Timer timer;
  std::vector<double> thresholds;
  for (int i = 0; i <= 60; ++i) thresholds.push_back(-1.0 + 3.0 * i / 60.0);
  const std::vector<double> times{0.5, 2.0, 8.0};

  std::vector<std::vector<RocPoint>> curves;
  for (double t : times)
    curves.push_back(roc_curve(field_at(pde, t), thresholds, kEx3Rho, 1.0));

  bool monotone = true;
  for (const auto& curve : curves) {
    for (std::size_t i = 1; i < curve.size(); ++i) {
      if (curve[i].tpr > curve[i - 1].tpr + 1e-12 || curve[i].fpr > curve[i - 1].fpr + 1e-12)
        monotone = false;
    }
  }

  // dominance at matched fpr: for each swept c, the later curve's (fpr, tpr)
  // must lie on or above the earlier curve interpolated at the same fpr
  auto tpr_at_fpr = [](const std::vector<RocPoint>& curve, double f) {
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};  // c -> +inf anchor
    for (auto it = curve.rbegin(); it != curve.rend(); ++it) pts.emplace_back(it->fpr, it->tpr);
    pts.emplace_back(1.0, 1.0);  // c -> -inf anchor
    std::sort(pts.begin(), pts.end());
    auto hi = std::lower_bound(pts.begin(), pts.end(), std::make_pair(f, -1.0));
    if (hi == pts.begin()) return hi->second;
    if (hi == pts.end()) return pts.back().second;
    auto lo = std::prev(hi);
    if (hi->first == lo->first) return std::max(lo->second, hi->second);
    const double s = (f - lo->first) / (hi->first - lo->first);
    return lo->second + s * (hi->second - lo->second);
  };
  double worst_frac = 1.0;
  for (std::size_t k = 1; k < curves.size(); ++k) {
    std::size_t better = 0;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      if (curves[k][i].tpr >= tpr_at_fpr(curves[k - 1], curves[k][i].fpr) - 1e-9) ++better;
    }
    worst_frac = std::min(worst_frac, static_cast<double>(better) / thresholds.size());
  }
  const double secs = timer.seconds();
  const bool pass = monotone && worst_frac >= 0.95;
  report(9, "roc curves monotone in c and improving in t", pass,
         fmt("min dominated fraction %.2f, %.1fs", worst_frac, secs));
  return pass;
}

bool criterion10() {
  Timer timer;
  auto Phi = [](double x) { return std::tanh(2.0 * std::abs(x)); };
  Grid pot_grid{-2.0, 8.0, 2001};

  // minima count transitions 1 -> 2 exactly once as beta sweeps upward
  std::vector<std::size_t> counts;
  for (double beta : {0.05, 0.1, 0.2, 0.25, 0.4, 0.6, 0.8, 1.0})
    counts.push_back(effective_potential(0.2, beta, Phi, 3.0, pot_grid).minima.size());
  bool transition = counts.front() == 1 && counts.back() == 2;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] < counts[i - 1]) transition = false;
  }

  // supercritical beta traps the density near 0; subcritical relaxes to xi=3
  Grid grid{-6.0, 9.0, 601};
  SolveOptions opts;
  opts.dt = 0.05;
  opts.q_dt = 0.5;
  auto super_spec = make_regression_spec(0.2, 1.0, PhiSpec::tanh_reg(3.0, 2.0));
  auto super = solve_scaling_limit_pde(super_spec, one_atom(grid, 3.0, 0.0, 1.0), 1e4, opts);
  auto sub_spec = make_regression_spec(0.2, 1.0, PhiSpec::tanh_reg(0.2, 2.0));
  auto sub = solve_scaling_limit_pde(sub_spec, one_atom(grid, 3.0, 0.0, 1.0), 100.0, opts);

  const double e_super = super.q_path.values.back()[0];
  const double e_sub = sub.q_path.values.back()[0];
  const double secs = timer.seconds();
  const bool pass = transition && e_super > e_sub;
  report(10, "metastable trap under a nonconvex regularizer", pass,
         fmt("e_super(1e4) %.2f vs e_sub %.3f, %.0fs", e_super, e_sub, secs));
  return pass;
}

bool criterion11() {
  Timer timer;
  bool pass = !g_reports.empty();
  std::size_t worst_iters = 0;
  for (const auto& nr : g_reports) {
    for (auto it : nr.report.iterations_per_interval) worst_iters = std::max(worst_iters, it);
    for (const auto& dists : nr.report.iterate_distances) {
      if (dists.size() < 2) continue;
      // eventual geometric decay: every ratio past the first iterate <= 0.9
      for (std::size_t i = 2; i < dists.size(); ++i) {
        if (dists[i] > 0.9 * dists[i - 1]) pass = false;
      }
      if (dists.back() > 0.9 * dists[dists.size() - 2]) pass = false;
    }
  }
  if (worst_iters > 10) pass = false;
  const double secs = timer.seconds();
  report(11, "fixed-point iterations converge geometrically", pass,
         fmt("max iterations per interval %.0f over ", static_cast<double>(worst_iters)) +
             fmt("%.0f solves, %.1fs", static_cast<double>(g_reports.size()), secs));
  return pass;
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  auto ex3 = solve_example3_pde();
  g_reports.push_back({"example 3", ex3.report});
  criterion3(ex3);
  criterion4(ex3);
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9(ex3);
  criterion10();
  criterion11();
  std::printf("%d of 11 criteria failed\n", g_failures);
  return g_failures;
}
