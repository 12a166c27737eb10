#include "sll/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "sll/reduce.hpp"

namespace sll {

namespace {

constexpr double kDivergenceGuard = 1e6;

void fill_dist(Rng& rng, SampleDist dist, std::span<double> out) {
  if (dist == SampleDist::gaussian)
    rng.fill_gaussian(out);
  else
    rng.fill_rademacher(out);
}

double draw_dist(Rng& rng, SampleDist dist) {
  return dist == SampleDist::gaussian ? rng.gaussian() : rng.rademacher();
}

// observable reductions, permutation invariant
double mse_of_state(const EmpiricalState& s) {
  InvariantSum acc;
  for (std::size_t i = 0; i < s.n(); ++i) {
    const double d = s.x[i] - s.xi[i];
    acc.add(d * d);
  }
  return acc.value() / static_cast<double>(s.n());
}

double overlap_of_state(const EmpiricalState& s) {
  InvariantSum acc;
  for (std::size_t i = 0; i < s.n(); ++i) acc.add(s.x[i] * s.xi[i]);
  return acc.value() / static_cast<double>(s.n());
}

double reg_r_of_state(const EmpiricalState& s, const PhiSpec& phi) {
  InvariantSum acc;
  for (std::size_t i = 0; i < s.n(); ++i) acc.add(s.x[i] * phi.grad(s.x[i]));
  return acc.value() / static_cast<double>(s.n());
}

std::vector<double> default_record_times(double T) {
  std::vector<double> ts;
  const std::size_t count = 200;
  for (std::size_t j = 0; j <= count; ++j) ts.push_back(T * static_cast<double>(j) / count);
  return ts;
}

// map requested times to step indices (k = round(t n), clamped to the run)
struct Schedule {
  std::vector<std::pair<std::size_t, std::size_t>> marks;  // (step k, output slot)
  static Schedule build(const std::vector<double>& times, std::size_t n, std::size_t steps) {
    Schedule s;
    for (std::size_t idx = 0; idx < times.size(); ++idx) {
      auto k = static_cast<std::size_t>(
          std::clamp<long long>(std::llround(times[idx] * static_cast<double>(n)), 0,
                                static_cast<long long>(steps)));
      s.marks.emplace_back(k, idx);
    }
    std::sort(s.marks.begin(), s.marks.end());
    return s;
  }
};

}  // namespace

void RegressionModel::validate() const {
  if (!(tau > 0.0)) fail(ErrorCode::invalid_argument, "regression model requires tau > 0");
  if (!(sigma >= 0.0)) fail(ErrorCode::invalid_argument, "regression model requires sigma >= 0");
}

void PcaModel::validate() const {
  if (!(tau > 0.0)) fail(ErrorCode::invalid_argument, "pca model requires tau > 0");
  if (!(omega > 0.0)) fail(ErrorCode::invalid_argument, "pca model requires omega > 0");
  if (!(beta >= 0.0)) fail(ErrorCode::invalid_argument, "pca model requires beta >= 0");
}

namespace {

// striped order-exact dot: every term is snapped, so the stripe partition
// does not affect the result
double snapped_dot(std::span<const double> a, const double* x, const double* xi, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += snap30(a[i] * (x[i] - xi[i]));
    s1 += snap30(a[i + 1] * (x[i + 1] - xi[i + 1]));
    s2 += snap30(a[i + 2] * (x[i + 2] - xi[i + 2]));
    s3 += snap30(a[i + 3] * (x[i + 3] - xi[i + 3]));
  }
  for (; i < n; ++i) s0 += snap30(a[i] * (x[i] - xi[i]));
  return (s0 + s1) + (s2 + s3);
}

[[noreturn]] void report_divergence(const char* algo, std::size_t k, const double* x,
                                    std::size_t n) {
  std::size_t worst = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (!(std::abs(x[i]) <= std::abs(x[worst])) || !std::isfinite(x[i])) worst = i;
  }
  fail(ErrorCode::divergence, std::string(algo) + " update diverged at step " + std::to_string(k) +
                                  ", coordinate " + std::to_string(worst));
}

}  // namespace

void regression_step(EmpiricalState& state, const RegressionModel& model, std::span<const double> a,
                     double w) {
  const std::size_t n = state.n();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  const double inv_n = 1.0 / static_cast<double>(n);

  const double dot = snapped_dot(a, state.x.data(), state.xi.data(), n);  // a . (x - xi)
  const double residual = w - dot * inv_sqrt_n;
  const double c = model.tau * residual * inv_sqrt_n;

  const PhiSpec& phi = model.phi;
  double* x = state.x.data();
  double maxabs = 0.0;
  if (phi.is_zero()) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = x[i] + c * a[i];
      maxabs = std::max(maxabs, std::abs(v));
      x[i] = v;
    }
  } else if (phi.kind == PhiSpec::Kind::l1) {
    const double step = phi.beta * inv_n;
    double m0 = 0.0, m1 = 0.0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
      double v0 = x[i] + c * a[i];
      double v1 = x[i + 1] + c * a[i + 1];
      // branchless beta*sgn(v)/n
      v0 -= step * (static_cast<double>(v0 > 0.0) - static_cast<double>(v0 < 0.0));
      v1 -= step * (static_cast<double>(v1 > 0.0) - static_cast<double>(v1 < 0.0));
      m0 = std::max(m0, std::abs(v0));
      m1 = std::max(m1, std::abs(v1));
      x[i] = v0;
      x[i + 1] = v1;
    }
    for (; i < n; ++i) {
      double v = x[i] + c * a[i];
      v -= step * (static_cast<double>(v > 0.0) - static_cast<double>(v < 0.0));
      m0 = std::max(m0, std::abs(v));
      x[i] = v;
    }
    maxabs = std::max(m0, m1);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double v = x[i] + c * a[i];
      v -= phi.grad(v) * inv_n;
      maxabs = std::max(maxabs, std::abs(v));
      x[i] = v;
    }
  }
  if (!(maxabs <= kDivergenceGuard)) report_divergence("regression", state.k, x, n);
  ++state.k;
}

void pca_step(EmpiricalState& state, const PcaModel& model, std::span<const double> a, double c) {
  const std::size_t n = state.n();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double inv_n = 1.0 / static_cast<double>(n);
  const double spike_scale = std::sqrt(model.omega * inv_n);
  const double* x = state.x.data();
  const double* xi = state.xi.data();

  double ax0 = 0.0, ax1 = 0.0, xx0 = 0.0, xx1 = 0.0, nn0 = 0.0, nn1 = 0.0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    ax0 += snap30(a[i] * x[i]);
    ax1 += snap30(a[i + 1] * x[i + 1]);
    xx0 += snap30(xi[i] * x[i]);
    xx1 += snap30(xi[i + 1] * x[i + 1]);
    nn0 += snap30(x[i] * x[i]);
    nn1 += snap30(x[i + 1] * x[i + 1]);
  }
  for (; i < n; ++i) {
    ax0 += snap30(a[i] * x[i]);
    xx0 += snap30(xi[i] * x[i]);
    nn0 += snap30(x[i] * x[i]);
  }
  const double norm0 = std::sqrt(nn0 + nn1);
  if (std::abs(norm0 - sqrt_n) > 1e-9 * sqrt_n)
    fail(ErrorCode::invalid_argument,
         "pca_step requires ||x|| = sqrt(n); got " + std::to_string(norm0));

  const double y_dot_x = spike_scale * c * (xx0 + xx1) + (ax0 + ax1);
  const double gain = model.tau * inv_n * y_dot_x;

  const PhiSpec& phi = model.phi;
  const bool apply_phi = model.beta != 0.0 && !phi.is_zero();
  const bool phi_l1 = apply_phi && phi.kind == PhiSpec::Kind::l1;
  const double l1_step = model.beta * phi.beta * inv_n;
  double* xm = state.x.data();
  double maxabs = 0.0;
  double n20 = 0.0, n21 = 0.0;
  for (i = 0; i < n; ++i) {
    const double y = spike_scale * c * xi[i] + a[i];
    double v = xm[i] + gain * y;
    if (phi_l1) {
      v -= l1_step * (static_cast<double>(v > 0.0) - static_cast<double>(v < 0.0));
    } else if (apply_phi) {
      v -= model.beta * phi.grad(v) * inv_n;
    }
    maxabs = std::max(maxabs, std::abs(v));
    xm[i] = v;
    if (i & 1)
      n21 += snap30(v * v);
    else
      n20 += snap30(v * v);
  }
  if (!(maxabs <= kDivergenceGuard)) report_divergence("pca", state.k, xm, n);
  const double norm = std::sqrt(n20 + n21);
  if (!(norm > 0.0)) fail(ErrorCode::divergence, "degenerate normalization: ||eta(x)|| = 0 at step " +
                                                     std::to_string(state.k));
  const double scale = sqrt_n / norm;
  for (i = 0; i < n; ++i) xm[i] *= scale;
  ++state.k;
}

void RngDrawProvider::regression_draws(std::span<double> a, double& w) {
  fill_dist(rng_, sensing_, a);
  w = sigma_ * rng_.gaussian();
}

void RngDrawProvider::pca_draws(std::span<double> a, double& c) {
  fill_dist(rng_, sensing_, a);
  c = draw_dist(rng_, spike_);
}

namespace {

template <class StepFn, class RecordFn>
TrajectoryRecord run_loop(EmpiricalState& state, double T, const RunOptions& opts, StepFn step,
                          RecordFn record) {
  state.validate();
  const std::size_t n = state.n();
  const auto steps = static_cast<std::size_t>(std::floor(static_cast<double>(n) * T));

  std::vector<double> times = opts.record_times.empty() ? default_record_times(T) : opts.record_times;
  std::sort(times.begin(), times.end());
  auto rec_sched = Schedule::build(times, n, steps);
  auto snap_sched = Schedule::build(opts.snapshot_times, n, steps);

  TrajectoryRecord rec;
  rec.times.resize(times.size());

  std::size_t ri = 0, si = 0;
  for (std::size_t k = 0; k <= steps; ++k) {
    while (ri < rec_sched.marks.size() && rec_sched.marks[ri].first == k) {
      const double t = static_cast<double>(k) / static_cast<double>(n);
      rec.times[rec_sched.marks[ri].second] = t;
      record(rec, rec_sched.marks[ri].second, state);
      ++ri;
    }
    while (si < snap_sched.marks.size() && snap_sched.marks[si].first == k) {
      rec.snapshots.emplace_back(static_cast<double>(k) / static_cast<double>(n), state);
      ++si;
    }
    if (k < steps) step(state);
  }

  // output slots are ordered by requested time; drop duplicates mapping to
  // the same step so recorded times stay strictly increasing
  std::vector<double> ts;
  std::map<std::string, std::vector<double>> obs;
  for (std::size_t j = 0; j < rec.times.size(); ++j) {
    if (!ts.empty() && rec.times[j] <= ts.back()) continue;
    ts.push_back(rec.times[j]);
    for (auto& [name, vals] : rec.observables) obs[name].push_back(vals[j]);
  }
  rec.times = std::move(ts);
  rec.observables = std::move(obs);
  return rec;
}

}  // namespace

TrajectoryRecord run_regression(EmpiricalState state, const RegressionModel& model, double T,
                                DrawProvider& draws, const RunOptions& opts) {
  model.validate();
  std::vector<double> a(state.n());
  auto rec = run_loop(
      state, T, opts,
      [&](EmpiricalState& s) {
        double w = 0.0;
        draws.regression_draws(a, w);
        regression_step(s, model, a, w);
      },
      [&](TrajectoryRecord& r, std::size_t slot, const EmpiricalState& s) {
        auto& mse = r.observables["mse"];
        mse.resize(r.times.size(), 0.0);
        mse[slot] = mse_of_state(s);
      });
  return rec;
}

namespace {

inline double rademacher_at(const uint64_t* words, std::size_t i) {
  constexpr uint64_t kOne = 0x3ff0000000000000ULL;
  const uint64_t sign = ((words[i >> 6] >> (i & 63)) & 1u) << 63;
  return std::bit_cast<double>(kOne | sign);
}

// Rademacher sensing without materializing the draw vector: the +/-1 values
// are re-expanded from the raw bit words in both passes. Term-for-term this
// computes exactly what regression_step computes on the expanded vector.
void fast_regression_step(EmpiricalState& state, const RegressionModel& model,
                          const uint64_t* words, double w) {
  const std::size_t n = state.n();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  const double inv_n = 1.0 / static_cast<double>(n);
  double* x = state.x.data();
  const double* xi = state.xi.data();

  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += snap30(rademacher_at(words, i) * (x[i] - xi[i]));
    s1 += snap30(rademacher_at(words, i + 1) * (x[i + 1] - xi[i + 1]));
    s2 += snap30(rademacher_at(words, i + 2) * (x[i + 2] - xi[i + 2]));
    s3 += snap30(rademacher_at(words, i + 3) * (x[i + 3] - xi[i + 3]));
  }
  for (; i < n; ++i) s0 += snap30(rademacher_at(words, i) * (x[i] - xi[i]));
  const double dot = (s0 + s1) + (s2 + s3);
  const double residual = w - dot * inv_sqrt_n;
  const double c = model.tau * residual * inv_sqrt_n;

  const PhiSpec& phi = model.phi;
  double maxabs = 0.0;
  if (phi.is_zero()) {
    for (i = 0; i < n; ++i) {
      const double v = x[i] + c * rademacher_at(words, i);
      maxabs = std::max(maxabs, std::abs(v));
      x[i] = v;
    }
  } else if (phi.kind == PhiSpec::Kind::l1) {
    const double step = phi.beta * inv_n;
    double m0 = 0.0, m1 = 0.0;
    for (i = 0; i + 2 <= n; i += 2) {
      double v0 = x[i] + c * rademacher_at(words, i);
      double v1 = x[i + 1] + c * rademacher_at(words, i + 1);
      v0 -= step * (static_cast<double>(v0 > 0.0) - static_cast<double>(v0 < 0.0));
      v1 -= step * (static_cast<double>(v1 > 0.0) - static_cast<double>(v1 < 0.0));
      m0 = std::max(m0, std::abs(v0));
      m1 = std::max(m1, std::abs(v1));
      x[i] = v0;
      x[i + 1] = v1;
    }
    for (; i < n; ++i) {
      double v = x[i] + c * rademacher_at(words, i);
      v -= step * (static_cast<double>(v > 0.0) - static_cast<double>(v < 0.0));
      m0 = std::max(m0, std::abs(v));
      x[i] = v;
    }
    maxabs = std::max(m0, m1);
  } else {
    for (i = 0; i < n; ++i) {
      double v = x[i] + c * rademacher_at(words, i);
      v -= phi.grad(v) * inv_n;
      maxabs = std::max(maxabs, std::abs(v));
      x[i] = v;
    }
  }
  if (!(maxabs <= kDivergenceGuard)) report_divergence("regression", state.k, x, n);
  ++state.k;
}

}  // namespace

TrajectoryRecord run_regression(EmpiricalState state, const RegressionModel& model, double T,
                                uint64_t seed, const RunOptions& opts) {
  if (model.sensing_dist == SampleDist::rademacher) {
    model.validate();
    Rng rng(seed);
    std::vector<uint64_t> words((state.n() + 63) / 64);
    auto rec = run_loop(
        state, T, opts,
        [&](EmpiricalState& s) {
          for (auto& word : words) word = rng.next_u64();
          const double w = model.sigma * rng.gaussian();
          fast_regression_step(s, model, words.data(), w);
        },
        [&](TrajectoryRecord& r, std::size_t slot, const EmpiricalState& s) {
          auto& mse = r.observables["mse"];
          mse.resize(r.times.size(), 0.0);
          mse[slot] = mse_of_state(s);
        });
    rec.seed = seed;
    return rec;
  }
  RngDrawProvider draws(seed, model.sensing_dist, SampleDist::rademacher, model.sigma);
  auto rec = run_regression(std::move(state), model, T, draws, opts);
  rec.seed = seed;
  return rec;
}

TrajectoryRecord run_pca(EmpiricalState state, const PcaModel& model, double T, DrawProvider& draws,
                         const RunOptions& opts) {
  model.validate();
  normalize_to_sphere(state.xi);
  normalize_to_sphere(state.x);
  std::vector<double> a(state.n());
  auto rec = run_loop(
      state, T, opts,
      [&](EmpiricalState& s) {
        double c = 0.0;
        draws.pca_draws(a, c);
        pca_step(s, model, a, c);
      },
      [&](TrajectoryRecord& r, std::size_t slot, const EmpiricalState& s) {
        auto& q = r.observables["overlap_q"];
        auto& rr = r.observables["reg_r"];
        q.resize(r.times.size(), 0.0);
        rr.resize(r.times.size(), 0.0);
        q[slot] = overlap_of_state(s);
        rr[slot] = reg_r_of_state(s, model.phi);
      });
  return rec;
}

TrajectoryRecord run_pca(EmpiricalState state, const PcaModel& model, double T, uint64_t seed,
                         const RunOptions& opts) {
  RngDrawProvider draws(seed, model.noise_dist, model.spike_dist, 0.0);
  auto rec = run_pca(std::move(state), model, T, draws, opts);
  rec.seed = seed;
  return rec;
}

ToySgdResult toy_sgd_1d_run(const std::function<double(double)>& f_prime, double tau, double sigma,
                            std::size_t n, double T, const std::function<double(Rng&)>& x0_sampler,
                            std::size_t trials, uint64_t seed,
                            const std::vector<double>& record_times) {
  if (trials < 1) fail(ErrorCode::invalid_argument, "toy SGD requires trials >= 1");
  const auto steps = static_cast<std::size_t>(std::floor(static_cast<double>(n) * T));
  auto sched = Schedule::build(record_times, n, steps);

  ToySgdResult out;
  out.times.resize(record_times.size());
  out.samples.assign(record_times.size(), std::vector<double>(trials, 0.0));

  const double tau_over_n = tau / static_cast<double>(n);
  const double noise_scale = tau_over_n * std::sqrt(static_cast<double>(n)) * sigma;

  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(split_seed(seed, trial));
    double x = x0_sampler(rng);
    std::size_t mi = 0;
    for (std::size_t k = 0; k <= steps; ++k) {
      while (mi < sched.marks.size() && sched.marks[mi].first == k) {
        out.times[sched.marks[mi].second] = static_cast<double>(k) / static_cast<double>(n);
        out.samples[sched.marks[mi].second][trial] = x;
        ++mi;
      }
      if (k == steps) break;
      x -= tau_over_n * f_prime(x) + noise_scale * rng.gaussian();
      if (!(std::abs(x) <= kDivergenceGuard))
        fail(ErrorCode::divergence,
             "toy SGD diverged in trial " + std::to_string(trial) + " at step " + std::to_string(k));
    }
  }
  return out;
}

MomentProbe gki_moment_probe(const EmpiricalState& state, const RegressionModel& model,
                             std::size_t samples, uint64_t seed, std::size_t i, std::size_t j) {
  state.validate();
  model.validate();
  if (samples < 1000) fail(ErrorCode::invalid_argument, "moment probe requires >= 1000 samples");
  if (i >= state.n() || j >= state.n() || i == j)
    fail(ErrorCode::invalid_argument, "moment probe needs distinct coordinates i, j < n");

  const std::size_t n = state.n();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> a(n);
  Rng rng(seed);

  double s1 = 0, s1sq = 0, s2 = 0, s2sq = 0, s3 = 0, s3sq = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    fill_dist(rng, model.sensing_dist, a);
    const double w = model.sigma * rng.gaussian();
    double dot = 0.0;
    for (std::size_t l = 0; l < n; ++l) dot += a[l] * (state.x[l] - state.xi[l]);
    const double r = model.tau * (w - dot * inv_sqrt_n) * inv_sqrt_n;
    const double gi = r * a[i];
    const double gj = r * a[j];
    s1 += gi;
    s1sq += gi * gi;
    s2 += gi * gi;
    s2sq += gi * gi * gi * gi;
    s3 += gi * gj;
    s3sq += gi * gj * gi * gj;
  }
  const auto m = static_cast<double>(samples);
  auto finish = [&](double sum, double sumsq, double& mean, double& se) {
    mean = sum / m;
    const double var = std::max(0.0, sumsq / m - mean * mean);
    se = std::sqrt(var / m);
  };
  MomentProbe p;
  p.i = i;
  p.j = j;
  finish(s1, s1sq, p.mean_g, p.se_mean_g);
  finish(s2, s2sq, p.mean_g2, p.se_mean_g2);
  finish(s3, s3sq, p.mean_gigj, p.se_mean_gigj);
  return p;
}

std::vector<double> make_sparse_target(std::size_t n, double rho, double on_value) {
  if (!(rho > 0.0 && rho < 1.0)) fail(ErrorCode::invalid_argument, "sparsity rho must be in (0,1)");
  std::vector<double> xi(n, 0.0);
  const auto count = static_cast<std::size_t>(std::floor(rho * static_cast<double>(n)));
  for (std::size_t i = 0; i < count; ++i) xi[i] = on_value;
  return xi;
}

void normalize_to_sphere(std::vector<double>& v) {
  InvariantSum norm2;
  for (double x : v) norm2.add(x * x);
  const double norm = std::sqrt(norm2.value());
  if (!(norm > 0.0)) fail(ErrorCode::invalid_argument, "cannot normalize the zero vector");
  const double scale = std::sqrt(static_cast<double>(v.size())) / norm;
  for (auto& x : v) x *= scale;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec, bool header) {
  if (header) os << "t,observable,value,seed\n";
  for (const auto& [name, vals] : rec.observables) {
    for (std::size_t j = 0; j < rec.times.size(); ++j) {
      os << format_double(rec.times[j]) << ',' << name << ',' << format_double(vals[j]) << ','
         << rec.seed << '\n';
    }
  }
}

std::vector<TrajectoryRecord> read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) fail(ErrorCode::io, "empty trajectory CSV");
  {
    std::string h = line;
    if (!h.empty() && h.back() == '\r') h.pop_back();
    if (h != "t,observable,value,seed") fail(ErrorCode::io, "trajectory CSV header mismatch");
  }

  std::map<uint64_t, TrajectoryRecord> by_seed;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string f0, f1, f2, f3;
    if (!std::getline(row, f0, ',') || !std::getline(row, f1, ',') || !std::getline(row, f2, ',') ||
        !std::getline(row, f3))
      fail(ErrorCode::io, "trajectory CSV row must have 4 fields");
    double t, v;
    uint64_t seed;
    try {
      t = std::stod(f0);
      v = std::stod(f2);
      seed = std::stoull(f3);
    } catch (const std::exception&) {
      fail(ErrorCode::io, "bad numeric field in trajectory CSV row: '" + line + "'");
    }
    auto& rec = by_seed[seed];
    rec.seed = seed;
    auto& vals = rec.observables[f1];
    if (rec.observables.size() == 1 && vals.size() == rec.times.size()) {
      rec.times.push_back(t);
    } else if (vals.size() >= rec.times.size() || rec.times[vals.size()] != t) {
      fail(ErrorCode::io, "trajectory CSV observables cover inconsistent time grids");
    }
    vals.push_back(v);
  }
  if (by_seed.empty()) fail(ErrorCode::io, "trajectory CSV has no data rows");

  std::vector<TrajectoryRecord> records;
  for (auto& [seed, rec] : by_seed) {
    for (const auto& [name, vals] : rec.observables) {
      if (vals.size() != rec.times.size())
        fail(ErrorCode::io, "trajectory CSV observable '" + name + "' is incomplete for seed " +
                                std::to_string(seed));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_snapshots_csv(std::ostream& os, const TrajectoryRecord& rec, bool header) {
  if (header) os << "t,i,x,xi\n";
  for (const auto& [t, state] : rec.snapshots) {
    for (std::size_t i = 0; i < state.n(); ++i) {
      os << format_double(t) << ',' << i << ',' << format_double(state.x[i]) << ','
         << format_double(state.xi[i]) << '\n';
    }
  }
}

}  // namespace sll
