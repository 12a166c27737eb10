#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "sll/metrics.hpp"
#include "sll/reduce.hpp"
#include "sll/simulate.hpp"

using namespace sll;

namespace {

// caller-scripted draws for hand-checkable single steps
class FixedDraws : public DrawProvider {
 public:
  std::vector<std::vector<double>> a_seq;
  std::vector<double> scalar_seq;
  std::size_t at = 0;

  void regression_draws(std::span<double> a, double& w) override { next(a, w); }
  void pca_draws(std::span<double> a, double& c) override { next(a, c); }

 private:
  void next(std::span<double> a, double& s) {
    REQUIRE(at < a_seq.size());
    REQUIRE(a_seq[at].size() == a.size());
    std::copy(a_seq[at].begin(), a_seq[at].end(), a.begin());
    s = scalar_seq[at];
    ++at;
  }
};

// applies a coordinate permutation to another provider's draws
class PermutedDraws : public DrawProvider {
 public:
  PermutedDraws(DrawProvider& inner, std::vector<std::size_t> perm)
      : inner_(inner), perm_(std::move(perm)), tmp_(perm_.size()) {}

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
  std::vector<std::size_t> perm_;
  std::vector<double> tmp_;
};

}  // namespace

TEST_CASE("regression_step hand example without regularizer") {
  // n=2, x=0, xi=1: dot = -2, residual = sqrt(2), c = tau/sqrt(2)*sqrt(2)/... = 0.5
  EmpiricalState s{{0.0, 0.0}, {1.0, 1.0}, 0};
  RegressionModel m;
  m.tau = 0.5;
  std::vector<double> a{1.0, 1.0};
  regression_step(s, m, a, 0.0);
  CHECK(s.x[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.x[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.k == 1);
}

TEST_CASE("regression_step hand example with elastic regularizer") {
  // a orthogonal to the residual, so only the penalty acts: v -= v/n with
  // phi(v) = v (elastic, 2*lambda1 = 1)
  EmpiricalState s{{0.5, 0.5}, {0.0, 0.0}, 0};
  RegressionModel m;
  m.tau = 1.0;
  m.phi = PhiSpec::elastic(1.0, 0.5, 0.0);
  std::vector<double> a{1.0, -1.0};
  regression_step(s, m, a, 0.0);
  CHECK(s.x[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(s.x[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("regression_step l1 branch matches generic sgn arithmetic") {
  EmpiricalState s{{0.4, -0.3, 0.0, 0.7, -0.2}, {0.0, 0.0, 0.0, 0.0, 0.0}, 0};
  EmpiricalState ref = s;
  RegressionModel m;
  m.tau = 0.3;
  m.phi = PhiSpec::l1(0.2);
  std::vector<double> a{1.0, -1.0, 1.0, 1.0, -1.0};
  regression_step(s, m, a, 0.5);

  // reproduce by hand: both passes use the same snapped terms
  const double n = 5.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < 5; ++i) dot += snap30(a[i] * (ref.x[i] - ref.xi[i]));
  const double c = m.tau * (0.5 - dot / std::sqrt(n)) / std::sqrt(n);
  for (std::size_t i = 0; i < 5; ++i) {
    double v = ref.x[i] + c * a[i];
    const double sg = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    v -= 0.2 * sg / n;
    CHECK(s.x[i] == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("regression_step reports divergence with the offending step") {
  EmpiricalState s{{9e5}, {0.0}, 7};
  RegressionModel m;
  m.tau = 1.0;
  std::vector<double> a{1.0};
  CHECK_THROWS_WITH_AS(regression_step(s, m, a, 2e6), doctest::Contains("step 7"), Error);
}

TEST_CASE("pca_step with zero draws and zero spike leaves the state unchanged") {
  EmpiricalState s{{1.0, -1.0}, {1.0, 1.0}, 0};
  PcaModel m;
  m.tau = 0.7;
  m.omega = 2.0;
  std::vector<double> a{0.0, 0.0};
  pca_step(s, m, a, 0.0);
  CHECK(s.x[0] == 1.0);
  CHECK(s.x[1] == -1.0);
}

TEST_CASE("pca_step hand example lands on (0, sqrt(2))") {
  // x=(1,1), a=(1,-3), c=0: y.x = -2, gain = -1, eta(x) = (0,4) -> (0, sqrt 2)
  EmpiricalState s{{1.0, 1.0}, {1.0, -1.0}, 0};
  PcaModel m;
  m.tau = 1.0;
  m.omega = 2.0;
  std::vector<double> a{1.0, -3.0};
  pca_step(s, m, a, 0.0);
  CHECK(s.x[0] == 0.0);
  CHECK(s.x[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("pca_step rejects off-sphere states") {
  EmpiricalState s{{2.0, 1.0}, {1.0, -1.0}, 0};
  PcaModel m;
  std::vector<double> a{0.0, 0.0};
  CHECK_THROWS_AS(pca_step(s, m, a, 0.0), Error);
}

TEST_CASE("noise-free regression started at the target stays there") {
  const std::size_t n = 64;
  EmpiricalState s;
  s.x.assign(n, 0.7);
  s.xi.assign(n, 0.7);
  RegressionModel m;
  m.tau = 0.4;
  m.sigma = 0.0;
  RunOptions opts;
  opts.record_times = {0.0, 0.5, 1.0};
  auto rec = run_regression(s, m, 1.0, 42u, opts);
  for (double v : rec.observables.at("mse")) CHECK(v == 0.0);
}

TEST_CASE("toy SGD with zero drift and zero noise is constant") {
  auto res = toy_sgd_1d_run([](double) { return 0.0; }, 0.5, 0.0, 100, 2.0,
                            [](Rng&) { return 1.5; }, 3, 9u, {0.0, 1.0, 2.0});
  for (const auto& snap : res.samples)
    for (double v : snap) CHECK(v == 1.5);
}

TEST_CASE("gki moment probe matches the conditional moments") {
  const std::size_t n = 8;
  EmpiricalState s;
  s.x = {0.3, -0.2, 0.5, 0.0, 0.1, -0.4, 0.2, 0.6};
  s.xi.assign(n, 0.0);
  RegressionModel m;
  m.tau = 0.5;
  m.sigma = 1.0;
  auto p = gki_moment_probe(s, m, 40000, 17u, 0, 1);

  // E[g_i] = -tau (x_i - xi_i)/n; E[n g_i^2] = tau^2 (sigma^2 + e) + O(1/n)
  const double d0 = s.x[0] - s.xi[0];
  CHECK(std::abs(p.mean_g - (-m.tau * d0 / static_cast<double>(n))) < 5.0 * p.se_mean_g);
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) e += (s.x[i] - s.xi[i]) * (s.x[i] - s.xi[i]);
  e /= static_cast<double>(n);
  const double pred_g2 = m.tau * m.tau *
                         (m.sigma * m.sigma + e + 2.0 * d0 * d0 / static_cast<double>(n)) /
                         static_cast<double>(n);
  CHECK(std::abs(p.mean_g2 - pred_g2) < 5.0 * p.se_mean_g2 + 1e-3 / static_cast<double>(n));
  // cross moment is O(1/n^2)
  CHECK(std::abs(p.mean_gigj) < 5.0 * p.se_mean_gigj + 1e-3);
}

TEST_CASE("regression trajectory is exchangeable under joint permutation") {
  const std::size_t n = 37;
  EmpiricalState base;
  Rng init(3);
  for (std::size_t i = 0; i < n; ++i) {
    base.x.push_back(init.gaussian());
    base.xi.push_back(i < 4 ? 1.0 : 0.0);
  }
  RegressionModel m;
  m.tau = 0.2;
  m.sigma = 1.0;
  m.phi = PhiSpec::l1(0.1);
  RunOptions opts;
  opts.record_times = {0.0, 0.25, 0.5};

  RngDrawProvider d0(99u, m.sensing_dist, SampleDist::rademacher, m.sigma);
  auto rec0 = run_regression(base, m, 0.5, d0, opts);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::mt19937_64 g(8);
  std::shuffle(perm.begin(), perm.end(), g);
  EmpiricalState permuted;
  for (std::size_t i = 0; i < n; ++i) {
    permuted.x.push_back(base.x[perm[i]]);
    permuted.xi.push_back(base.xi[perm[i]]);
  }
  RngDrawProvider d1(99u, m.sensing_dist, SampleDist::rademacher, m.sigma);
  PermutedDraws pd(d1, perm);
  auto rec1 = run_regression(permuted, m, 0.5, pd, opts);

  const auto& a = rec0.observables.at("mse");
  const auto& b = rec1.observables.at("mse");
  REQUIRE(a.size() == b.size());
  for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == b[j]);  // bitwise
}

TEST_CASE("fast rademacher path is bitwise identical to the provider path") {
  const std::size_t n = 129;  // exercises the partial 64-bit word
  EmpiricalState s;
  Rng init(21);
  s.x.resize(n);
  init.fill_gaussian(s.x);
  s.xi = make_sparse_target(n, 0.1, 1.0);
  RegressionModel m;
  m.tau = 0.2;
  m.sigma = 1.0;
  m.phi = PhiSpec::l1(0.1);
  m.sensing_dist = SampleDist::rademacher;
  RunOptions opts;
  opts.record_times = {0.0, 0.2, 0.5, 1.0};

  auto fast = run_regression(s, m, 1.0, 777u, opts);
  RngDrawProvider draws(777u, SampleDist::rademacher, SampleDist::rademacher, m.sigma);
  auto ref = run_regression(s, m, 1.0, draws, opts);

  const auto& a = fast.observables.at("mse");
  const auto& b = ref.observables.at("mse");
  REQUIRE(a.size() == b.size());
  for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == b[j]);
}

TEST_CASE("pca run keeps the overlap bounded and moves toward the spike") {
  const std::size_t n = 400;
  EmpiricalState s;
  Rng init(5);
  s.x.resize(n);
  init.fill_gaussian(s.x);
  s.xi.assign(n, 1.0);
  for (std::size_t i = 0; i < n; i += 2) s.xi[i] = -1.0;
  PcaModel m;
  m.tau = 0.2;
  m.omega = 4.0;
  RunOptions opts;
  opts.record_times = {0.0, 2.0, 6.0};
  auto rec = run_pca(s, m, 6.0, 31u, opts);
  const auto& q = rec.observables.at("overlap_q");
  for (double v : q) CHECK(std::abs(v) <= 1.0 + 1e-9);
  CHECK(std::abs(q.back()) > 0.5);
}

TEST_CASE("make_sparse_target and normalize_to_sphere") {
  auto xi = make_sparse_target(10, 0.25, 3.0);
  CHECK(std::count(xi.begin(), xi.end(), 3.0) == 2);
  CHECK(std::count(xi.begin(), xi.end(), 0.0) == 8);

  std::vector<double> v{3.0, 4.0};
  normalize_to_sphere(v);
  CHECK(v[0] * v[0] + v[1] * v[1] == doctest::Approx(2.0).epsilon(1e-9));
  std::vector<double> zero{0.0, 0.0};
  CHECK_THROWS_AS(normalize_to_sphere(zero), Error);
}

TEST_CASE("trajectory CSV round trip") {
  TrajectoryRecord rec;
  rec.seed = 123456789u;
  rec.times = {0.0, 0.5, 1.0};
  rec.observables["mse"] = {2.0, 1.25, 0.875};
  rec.observables["overlap_q"] = {0.0, 0.4, 0.7};
  std::stringstream ss;
  write_trajectory_csv(ss, rec);
  auto back = read_trajectory_csv(ss);
  REQUIRE(back.size() == 1);
  CHECK(back[0].seed == rec.seed);
  CHECK(back[0].times == rec.times);
  CHECK(back[0].observables == rec.observables);
}
