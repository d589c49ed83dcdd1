#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "l0bpg/errors.hpp"
#include "l0bpg/harness/metrics.hpp"
#include "l0bpg/harness/orlib.hpp"
#include "l0bpg/harness/synthetic.hpp"
#include "l0bpg/solver.hpp"
#include "test_util.hpp"

using namespace l0bpg;
using testutil::interior_point;
using testutil::normal_matrix;
using testutil::normal_vector;

namespace {

/// Largest minimizer of l(m) = -(1/alpha) log(prefix sum) + lambda m by
/// direct evaluation of every m.
Index brute_force_d(const std::vector<double>& y, double alpha, double lambda) {
  double best = INFINITY;
  Index arg = 0;
  double prefix = 0;
  for (std::size_t m = 1; m <= y.size(); ++m) {
    prefix += y[m - 1];
    const double l = -std::log(prefix) / alpha + lambda * double(m);
    if (l <= best) {   // ties move to the larger m
      best = l;
      arg = static_cast<Index>(m);
    }
  }
  return arg;
}

std::vector<double> random_sorted_simplex(harness::Rng& rng, Index n) {
  std::vector<double> y(n);
  for (auto& v : y) v = -std::log(1 - rng.uniform());
  const double s = std::accumulate(y.begin(), y.end(), 0.0);
  for (auto& v : y) v /= s;
  std::sort(y.begin(), y.end(), std::greater<>());
  return y;
}

/// Minimum of the subproblem objective over all nonempty supports, each
/// solved by the fixed-support closed form. Written independently of the
/// harness enumerator.
double enumerate_min(const SimplexVector<double>& xk, const Vector<double>& g, double alpha, double lambda) {
  const Index n = xk.size();
  double best = INFINITY;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    Vector<double> w = Vector<double>::Zero(n);
    for (Index i = 0; i < n; ++i)
      if (mask & (1u << i)) w(i) = xk(i) * std::exp(-alpha * g(i));
    const auto x = SimplexVector<double>::normalized(w);
    best = std::min(best, subproblem_objective(x, xk, g, alpha, lambda));
  }
  return best;
}

bool subset(const std::vector<Index>& a, const std::vector<Index>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("select_support_size examples") {
  std::vector<double> atom(6, 0.0);
  atom[0] = 1.0;
  for (double al : {1e-6, 0.1, 3.0}) CHECK(select_support_size(atom, al, 1.0) == 1);

  const Index n = 8;
  const std::vector<double> uni(n, 1.0 / n);
  // exp(alpha lambda) - 1 > 1 gives d = 1; below 1/(n-1) gives d = n.
  CHECK(select_support_size(uni, 1.0, std::log(2.0) + 1e-9) == 1);
  CHECK(select_support_size(uni, 1.0, std::log1p(1.0 / (n - 1)) * 0.999) == n);
  // Exactly on the boundary the tie keeps the larger d.
  CHECK(select_support_size(std::vector<double>{0.5, 0.5}, 1.0, std::log(2.0)) == 2);
}

TEST_CASE("select_support_size rejects bad input") {
  CHECK_THROWS_AS(select_support_size(std::vector<double>{0.2, 0.8}, 1.0, 1.0), InputError);
  CHECK_THROWS_AS(select_support_size(std::vector<double>{0.5, 0.4}, 1.0, 1.0), InputError);
  CHECK_THROWS_AS(select_support_size(std::vector<double>{}, 1.0, 1.0), InputError);
  CHECK_THROWS_AS(select_support_size(std::vector<double>{1.0}, 0.0, 1.0), InputError);
  CHECK_THROWS_AS(select_support_size(std::vector<double>{1.0}, 1.0, -1.0), InputError);
}

TEST_CASE("select_support_size matches a brute-force scan of l(m) from any start") {
  harness::Rng rng(1);
  for (int t = 0; t < 2000; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(12));
    const auto y = random_sorted_simplex(rng, n);
    const double alpha = 0.05 + rng.uniform(), lambda = std::exp(2 * rng.normal() - 1);
    const Index want = brute_force_d(y, alpha, lambda);
    for (Index hint = 1; hint <= n; ++hint) CHECK(select_support_size(y, alpha, lambda, hint) == want);
  }
}

TEST_CASE("l(m) is nonincreasing up to d and nondecreasing after") {
  harness::Rng rng(2);
  for (int t = 0; t < 500; ++t) {
    const Index n = 2 + static_cast<Index>(rng.below(30));
    const auto y = random_sorted_simplex(rng, n);
    const double alpha = 0.05 + rng.uniform(), lambda = std::exp(rng.normal() - 2);
    const Index d = select_support_size(y, alpha, lambda);
    std::vector<double> l(n + 1);
    double prefix = 0;
    for (Index m = 1; m <= n; ++m) {
      prefix += y[m - 1];
      l[m] = -std::log(prefix) / alpha + lambda * double(m);
    }
    for (Index m = 2; m <= d; ++m) CHECK(l[m] <= l[m - 1] + 1e-12);
    for (Index m = d + 1; m <= n; ++m) CHECK(l[m] >= l[m - 1] - 1e-12);
  }
}

TEST_CASE("solve_subproblem hand case and tiny lambda") {
  Vector<double> v(3);
  v << 0.9, 0.05, 0.05;
  const SimplexVector<double> xk(v);
  const auto sol = solve_subproblem(xk, Vector<double>::Zero(3), 1.0, std::log(2.0));
  CHECK(sol.d == 1);
  CHECK(sol.x == SimplexVector<double>::vertex(3, 0));

  harness::Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto x = interior_point(rng, 12);
    const Vector<double> g = normal_vector(rng, 12);
    const auto s = solve_subproblem(x, g, 0.5, 1e-12);
    CHECK(s.d == 12);
    CHECK((s.x.values() - entropic_mirror_step(x, g, 0.5).values()).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("solve_subproblem reaches the enumerated global minimum") {
  harness::Rng rng(4);
  for (int t = 0; t < 400; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(10));
    const auto xk = interior_point(rng, n);
    Vector<double> g(n);
    for (Index i = 0; i < n; ++i) g(i) = -5 + 10 * rng.uniform();
    const double alpha = std::vector<double>{0.1, 0.5, 0.9}[rng.below(3)];
    const double lambda = std::vector<double>{0.1, 1.0, 5.0}[rng.below(3)];
    const auto s = solve_subproblem(xk, g, alpha, lambda);
    CHECK(s.x.support_size() == s.d);
    CHECK(std::abs(subproblem_objective(s.x, xk, g, alpha, lambda) - enumerate_min(xk, g, alpha, lambda)) <= 1e-10);
  }
}

TEST_CASE("solve_subproblem keeps the lower index among equal values") {
  const auto xk = SimplexVector<double>::uniform(4);
  // Four equal values; choose lambda so that exactly two survive.
  // d = 2 needs 1/2 < expm1(alpha lambda) <= 1.
  const auto s = solve_subproblem(xk, Vector<double>::Zero(4), 1.0, std::log(1.75));
  CHECK(s.d == 2);
  CHECK(s.x.support() == std::vector<Index>{0, 1});
}

TEST_CASE("solver config validation") {
  SolverConfig<double> c;
  CHECK(c.resolve_alpha(2.0) == doctest::Approx(0.4995));
  CHECK_NOTHROW(c.validate(2.0));
  c.alpha = 0.5;
  CHECK_THROWS_AS(c.validate(2.0), InputError);   // alpha L = 1
  c.alpha = 0.1;
  c.lambda = 0;
  CHECK_THROWS_AS(c.validate(2.0), InputError);
  c.lambda = 1;
  c.eps2 = 0;
  CHECK_THROWS_AS(c.validate(2.0), InputError);
}

TEST_CASE("solve on a single point") {
  const auto obj = Objective<double>::quadratic({(Matrix<double>(1, 1) << 2.0).finished(), (Vector<double>(1) << 1.0).finished()});
  SolverConfig<double> cfg;
  cfg.lambda = 0.3;
  const auto r = solve(obj, cfg);
  CHECK(r.x_star(0) == 1.0);
  CHECK(r.objective_F == doctest::Approx(0.5 + 0.3));
  CHECK(r.support == std::vector<Index>{0});
}

TEST_CASE("solve keeps the clamped start valid when the initializer underflows") {
  Vector<double> w(3);
  w << 1.0, 1e-320, 0.5;   // the subnormal becomes an exact zero
  const auto x0 = SimplexVector<double>::normalized(w);
  CHECK(x0(1) == 0.0);
  const auto obj = Objective<double>::quadratic({Matrix<double>::Identity(3, 3), Vector<double>::Constant(3, 0.3)});
  SolverConfig<double> cfg;
  cfg.lambda = 0.01;
  const auto r = solve_from(obj, cfg, x0);
  CHECK(r.trace.entries.front().support_size == 3);
  CHECK(std::abs(r.x_star.values().sum() - 1.0) <= 1e-12);
}

TEST_CASE("outer-loop invariants on random linear models") {
  harness::Rng rng(5);
  for (int t = 0; t < 40; ++t) {
    const Index m = 10 + static_cast<Index>(rng.below(30)), n = 5 + static_cast<Index>(rng.below(60));
    const LinearModelData<double> d{normal_matrix(rng, m, n), normal_vector(rng, m)};
    const auto obj = t % 2 ? Objective<double>::huber(d, {1.0}) : Objective<double>::quadratic(d);
    SolverConfig<double> cfg;
    cfg.lambda = std::exp(rng.normal() - 1);
    const auto r = solve(obj, cfg);
    const auto& e = r.trace.entries;
    REQUIRE(e.size() == static_cast<std::size_t>(r.iterations) + 1);
    CHECK(r.converged);
    CHECK(e.front().support_size == n);
    for (std::size_t k = 1; k < e.size(); ++k) {
      CHECK(e[k].F <= e[k - 1].F + 1e-10);
      CHECK(e[k].support_size <= e[k - 1].support_size);
      CHECK(subset(e[k].support, e[k - 1].support));
      CHECK(std::abs(e[k].F - (e[k].f + r.lambda * double(e[k].support_size))) <= 1e-12 * std::max(1.0, std::abs(e[k].F)));
    }
    const double floor = 1 - std::exp(-r.alpha * r.lambda) - 1e-12;
    for (Index i : r.support) CHECK(r.x_star(i) >= floor);
    CHECK(r.support == r.x_star.support());
    CHECK(e.back().support == r.support);

    // Divergence steps die out: last ten no larger than the first, final one tiny.
    if (e.size() > 2) {
      const double first = e[1].step_divergence;
      for (std::size_t k = e.size() > 11 ? e.size() - 10 : 1; k < e.size(); ++k)
        CHECK(e[k].step_divergence <= first + 1e-15);
      CHECK(e.back().step_divergence <= cfg.eps2 * r.alpha * 10);
    }

    // Rate bound after the support freezes.
    const Index M = r.trace.freeze_iteration;
    REQUIRE(r.trace.x_at_freeze.has_value());
    const double D = kl_divergence(r.x_star, *r.trace.x_at_freeze);
    for (std::size_t K = static_cast<std::size_t>(M) + 1; K < e.size(); ++K)
      CHECK(e[K].F - e.back().F <= D / (r.alpha * double(K - static_cast<std::size_t>(M))) + 1e-8);
    for (std::size_t k = static_cast<std::size_t>(M); k < e.size(); ++k) CHECK(e[k].support == r.support);
  }
}

TEST_CASE("recovery on Experiment-1-style instances") {
  // m=200, n=400, 2% nonzeros, SNR 50, lambda 2, eps 1e-6: RSNR >= 30 dB on >= 90 of 100 seeds.
  int good = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    harness::SyntheticSpec spec;
    spec.seed = harness::derive_seed(7, s);
    const auto inst = harness::generate_synthetic(spec);
    SolverConfig<double> cfg;
    cfg.lambda = 2;
    const auto r = solve(Objective<double>::quadratic(inst.data), cfg);
    good += harness::rsnr(inst.x_true.values(), r.x_star.values()) >= 30.0;
  }
  CHECK(good >= 90);
}

TEST_CASE("tune_lambda_for_cardinality") {
  harness::Rng rng(6);
  const LinearModelData<double> d{normal_matrix(rng, 20, 15), normal_vector(rng, 20)};
  const auto obj = Objective<double>::quadratic(d);
  SolverConfig<double> cfg;

  const auto all = tune_lambda_for_cardinality(obj, 15, cfg);
  CHECK(all.lambda == kTuneLambdaMin);

  const auto one = tune_lambda_for_cardinality(obj, 1, cfg);
  CHECK(one.result.support.size() == 1);
  CHECK(one.result.x_star.values().maxCoeff() == 1.0);

  for (Index K = 1; K <= 15; ++K) {
    const auto r = tune_lambda_for_cardinality(obj, K, cfg, std::optional<double>(0.5));
    CHECK(static_cast<Index>(r.result.support.size()) <= K);
    CHECK(r.lambda >= kTuneLambdaMin);
    CHECK(r.lambda <= kTuneLambdaMax);
    CHECK(r.result.lambda == r.lambda);
  }
  CHECK_THROWS_AS(tune_lambda_for_cardinality(obj, 0, cfg), InputError);
  CHECK_THROWS_AS(tune_lambda_for_cardinality(obj, 16, cfg), InputError);
}

TEST_CASE("tune_lambda_for_cardinality on the bundled market data") {
  auto data = harness::load_or_library(std::string(L0BPG_SOURCE_DIR) + "/data/port1_surrogate.txt");
  data.eta = 0.5;
  SolverConfig<double> cfg;
  cfg.eps2 = 1e-10;
  cfg.abpg.eps1 = 1e-10;
  const auto r = tune_lambda_for_cardinality(Objective<double>::portfolio(data), 10, cfg);
  CHECK(r.result.support.size() <= 10);
}
