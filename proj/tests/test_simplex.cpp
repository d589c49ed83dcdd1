#include <doctest.h>

#include <cmath>
#include <limits>

#include "l0bpg/errors.hpp"
#include "l0bpg/simplex.hpp"
#include "test_util.hpp"

using namespace l0bpg;
using testutil::interior_point;
using testutil::max_abs_diff;

namespace {

// Straight loop over every index, written without the library helpers.
double kl_loop(const Vector<double>& x, const Vector<double>& y) {
  long double s = 0;
  for (Index i = 0; i < x.size(); ++i) {
    if (y(i) == 0) continue;
    const long double xi = x(i), yi = y(i);
    s += (xi > 0 ? xi * std::log(xi / yi) : 0.0L) - xi + yi;
  }
  return static_cast<double>(s);
}

}  // namespace

TEST_CASE("SimplexVector validates its values") {
  CHECK_NOTHROW(SimplexVector<double>(Vector<double>::Constant(4, 0.25)));
  CHECK_THROWS_AS(SimplexVector<double>(Vector<double>::Constant(4, 0.3)), InputError);
  Vector<double> neg(2);
  neg << 1.5, -0.5;
  CHECK_THROWS_AS(SimplexVector<double>{neg}, InputError);
  Vector<double> bad(2);
  bad << std::numeric_limits<double>::quiet_NaN(), 1.0;
  CHECK_THROWS_AS(SimplexVector<double>{bad}, InputError);
  CHECK_THROWS_AS(SimplexVector<double>(Vector<double>()), InputError);
  CHECK_THROWS_AS(SimplexVector<double>::uniform(0), InputError);
}

TEST_CASE("support tracks exact zeros only") {
  Vector<double> v(4);
  v << 0.5, 0.0, 0.5 - 1e-300, 1e-300;
  const SimplexVector<double> x(v);
  CHECK(x.support() == std::vector<Index>{0, 2, 3});
  CHECK(x.support_size() == 3);
  CHECK_FALSE(x.has_full_support());
  CHECK(SimplexVector<double>::vertex(5, 3).support() == std::vector<Index>{3});
}

TEST_CASE("normalized flushes subnormal results to zero") {
  Vector<double> w(3);
  w << 1.0, 1e-310, 1.0;
  const auto x = SimplexVector<double>::normalized(w);
  CHECK(x(1) == 0.0);
  CHECK(x.support_size() == 2);
  CHECK_THROWS_AS(SimplexVector<double>::normalized(Vector<double>::Zero(3)), InputError);
}

TEST_CASE("negative entropy") {
  for (Index n : {1, 2, 7, 100})
    CHECK(negative_entropy(SimplexVector<double>::uniform(n)) == doctest::Approx(-std::log(double(n))).epsilon(1e-14));
  CHECK(negative_entropy(SimplexVector<double>::vertex(4, 0)) == 0.0);
  Vector<double> v(3);
  v << 0.5, 0.5, 0.0;
  CHECK(negative_entropy(SimplexVector<double>(v)) == doctest::Approx(-0.6931471805599453).epsilon(1e-15));

  harness::Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(30));
    const double h = negative_entropy(interior_point(rng, n));
    CHECK(h <= 1e-15);
    CHECK(h >= -std::log(double(n)) - 1e-12);
  }
}

TEST_CASE("kl divergence") {
  Vector<double> a(2), b(2);
  a << 1.0, 0.0;
  b << 0.5, 0.5;
  const SimplexVector<double> x(a), y(b);
  CHECK(kl_divergence(x, y) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(kl_divergence(y, y) == 0.0);
  CHECK_THROWS_AS(kl_divergence(y, x), SupportViolation);

  harness::Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto p = interior_point(rng, 5), q = interior_point(rng, 5);
    const double d = kl_divergence(p, q);
    CHECK(std::abs(d - kl_loop(p.values(), q.values())) <= 1e-14);
    CHECK(d >= 0.0);
    CHECK(std::abs(kl_divergence(p, p)) <= 1e-15);
  }
}

TEST_CASE("kl divergence near zero means nearly equal") {
  harness::Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    const auto p = interior_point(rng, 6);
    Vector<double> v = p.values();
    v(0) += 1e-7;
    v(1) -= 1e-7;
    if (v(1) <= 0) continue;
    const SimplexVector<double> q(v);
    const double d = kl_divergence(q, p);
    CHECK(d >= 0.0);
    if (d == 0.0) CHECK(max_abs_diff(p.values(), q.values()) <= 1e-10);
  }
}

TEST_CASE("mirror step hand cases") {
  Vector<double> a(2), g(2);
  a << 0.5, 0.5;
  g << 0.0, std::log(3.0);
  const auto y = entropic_mirror_step(SimplexVector<double>(a), g, 1.0);
  CHECK(y(0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(y(1) == doctest::Approx(0.25).epsilon(1e-15));

  harness::Rng rng(3);
  const auto x = interior_point(rng, 9);
  CHECK(max_abs_diff(entropic_mirror_step(x, Vector<double>::Zero(9), 0.7).values(), x.values()) <= 1e-15);
  CHECK(max_abs_diff(entropic_mirror_step(x, Vector<double>::Constant(9, 4.2), 0.7).values(), x.values()) <= 1e-15);

  const BregmanStepInput<double> in{x, Vector<double>::Constant(9, -1.0), 2.0};
  CHECK(max_abs_diff(entropic_mirror_step(in).values(), x.values()) <= 1e-15);
}

TEST_CASE("mirror step matches the unshifted closed form") {
  harness::Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 + static_cast<Index>(rng.below(20));
    const auto x = interior_point(rng, n);
    const Vector<double> g = testutil::normal_vector(rng, n);
    const double alpha = 0.1 + rng.uniform();
    Vector<double> w(n);
    for (Index i = 0; i < n; ++i) w(i) = x(i) * std::exp(-alpha * g(i));
    w /= w.sum();
    CHECK(max_abs_diff(entropic_mirror_step(x, g, alpha).values(), w) <= 1e-14);
  }
}

TEST_CASE("mirror step properties: sum, shift invariance, support") {
  harness::Rng rng(99);
  for (int t = 0; t < 300; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(40));
    Vector<double> w(n);
    for (Index i = 0; i < n; ++i) w(i) = rng.uniform() < 0.3 ? 0.0 : rng.uniform() + 1e-6;
    if (w.sum() == 0) w(0) = 1;
    const auto x = SimplexVector<double>::normalized(w);
    const Vector<double> g = 50.0 * testutil::normal_vector(rng, n);
    const double alpha = 0.01 + 3.0 * rng.uniform();
    const double shift = 1e3 * rng.normal();

    const auto y = entropic_mirror_step(x, g, alpha);
    const auto y2 = entropic_mirror_step(x, (g.array() + shift).matrix(), alpha);
    CHECK(std::abs(y.values().sum() - 1.0) <= 1e-12);
    CHECK(max_abs_diff(y.values(), y2.values()) <= 1e-12);
    CHECK(y.support() == x.support());
  }
}

TEST_CASE("mirror step keeps support under extreme gradients") {
  Vector<double> g(3);
  g << 0.0, 1e6, -1e6;
  const auto y = entropic_mirror_step(SimplexVector<double>::uniform(3), g, 1.0);
  CHECK(y.has_full_support());
  CHECK(y(2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(entropic_mirror_step(SimplexVector<double>::uniform(3), Vector<double>::Zero(2), 1.0),
                  DimensionMismatch);
  Vector<double> nan_g = Vector<double>::Zero(3);
  nan_g(1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(entropic_mirror_step(SimplexVector<double>::uniform(3), nan_g, 1.0));
}

TEST_CASE("convex combination stays on the simplex") {
  harness::Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const auto a = interior_point(rng, 7), b = interior_point(rng, 7);
    const double th = rng.uniform();
    const auto c = convex_combination(a, b, th);
    CHECK(max_abs_diff(c.values(), (1 - th) * a.values() + th * b.values()) <= 1e-15);
  }
}
