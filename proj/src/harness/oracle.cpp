#include "l0bpg/harness/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "l0bpg/errors.hpp"
#include "l0bpg/harness/rng.hpp"
#include "l0bpg/solver.hpp"

namespace l0bpg::harness {

double subproblem_value(const Vector<double>& x, const Vector<double>& x_k,
                        const Vector<double>& grad, double alpha, double lambda) {
  double linear = 0, divergence = 0;
  int nnz = 0;
  for (Index i = 0; i < x.size(); ++i) {
    linear += grad(i) * (x(i) - x_k(i));
    if (x(i) > 0) {
      divergence += x(i) * std::log(x(i) / x_k(i));
      ++nnz;
    }
    divergence += x_k(i) - x(i);
  }
  return linear + divergence / alpha + lambda * nnz;
}

EnumerationOptimum enumerate_subproblem(const Vector<double>& x_k, const Vector<double>& grad,
                                        double alpha, double lambda) {
  const Index n = x_k.size();
  if (n < 1 || n > 20) throw InputError("enumerate_subproblem: need 1 <= n <= 20");
  if (grad.size() != n) throw DimensionMismatch("enumerate_subproblem: gradient size");
  if ((x_k.array() <= 0).any()) throw InputError("enumerate_subproblem: x_k must be positive");

  EnumerationOptimum best{std::numeric_limits<double>::infinity(), 0};
  Vector<double> x(n);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    double shift = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i)
      if (mask >> i & 1u) shift = std::max(shift, std::log(x_k(i)) - alpha * grad(i));
    double total = 0;
    for (Index i = 0; i < n; ++i) {
      x(i) = (mask >> i & 1u) ? std::exp(std::log(x_k(i)) - alpha * grad(i) - shift) : 0.0;
      total += x(i);
    }
    x /= total;
    const double v = subproblem_value(x, x_k, grad, alpha, lambda);
    if (v < best.value) best = {v, mask};
  }
  return best;
}

OracleCheckReport run_subproblem_oracle_check(int instances, std::uint64_t seed, double tolerance) {
  static constexpr double kAlphas[] = {0.1, 0.5, 0.9};
  static constexpr double kLambdas[] = {0.1, 1.0, 5.0};
  Rng rng(derive_seed(seed, Stream::oracle));
  OracleCheckReport report;
  for (int t = 0; t < instances; ++t) {
    const Index n = 3 + static_cast<Index>(rng.below(8));
    Vector<double> w(n), g(n);
    for (Index i = 0; i < n; ++i) w(i) = -std::log(1.0 - rng.uniform());   // Exp(1): Dirichlet(1) after normalizing
    for (Index i = 0; i < n; ++i) g(i) = -5.0 + 10.0 * rng.uniform();
    const double alpha = kAlphas[rng.below(3)];
    const double lambda = kLambdas[rng.below(3)];
    const SimplexVector<double> xk = SimplexVector<double>::normalized(w);

    const auto sol = solve_subproblem(xk, g, alpha, lambda);
    const double got = subproblem_value(sol.x.values(), xk.values(), g, alpha, lambda);
    const double want = enumerate_subproblem(xk.values(), g, alpha, lambda).value;
    const double gap = std::abs(got - want);
    report.max_abs_gap = std::max(report.max_abs_gap, gap);
    if (!(gap <= tolerance)) ++report.mismatches;
    ++report.instances;
  }
  return report;
}

}  // namespace l0bpg::harness
