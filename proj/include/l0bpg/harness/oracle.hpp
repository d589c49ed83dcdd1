#pragma once

#include <cstdint>

#include "l0bpg/simplex.hpp"

namespace l0bpg::harness {

struct EnumerationOptimum {
  double value;              ///< minimal subproblem objective (without f(x_k))
  std::uint64_t best_mask;   ///< bit i set <=> index i in the optimal support
};

/// Exhaustive reference for the l0 subproblem: for every nonempty support I
/// of x_k, the fixed-support minimizer x_i ~ x_k,i exp(-alpha g_i) on I is
/// formed and
///   <g, x - x_k> + (1/alpha) sum_i (x_i log(x_i / x_k,i) - x_i + x_k,i) + lambda |I|
/// evaluated directly. Requires x_k > 0 everywhere and n <= 20.
EnumerationOptimum enumerate_subproblem(const Vector<double>& x_k, const Vector<double>& grad,
                                        double alpha, double lambda);

/// The same objective at an arbitrary simplex point x.
double subproblem_value(const Vector<double>& x, const Vector<double>& x_k,
                        const Vector<double>& grad, double alpha, double lambda);

struct OracleCheckReport {
  int instances = 0;
  int mismatches = 0;
  double max_abs_gap = 0;
};

/// Random instances: n in {3..10}, x_k positive on the simplex, g in [-5, 5],
/// alpha in {0.1, 0.5, 0.9}, lambda in {0.1, 1, 5}. Compares the solver's
/// subproblem objective with enumerate_subproblem.
OracleCheckReport run_subproblem_oracle_check(int instances, std::uint64_t seed, double tolerance);

}  // namespace l0bpg::harness
