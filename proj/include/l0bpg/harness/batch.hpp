#pragma once

#include <vector>

#include "l0bpg/solver.hpp"

namespace l0bpg::harness {

struct BatchResult {
  Matrix<double> X;                     ///< n x p, one simplex column per column of B
  std::vector<SolveResult<double>> columns;
};

/// Column-separable form of min 1/2 ||A X - B||_F^2 + lambda ||X||_0 with
/// simplex columns: each column of B is solved independently with the
/// quadratic loss. Columns may run concurrently; results are ordered by column.
BatchResult batch_columns_solve(const Matrix<double>& A, const Matrix<double>& B,
                                const SolverConfig<double>& cfg, int jobs = 1);

}  // namespace l0bpg::harness
