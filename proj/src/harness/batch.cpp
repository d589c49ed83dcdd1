#include "l0bpg/harness/batch.hpp"

#include <optional>

#include "l0bpg/errors.hpp"
#include "l0bpg/harness/parallel.hpp"

namespace l0bpg::harness {

BatchResult batch_columns_solve(const Matrix<double>& A, const Matrix<double>& B,
                                const SolverConfig<double>& cfg, int jobs) {
  if (A.rows() != B.rows())
    throw DimensionMismatch("batch_columns_solve: A has " + std::to_string(A.rows()) +
                            " rows but B has " + std::to_string(B.rows()));
  const Index p = B.cols();
  std::vector<std::optional<SolveResult<double>>> slots(static_cast<std::size_t>(p));
  parallel_for(slots.size(), jobs, [&](std::size_t j) {
    const auto obj = Objective<double>::quadratic({A, B.col(static_cast<Index>(j))});
    slots[j] = solve(obj, cfg);
  });

  BatchResult out;
  out.X.resize(A.cols(), p);
  out.columns.reserve(slots.size());
  for (Index j = 0; j < p; ++j) {
    out.X.col(j) = slots[static_cast<std::size_t>(j)]->x_star.values();
    out.columns.push_back(std::move(*slots[static_cast<std::size_t>(j)]));
  }
  return out;
}

}  // namespace l0bpg::harness
