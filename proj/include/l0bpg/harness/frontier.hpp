#pragma once

#include <optional>
#include <string>
#include <vector>

#include "l0bpg/bpg.hpp"
#include "l0bpg/losses.hpp"
#include "l0bpg/solver.hpp"

namespace l0bpg::harness {

struct FrontierPoint {
  double eta = 0;
  double risk = 0;          ///< x^T Sigma x
  double ret = 0;           ///< mu^T x
  Index cardinality = 0;    ///< ||x||_0
  std::optional<SimplexVector<double>> x;
  double lambda = 0;        ///< penalty used (0 for the standard frontier)
  std::string error;        ///< non-empty when this point failed
};

/// n evenly spaced values covering [0, 1] inclusive.
std::vector<double> eta_grid(std::size_t n);

/// Markowitz frontier without sparsity: per eta, the accelerated initializer
/// run to tolerance cfg.eps1 from the barycenter.
std::vector<FrontierPoint> standard_frontier(const PortfolioData<double>& base,
                                             const std::vector<double>& etas,
                                             const AbpgConfig<double>& cfg, int jobs = 1);

/// Frontier under ||x||_0 <= K: per eta, lambda is tuned so the l0 solution
/// has at most K assets. Each bisection starts from the previous point's lambda.
std::vector<FrontierPoint> general_frontier(const PortfolioData<double>& base,
                                            const std::vector<double>& etas, Index K,
                                            const SolverConfig<double>& cfg);

struct FrontierComparison {
  double mean_distance = 0;      ///< mean distance to the nearest SEF point in (risk, return)
  double variance_err_pct = 0;   ///< mean |risk_G - risk_S| / risk_S * 100, S nearest in return
  double mean_err_pct = 0;       ///< mean |ret_G - ret_S| / |ret_S| * 100, S nearest in risk
  std::size_t compared = 0;
};

/// Points carrying an error are skipped on both sides.
FrontierComparison frontier_comparison(const std::vector<FrontierPoint>& sef,
                                       const std::vector<FrontierPoint>& gef);

}  // namespace l0bpg::harness
