#include "l0bpg/harness/frontier.hpp"

#include <cmath>
#include <limits>

#include "l0bpg/errors.hpp"
#include "l0bpg/harness/parallel.hpp"

namespace l0bpg::harness {

namespace {

FrontierPoint make_point(const PortfolioData<double>& base, double eta,
                         const SimplexVector<double>& x) {
  FrontierPoint p;
  p.eta = eta;
  p.risk = x.values().dot(base.Sigma * x.values());
  p.ret = base.mu.dot(x.values());
  p.cardinality = x.support_size();
  p.x = x;
  return p;
}

PortfolioData<double> at_eta(const PortfolioData<double>& base, double eta) {
  PortfolioData<double> d = base;
  d.eta = eta;
  return d;
}

}  // namespace

std::vector<double> eta_grid(std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {0.0};
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

std::vector<FrontierPoint> standard_frontier(const PortfolioData<double>& base,
                                             const std::vector<double>& etas,
                                             const AbpgConfig<double>& cfg, int jobs) {
  for (double eta : etas) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw InputError("standard_frontier: eta outside [0, 1]");
  }
  base.validate();
  cfg.validate();
  const Index n = base.mu.size();
  std::vector<FrontierPoint> points(etas.size());
  parallel_for(etas.size(), jobs, [&](std::size_t i) {
    try {
      const auto obj = Objective<double>::portfolio(at_eta(base, etas[i]));
      const auto res = abpg_g(obj, cfg, SimplexVector<double>::uniform(n));
      points[i] = make_point(base, etas[i], res.x);
    } catch (const std::exception& e) {
      points[i].eta = etas[i];
      points[i].error = e.what();
    }
  });
  return points;
}

std::vector<FrontierPoint> general_frontier(const PortfolioData<double>& base,
                                            const std::vector<double>& etas, Index K,
                                            const SolverConfig<double>& cfg) {
  for (double eta : etas) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw InputError("general_frontier: eta outside [0, 1]");
  }
  if (K < 1) throw InputError("general_frontier: K must be at least 1");
  base.validate();
  const Index target = std::min<Index>(K, base.mu.size());

  std::vector<FrontierPoint> points;
  points.reserve(etas.size());
  std::optional<double> hint;
  for (double eta : etas) {
    try {
      const auto obj = Objective<double>::portfolio(at_eta(base, eta));
      auto tuned = tune_lambda_for_cardinality(obj, target, cfg, hint);
      FrontierPoint p = make_point(base, eta, tuned.result.x_star);
      p.lambda = tuned.lambda;
      hint = tuned.lambda;
      points.push_back(std::move(p));
    } catch (const std::exception& e) {
      FrontierPoint p;
      p.eta = eta;
      p.error = e.what();
      points.push_back(std::move(p));
    }
  }
  return points;
}

FrontierComparison frontier_comparison(const std::vector<FrontierPoint>& sef,
                                       const std::vector<FrontierPoint>& gef) {
  std::vector<const FrontierPoint*> ref;
  for (const auto& s : sef)
    if (s.error.empty()) ref.push_back(&s);
  if (ref.empty()) throw InputError("frontier_comparison: standard frontier is empty");

  FrontierComparison out;
  double dist_sum = 0, var_sum = 0, mean_sum = 0;
  for (const auto& g : gef) {
    if (!g.error.empty()) continue;
    double best_dist = std::numeric_limits<double>::infinity();
    double best_ret_gap = best_dist, best_risk_gap = best_dist;
    const FrontierPoint* by_ret = nullptr;
    const FrontierPoint* by_risk = nullptr;
    for (const FrontierPoint* s : ref) {
      best_dist = std::min(best_dist, std::hypot(g.risk - s->risk, g.ret - s->ret));
      const double ret_gap = std::abs(g.ret - s->ret);
      if (ret_gap < best_ret_gap) {
        best_ret_gap = ret_gap;
        by_ret = s;
      }
      const double risk_gap = std::abs(g.risk - s->risk);
      if (risk_gap < best_risk_gap) {
        best_risk_gap = risk_gap;
        by_risk = s;
      }
    }
    dist_sum += best_dist;
    var_sum += std::abs(g.risk - by_ret->risk) / by_ret->risk;
    mean_sum += std::abs(g.ret - by_risk->ret) / std::abs(by_risk->ret);
    ++out.compared;
  }
  if (out.compared > 0) {
    const double k = static_cast<double>(out.compared);
    out.mean_distance = dist_sum / k;
    out.variance_err_pct = 100.0 * var_sum / k;
    out.mean_err_pct = 100.0 * mean_sum / k;
  }
  return out;
}

}  // namespace l0bpg::harness
