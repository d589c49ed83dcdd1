#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "l0bpg/bpg.hpp"
#include "l0bpg/errors.hpp"
#include "l0bpg/losses.hpp"
#include "l0bpg/simplex.hpp"

namespace l0bpg {

template <typename Scalar = double>
struct SolverConfig {
  /// Step size; defaults to 0.999 / L when unset.
  std::optional<Scalar> alpha;
  Scalar lambda = Scalar(1);
  Scalar eps2 = Scalar(1e-6);
  int max_outer_iters = 100000;
  /// Initializer settings; abpg.eps1 is the initializer tolerance.
  AbpgConfig<Scalar> abpg{};

  Scalar resolve_alpha(Scalar L) const { return alpha.value_or(Scalar(0.999) / L); }

  void validate(Scalar L) const {
    const Scalar a = resolve_alpha(L);
    if (!(a > 0) || !(a * L < Scalar(1)))
      throw InputError("solver: step alpha must satisfy 0 < alpha < 1/L (alpha=" +
                       std::to_string(a) + ", L=" + std::to_string(L) + ")");
    if (!(lambda > 0) || !std::isfinite(lambda)) throw InputError("solver: lambda must be positive");
    if (!(eps2 > 0)) throw InputError("solver: eps2 must be positive");
    if (max_outer_iters < 1) throw InputError("solver: max_outer_iters must be positive");
    abpg.validate();
  }
};

/// State after an outer iteration (entry 0 describes the initializer output).
template <typename Scalar = double>
struct TraceEntry {
  Scalar F;                      ///< f(x^k) + lambda ||x^k||_0
  Scalar f;                      ///< f(x^k)
  Index support_size;            ///< d_k
  std::vector<Index> support;    ///< I_k, ascending
  Scalar step_divergence;        ///< D_h(x^k, x^{k-1}); 0 for entry 0
};

template <typename Scalar = double>
struct SolveTrace {
  std::vector<TraceEntry<Scalar>> entries;
  /// First k after which the support no longer changes, and x^k at that k.
  Index freeze_iteration = 0;
  std::optional<SimplexVector<Scalar>> x_at_freeze;
};

template <typename Scalar = double>
struct SolveResult {
  SimplexVector<Scalar> x_star;
  std::vector<Index> support;
  Scalar objective_F;
  Scalar objective_f;
  SolveTrace<Scalar> trace;
  int iterations = 0;
  int initializer_iterations = 0;
  Scalar alpha;
  Scalar lambda;
  bool converged = false;
};

/// Support size for the sorting step.
///
/// `y` holds the step output sorted in nonincreasing order. Returns the
/// smallest m with expm1(alpha*lambda) > y[m] / (y[0] + ... + y[m-1]), i.e.
/// the largest minimizer of l(m) = -(1/alpha) log(y[0] + ... + y[m-1]) + lambda m.
/// Equality does not stop the scan, so ties resolve toward the larger m.
/// Returns y.size() when no smaller m qualifies.
///
/// The predicate is monotone in m, so the scan may start anywhere: when it
/// already holds at `start_hint - 1` the scan restarts from 1.
template <typename Scalar>
Index select_support_size(const std::vector<Scalar>& y, Scalar alpha, Scalar lambda,
                          Index start_hint = 1) {
  const Index n = static_cast<Index>(y.size());
  if (n < 1) throw InputError("select_support_size: empty input");
  Scalar total(0);
  for (Index i = 0; i < n; ++i) {
    if (!(y[i] >= 0) || !std::isfinite(y[i])) throw InputError("select_support_size: negative entry");
    if (i > 0 && y[i] > y[i - 1]) throw InputError("select_support_size: input not sorted");
    total += y[i];
  }
  if (std::abs(total - Scalar(1)) > Scalar(1e-9))
    throw InputError("select_support_size: input not normalized");
  if (!(alpha > 0) || !(lambda > 0)) throw InputError("select_support_size: alpha, lambda must be positive");

  const Scalar threshold = std::expm1(alpha * lambda);
  std::vector<Scalar> prefix(n);
  std::partial_sum(y.begin(), y.end(), prefix.begin());
  // stop(m) <=> l(m+1) > l(m); m is 1-based, y[m] is the (m+1)-th largest.
  auto stop = [&](Index m) { return m >= n || threshold > y[m] / prefix[m - 1]; };

  Index m = std::clamp<Index>(start_hint, 1, n);
  if (m > 1 && stop(m - 1)) m = 1;
  while (!stop(m)) ++m;
  return m;
}

template <typename Scalar = double>
struct SubproblemSolution {
  SimplexVector<Scalar> x;
  Index d;
};

/// Global minimizer over the simplex of
///   <g, x - x_k> + (1/alpha) D_h(x, x_k) + lambda ||x||_0,
/// computed as a BPG step, a sorting step choosing d, and a removing step
/// keeping the d largest entries renormalized. Equal entries keep the lower
/// index.
template <typename Scalar, typename Derived>
SubproblemSolution<Scalar> solve_subproblem(const SimplexVector<Scalar>& x_k,
                                            const Eigen::MatrixBase<Derived>& grad, Scalar alpha,
                                            Scalar lambda, Index start_hint = 1) {
  const SimplexVector<Scalar> y = entropic_mirror_step(x_k, grad, alpha);

  std::vector<Index> order = y.support();
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return y(a) > y(b); });
  std::vector<Scalar> sorted(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = y(order[i]);

  const Index d = select_support_size(sorted, alpha, lambda, start_hint);
  Vector<Scalar> kept = Vector<Scalar>::Zero(x_k.size());
  for (Index i = 0; i < d; ++i) kept(order[i]) = sorted[i];
  return {SimplexVector<Scalar>::normalized(std::move(kept)), d};
}

namespace detail {

/// Entries of the initializer output below this are raised to it before the
/// first subproblem, whose closed form needs strictly positive entries.
template <typename Scalar>
inline constexpr Scalar kInitialFloor = Scalar(1e-300);

template <typename Scalar>
SimplexVector<Scalar> clamp_initial(const SimplexVector<Scalar>& x) {
  Vector<Scalar> v = x.values().cwiseMax(kInitialFloor<Scalar>);
  if (v == x.values()) return x;
  return SimplexVector<Scalar>(v / v.sum());
}

}  // namespace detail

/// Outer loop of the l0-regularized solver started from a given dense point
/// (normally the initializer output). Runs subproblem steps until
/// F(x^k) - F(x^{k+1}) < eps2 or the iteration cap.
template <typename Scalar>
SolveResult<Scalar> solve_from(const Objective<Scalar>& obj, const SolverConfig<Scalar>& cfg,
                               const SimplexVector<Scalar>& x0, int initializer_iterations = 0) {
  const Scalar L = obj.smoothness();
  cfg.validate(L);
  if (x0.size() != obj.dimension()) throw DimensionMismatch("solve: start point dimension");
  const Scalar alpha = cfg.resolve_alpha(L);
  const Scalar lambda = cfg.lambda;

  SimplexVector<Scalar> x = detail::clamp_initial(x0);
  auto fg = obj.evaluate(x);
  if (!std::isfinite(fg.value)) throw NumericalFailure("solve: objective is not finite at x0");
  Index d = x.support_size();
  Scalar F = fg.value + lambda * Scalar(d);

  SolveResult<Scalar> res{x, {}, F, fg.value, {}, 0, initializer_iterations, alpha, lambda, false};
  auto& trace = res.trace;
  trace.entries.push_back({F, fg.value, d, x.support(), Scalar(0)});
  trace.freeze_iteration = 0;
  trace.x_at_freeze = x;

  for (int k = 0; k < cfg.max_outer_iters; ++k) {
    auto sub = solve_subproblem(x, fg.gradient, alpha, lambda, d);
    auto fg_next = obj.evaluate(sub.x);
    if (!std::isfinite(fg_next.value))
      throw NumericalFailure("solve: objective became non-finite at outer iteration " +
                             std::to_string(k + 1));
    const Scalar F_next = fg_next.value + lambda * Scalar(sub.d);
    const Scalar divergence = kl_divergence(sub.x, x);
    trace.entries.push_back({F_next, fg_next.value, sub.d, sub.x.support(), divergence});
    if (sub.d != d) {
      trace.freeze_iteration = k + 1;
      trace.x_at_freeze = sub.x;
    }
    const Scalar decrease = F - F_next;
    x = std::move(sub.x);
    fg = std::move(fg_next);
    d = sub.d;
    F = F_next;
    res.iterations = k + 1;
    if (decrease < cfg.eps2) {
      res.converged = true;
      break;
    }
  }

  res.x_star = x;
  res.support = x.support();
  res.objective_F = F;
  res.objective_f = fg.value;
  return res;
}

/// Full solve: accelerated initializer from the barycenter, then the l0 outer loop.
template <typename Scalar>
SolveResult<Scalar> solve(const Objective<Scalar>& obj, const SolverConfig<Scalar>& cfg) {
  const Scalar L = obj.smoothness();
  cfg.validate(L);
  const Index n = obj.dimension();
  if (n == 1) {
    SimplexVector<Scalar> x = SimplexVector<Scalar>::uniform(1);
    const Scalar f = obj.value(x);
    if (!std::isfinite(f)) throw NumericalFailure("solve: objective is not finite");
    SolveResult<Scalar> res{x, {0}, f + cfg.lambda, f, {}, 0, 0, cfg.resolve_alpha(L), cfg.lambda, true};
    res.trace.entries.push_back({res.objective_F, f, 1, {0}, Scalar(0)});
    res.trace.x_at_freeze = x;
    return res;
  }
  const auto init = abpg_g(obj, cfg.abpg, SimplexVector<Scalar>::uniform(n));
  return solve_from(obj, cfg, init.x, init.iterations);
}

template <typename Scalar = double>
struct TuneResult {
  Scalar lambda;
  SolveResult<Scalar> result;
  int solves = 0;
};

inline constexpr double kTuneLambdaMin = 1e-8;
inline constexpr double kTuneLambdaMax = 1e4;
inline constexpr int kTuneMaxBisections = 60;

/// Chooses lambda so the solution has at most `target_k` nonzeros, and when
/// possible at least target_k - 2. Bisects log(lambda) inside [1e-8, 1e4];
/// `lambda_hint` seeds the bracket (expanded by factors of 10 from it). The
/// initializer runs once and is shared by every trial.
template <typename Scalar>
TuneResult<Scalar> tune_lambda_for_cardinality(const Objective<Scalar>& obj, Index target_k,
                                               const SolverConfig<Scalar>& cfg,
                                               std::optional<Scalar> lambda_hint = std::nullopt) {
  const Index n = obj.dimension();
  if (target_k < 1 || target_k > n)
    throw InputError("tune_lambda_for_cardinality: target must lie in [1, n]");
  const Scalar lo_bound(kTuneLambdaMin), hi_bound(kTuneLambdaMax);

  SolverConfig<Scalar> trial = cfg;
  trial.lambda = lo_bound;
  trial.validate(obj.smoothness());
  SimplexVector<Scalar> x0 = SimplexVector<Scalar>::uniform(n);
  int init_iters = 0;
  if (n > 1) {
    const auto init = abpg_g(obj, cfg.abpg, x0);
    x0 = init.x;
    init_iters = init.iterations;
  }

  int solves = 0;
  auto run = [&](Scalar lambda) {
    trial.lambda = lambda;
    ++solves;
    if (n == 1) return solve(obj, trial);
    return solve_from(obj, trial, x0, init_iters);
  };
  auto card = [](const SolveResult<Scalar>& r) { return static_cast<Index>(r.support.size()); };
  auto good_enough = [&](Index c) { return c <= target_k && c >= target_k - 2; };
  auto finish = [&](Scalar lambda, SolveResult<Scalar> r) {
    return TuneResult<Scalar>{lambda, std::move(r), solves};
  };

  // Bracket: `infeasible` too dense (card > K), `feasible` meets card <= K.
  std::optional<std::pair<Scalar, SolveResult<Scalar>>> feasible;
  std::optional<Scalar> infeasible;

  const Scalar start = std::clamp(lambda_hint.value_or(lo_bound), lo_bound, hi_bound);
  {
    auto r = run(start);
    if (card(r) <= target_k) {
      if (good_enough(card(r)) || start == lo_bound) return finish(start, std::move(r));
      feasible.emplace(start, std::move(r));
    } else {
      infeasible = start;
    }
  }
  // Expand downward from a feasible start, upward from an infeasible one.
  while (!infeasible) {
    const Scalar next = std::max(feasible->first / Scalar(10), lo_bound);
    auto r = run(next);
    if (card(r) > target_k) {
      infeasible = next;
    } else {
      feasible.emplace(next, std::move(r));
      if (good_enough(card(feasible->second)) || next == lo_bound)
        return finish(feasible->first, std::move(feasible->second));
    }
  }
  while (!feasible) {
    if (*infeasible >= hi_bound)
      throw InfeasibleCardinality("tune_lambda_for_cardinality: lambda=" + std::to_string(hi_bound) +
                                  " still exceeds the target cardinality");
    const Scalar next = std::min(*infeasible * Scalar(10), hi_bound);
    auto r = run(next);
    if (card(r) <= target_k) {
      feasible.emplace(next, std::move(r));
      if (good_enough(card(feasible->second)))
        return finish(feasible->first, std::move(feasible->second));
    } else {
      infeasible = next;
    }
  }

  Scalar lo = *infeasible;
  for (int it = 0; it < kTuneMaxBisections; ++it) {
    const Scalar mid = std::sqrt(lo * feasible->first);
    if (!(mid > lo && mid < feasible->first)) break;
    auto r = run(mid);
    if (card(r) <= target_k) {
      feasible.emplace(mid, std::move(r));
      if (good_enough(card(feasible->second))) break;
    } else {
      lo = mid;
    }
  }
  return finish(feasible->first, std::move(feasible->second));
}

/// Objective of the l0 subproblem at x, without the constant f(x_k):
///   <g, x - x_k> + (1/alpha) D_h(x, x_k) + lambda ||x||_0.
template <typename Scalar, typename Derived>
Scalar subproblem_objective(const SimplexVector<Scalar>& x, const SimplexVector<Scalar>& x_k,
                            const Eigen::MatrixBase<Derived>& grad, Scalar alpha, Scalar lambda) {
  return grad.dot(x.values() - x_k.values()) + kl_divergence(x, x_k) / alpha +
         lambda * Scalar(x.support_size());
}

}  // namespace l0bpg
