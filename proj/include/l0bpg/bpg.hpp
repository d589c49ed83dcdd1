#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "l0bpg/errors.hpp"
#include "l0bpg/losses.hpp"
#include "l0bpg/simplex.hpp"

namespace l0bpg {

/// Parameters of the accelerated Bregman gradient method with gain adaptation.
template <typename Scalar = double>
struct AbpgConfig {
  Scalar gamma = Scalar(2);      ///< triangle-scaling exponent, > 1
  Scalar rho = Scalar(1.2);      ///< gain factor, > 1
  Scalar g_min = Scalar(1e-2);   ///< lower bound on the gain
  Scalar eps1 = Scalar(1e-6);    ///< stop when |f(x^{k+1}) - f(x^k)| < eps1
  int max_iters = 100000;

  void validate() const {
    if (!(gamma > Scalar(1))) throw InputError("abpg: gamma must exceed 1");
    if (!(rho > Scalar(1))) throw InputError("abpg: rho must exceed 1");
    if (!(g_min > Scalar(0))) throw InputError("abpg: g_min must be positive");
    if (!(eps1 > Scalar(0))) throw InputError("abpg: eps1 must be positive");
    if (max_iters < 1) throw InputError("abpg: max_iters must be positive");
  }
};

/// Iteration state of the accelerated method.
template <typename Scalar = double>
struct AbpgState {
  SimplexVector<Scalar> x;
  SimplexVector<Scalar> y;
  SimplexVector<Scalar> z;
  Scalar theta;
  Scalar gain;
  int iter;
};

/// One accepted iteration, with every quantity of its acceptance test so the
/// test can be re-checked after the fact.
template <typename Scalar = double>
struct AbpgIterate {
  Scalar f_next;        ///< f(x^{k+1})
  Scalar f_extrap;      ///< f(y^k)
  Scalar linear_term;   ///< <grad f(y^k), x^{k+1} - y^k>
  Scalar bregman;       ///< D_h(z^{k+1}, z^k)
  Scalar gain;          ///< G_k used for the z-step
  Scalar theta;         ///< theta_k
  int inflations;       ///< gain increases before acceptance
};

template <typename Scalar = double>
struct AbpgResult {
  SimplexVector<Scalar> x;
  std::vector<AbpgIterate<Scalar>> trace;
  Scalar f_initial;
  int iterations = 0;
  bool converged = false;   ///< false when max_iters was reached
};

/// Root theta in (0, 1] of (1 - theta) / (G_k theta^gamma) = 1 / (G_{k-1} theta_{k-1}^gamma).
///
/// With c = G_k / (G_{k-1} theta_{k-1}^gamma) the equation is c theta^gamma + theta - 1 = 0,
/// whose left side increases from -1 at 0 to c at 1. For gamma = 2 the
/// positive quadratic root is used; other exponents fall back to bisection.
template <typename Scalar>
Scalar solve_theta(Scalar gain_k, Scalar gain_prev, Scalar theta_prev, Scalar gamma) {
  if (!(gain_k > 0) || !(gain_prev > 0) || !(theta_prev > 0) || theta_prev > Scalar(1) ||
      !(gamma > 1))
    throw InputError("solve_theta: invalid arguments");
  const Scalar c = gain_k / (gain_prev * std::pow(theta_prev, gamma));
  if (!std::isfinite(c) || !(c > 0)) throw NumericalFailure("solve_theta: no root in (0, 1]");

  if (gamma == Scalar(2)) {
    // Rationalized form of (-1 + sqrt(1 + 4c)) / (2c); no cancellation for small c.
    const Scalar theta = Scalar(2) / (Scalar(1) + std::sqrt(Scalar(1) + Scalar(4) * c));
    if (!(theta > 0 && theta <= 1)) throw NumericalFailure("solve_theta: no root in (0, 1]");
    return theta;
  }

  auto residual = [&](Scalar t) { return c * std::pow(t, gamma) + t - Scalar(1); };
  Scalar lo(0), hi(1);
  for (int it = 0; it < 200; ++it) {
    const Scalar mid = Scalar(0.5) * (lo + hi);
    if (residual(mid) > 0) hi = mid; else lo = mid;
    if (hi - lo <= std::numeric_limits<Scalar>::epsilon() * hi) break;
  }
  const Scalar theta = Scalar(0.5) * (lo + hi);
  if (!(theta > 0)) throw NumericalFailure("solve_theta: no root in (0, 1]");
  return theta;
}

/// Maximum number of gain increases tried within one iteration.
inline constexpr int kMaxGainInflations = 60;

/// Accelerated Bregman proximal gradient with gain adaptation (entropic
/// geometry). Produces a full-support point from a full-support start.
///
/// The acceptance test compares against the gain that produced the z-step;
/// the gain carried to the next iteration is that same value.
template <typename Scalar>
AbpgResult<Scalar> abpg_g(const Objective<Scalar>& obj, const AbpgConfig<Scalar>& cfg,
                          const SimplexVector<Scalar>& x_init) {
  cfg.validate();
  if (x_init.size() != obj.dimension()) throw DimensionMismatch("abpg_g: start point dimension");
  if (!x_init.has_full_support()) throw InputError("abpg_g: start point needs full support");

  const Scalar L = obj.smoothness();
  AbpgState<Scalar> s{x_init, x_init, x_init, Scalar(1), Scalar(1), 0};
  Scalar f_x = obj.value(s.x);
  if (!std::isfinite(f_x)) throw NumericalFailure("abpg_g: objective is not finite at start");

  AbpgResult<Scalar> out{x_init, {}, f_x, 0, false};
  Scalar gain_prev(1), theta_prev(1);

  for (int k = 0; k < cfg.max_iters; ++k) {
    Scalar gain = std::max(gain_prev / cfg.rho, cfg.g_min);
    int inflations = 0;
    for (;;) {
      const Scalar theta = k > 0 ? solve_theta(gain, gain_prev, theta_prev, cfg.gamma) : Scalar(1);
      SimplexVector<Scalar> y = convex_combination(s.x, s.z, theta);
      const auto fy = obj.evaluate(y);
      const Scalar step = Scalar(1) / (gain * std::pow(theta, cfg.gamma - 1) * L);
      SimplexVector<Scalar> z_next = entropic_mirror_step(s.z, fy.gradient, step);
      SimplexVector<Scalar> x_next = convex_combination(s.x, z_next, theta);

      const Scalar f_next = obj.value(x_next);
      if (!std::isfinite(f_next) || !std::isfinite(fy.value))
        throw NumericalFailure("abpg_g: objective became non-finite");
      const Scalar linear = fy.gradient.dot(x_next.values() - y.values());
      const Scalar bregman = kl_divergence(z_next, s.z);
      const Scalar model = fy.value + linear + gain * std::pow(theta, cfg.gamma) * L * bregman;
      // Rounding allowance for models that are exact (linear or zero losses).
      const Scalar slack = Scalar(64) * std::numeric_limits<Scalar>::epsilon() *
                           (std::abs(fy.value) + std::abs(f_next) + std::abs(linear));

      if (f_next <= model + slack) {
        out.trace.push_back({f_next, fy.value, linear, bregman, gain, theta, inflations});
        const Scalar change = std::abs(f_next - f_x);
        s.x = std::move(x_next);
        s.y = std::move(y);
        s.z = std::move(z_next);
        s.theta = theta;
        s.gain = gain;
        s.iter = k + 1;
        f_x = f_next;
        gain_prev = gain;
        theta_prev = theta;
        out.iterations = k + 1;
        if (change < cfg.eps1) {
          out.converged = true;
          out.x = s.x;
          return out;
        }
        break;
      }
      if (++inflations > kMaxGainInflations)
        throw LineSearchStall("abpg_g: acceptance test failed after " +
                              std::to_string(kMaxGainInflations) + " gain increases");
      gain *= cfg.rho;
    }
  }
  out.x = s.x;
  return out;
}

template <typename Scalar = double>
struct BpgResult {
  SimplexVector<Scalar> x;
  std::vector<Scalar> values;   ///< f(x^0), f(x^1), ...
  int iterations = 0;
  bool converged = false;
};

/// Plain entropic BPG (mirror descent) with fixed step alpha < 1/L. The
/// support of the iterates equals the support of x_init.
template <typename Scalar>
BpgResult<Scalar> bpg_plain(const Objective<Scalar>& obj, Scalar alpha,
                            const SimplexVector<Scalar>& x_init, Scalar eps, int max_iters) {
  if (x_init.size() != obj.dimension()) throw DimensionMismatch("bpg_plain: start point dimension");
  if (!(alpha > 0) || !(alpha * obj.smoothness() < Scalar(1)))
    throw InputError("bpg_plain: step must satisfy 0 < alpha < 1/L");
  if (!(eps > 0) || max_iters < 1) throw InputError("bpg_plain: invalid stopping rule");

  BpgResult<Scalar> out{x_init, {}, 0, false};
  auto fg = obj.evaluate(out.x);
  out.values.push_back(fg.value);
  for (int k = 0; k < max_iters; ++k) {
    SimplexVector<Scalar> next = entropic_mirror_step(out.x, fg.gradient, alpha);
    auto fg_next = obj.evaluate(next);
    if (!std::isfinite(fg_next.value)) throw NumericalFailure("bpg_plain: objective became non-finite");
    const Scalar decrease = fg.value - fg_next.value;
    out.x = std::move(next);
    fg = std::move(fg_next);
    out.values.push_back(fg.value);
    out.iterations = k + 1;
    if (std::abs(decrease) < eps) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace l0bpg
