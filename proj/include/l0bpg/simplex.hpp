#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "l0bpg/errors.hpp"

namespace l0bpg {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Absolute tolerance on |sum - 1| accepted for a point of the probability simplex.
template <typename Scalar>
inline constexpr Scalar kSimplexSumTolerance = Scalar(1e-12);

/// A point of the probability simplex {x >= 0, sum x = 1}.
///
/// The support is the set of indices holding a value strictly greater than
/// zero; entries outside it are stored as exact 0.0. The support is derived
/// from the values on every query, so it can never go stale.
template <typename Scalar = double>
class SimplexVector {
public:
  using VectorType = Vector<Scalar>;

  /// Validates `values`; throws InputError if it is not a simplex point.
  explicit SimplexVector(VectorType values) : values_(std::move(values)) {
    validate();
  }

  static SimplexVector uniform(Index n) {
    if (n < 1) throw InputError("simplex dimension must be positive");
    return SimplexVector(VectorType::Constant(n, Scalar(1) / Scalar(n)));
  }

  static SimplexVector vertex(Index n, Index i) {
    if (n < 1 || i < 0 || i >= n) throw InputError("vertex index out of range");
    VectorType v = VectorType::Zero(n);
    v(i) = Scalar(1);
    return SimplexVector(std::move(v));
  }

  /// Divides nonnegative weights by their computed sum. Subnormal results
  /// are flushed to exact zero.
  static SimplexVector normalized(VectorType weights) {
    if (weights.size() < 1) throw InputError("simplex dimension must be positive");
    for (Index i = 0; i < weights.size(); ++i) {
      if (!std::isfinite(weights(i)) || weights(i) < Scalar(0))
        throw InputError("weights must be finite and nonnegative");
    }
    const Scalar total = weights.sum();
    if (!(total > Scalar(0))) throw InputError("weights sum to zero");
    weights /= total;
    for (Index i = 0; i < weights.size(); ++i) {
      if (weights(i) < std::numeric_limits<Scalar>::min()) weights(i) = Scalar(0);
    }
    return SimplexVector(std::move(weights));
  }

  Index size() const { return values_.size(); }
  const VectorType& values() const { return values_; }
  Scalar operator()(Index i) const { return values_(i); }

  std::vector<Index> support() const {
    std::vector<Index> idx;
    for (Index i = 0; i < values_.size(); ++i) {
      if (values_(i) > Scalar(0)) idx.push_back(i);
    }
    return idx;
  }

  Index support_size() const { return (values_.array() > Scalar(0)).count(); }
  bool has_full_support() const { return support_size() == size(); }

  bool operator==(const SimplexVector& other) const { return values_ == other.values_; }

private:
  void validate() const {
    if (values_.size() < 1) throw InputError("simplex dimension must be positive");
    for (Index i = 0; i < values_.size(); ++i) {
      const Scalar v = values_(i);
      if (!std::isfinite(v) || v < Scalar(0))
        throw InputError("simplex entry " + std::to_string(i) + " is negative or not finite");
    }
    const Scalar total = values_.sum();
    if (std::abs(total - Scalar(1)) > kSimplexSumTolerance<Scalar>)
      throw InputError("simplex entries do not sum to one");
  }

  VectorType values_;
};

/// h(x) = sum x_i log x_i with 0 log 0 = 0.
template <typename Scalar>
Scalar negative_entropy(const SimplexVector<Scalar>& x) {
  Scalar h(0);
  for (Index i = 0; i < x.size(); ++i) {
    const Scalar v = x(i);
    if (v > Scalar(0)) h += v * std::log(v);
  }
  return h;
}

/// Bregman divergence of the negative entropy (generalized KL divergence),
/// summed over supp(y). Throws SupportViolation when supp(x) is not
/// contained in supp(y).
template <typename Scalar>
Scalar kl_divergence(const SimplexVector<Scalar>& x, const SimplexVector<Scalar>& y) {
  if (x.size() != y.size()) throw DimensionMismatch("kl_divergence: dimension mismatch");
  Scalar d(0);
  for (Index i = 0; i < x.size(); ++i) {
    const Scalar xi = x(i);
    const Scalar yi = y(i);
    if (yi == Scalar(0)) {
      if (xi > Scalar(0))
        throw SupportViolation("kl_divergence: x has mass at index " + std::to_string(i) +
                               " outside supp(y)");
      continue;
    }
    if (xi > Scalar(0)) d += xi * std::log(xi / yi);
    d += yi - xi;
  }
  // Rounding can leave a tiny negative value for x ~ y.
  return std::max(d, Scalar(0));
}

template <typename Scalar = double>
struct BregmanStepInput {
  SimplexVector<Scalar> current;
  Vector<Scalar> gradient;
  Scalar step;
};

/// Entropic mirror step restricted to supp(x):
///   y_i = x_i exp(-step g_i) / sum_j x_j exp(-step g_j).
///
/// Weights are formed in the log domain and shifted by their maximum. Entries
/// that would underflow are held at the smallest normal value, so the output
/// support equals the input support.
template <typename Scalar, typename Derived>
SimplexVector<Scalar> entropic_mirror_step(const SimplexVector<Scalar>& x,
                                           const Eigen::MatrixBase<Derived>& gradient,
                                           Scalar step) {
  const Index n = x.size();
  if (gradient.size() != n) throw DimensionMismatch("entropic_mirror_step: gradient size");
  if (!(step > Scalar(0)) || !std::isfinite(step))
    throw InputError("entropic_mirror_step: step must be positive and finite");

  Vector<Scalar> logw = Vector<Scalar>::Constant(n, -std::numeric_limits<Scalar>::infinity());
  Scalar shift = -std::numeric_limits<Scalar>::infinity();
  for (Index i = 0; i < n; ++i) {
    if (!(x(i) > Scalar(0))) continue;
    if (!std::isfinite(gradient(i)))
      throw NumericalFailure("entropic_mirror_step: non-finite gradient entry");
    logw(i) = std::log(x(i)) - step * gradient(i);
    if (!std::isfinite(logw(i)))
      throw NumericalFailure("entropic_mirror_step: scaled gradient overflows");
    shift = std::max(shift, logw(i));
  }

  constexpr Scalar tiny = std::numeric_limits<Scalar>::min();
  Vector<Scalar> w = Vector<Scalar>::Zero(n);
  Scalar total(0);
  for (Index i = 0; i < n; ++i) {
    if (!(x(i) > Scalar(0))) continue;
    w(i) = std::exp(logw(i) - shift);
    total += w(i);
  }
  if (!(total > Scalar(0))) throw NumericalFailure("entropic_mirror_step: all weights underflow");

  for (Index i = 0; i < n; ++i) {
    if (!(x(i) > Scalar(0))) continue;
    w(i) = std::max(w(i) / total, tiny);
  }
  return SimplexVector<Scalar>(std::move(w));
}

template <typename Scalar>
SimplexVector<Scalar> entropic_mirror_step(const BregmanStepInput<Scalar>& in) {
  return entropic_mirror_step(in.current, in.gradient, in.step);
}

/// (1 - t) x + t z, renormalized by its computed sum.
template <typename Scalar>
SimplexVector<Scalar> convex_combination(const SimplexVector<Scalar>& x,
                                         const SimplexVector<Scalar>& z, Scalar t) {
  if (x.size() != z.size()) throw DimensionMismatch("convex_combination: dimension mismatch");
  Vector<Scalar> v = (Scalar(1) - t) * x.values() + t * z.values();
  v /= v.sum();
  return SimplexVector<Scalar>(std::move(v));
}

}  // namespace l0bpg
