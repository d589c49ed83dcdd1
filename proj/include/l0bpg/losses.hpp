#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <optional>
#include <string>

#include "l0bpg/errors.hpp"
#include "l0bpg/simplex.hpp"

namespace l0bpg {

/// Observation model b ~ A x.
template <typename Scalar = double>
struct LinearModelData {
  Matrix<Scalar> A;
  Vector<Scalar> b;

  void validate() const {
    if (A.rows() != b.size())
      throw DimensionMismatch("linear model: A has " + std::to_string(A.rows()) +
                              " rows but b has " + std::to_string(b.size()) + " entries");
    if (A.cols() < 1) throw InputError("linear model: A has no columns");
    if (!A.allFinite() || !b.allFinite()) throw InputError("linear model: non-finite data");
  }
};

template <typename Scalar = double>
struct HuberParams {
  Scalar c = Scalar(1);

  void validate() const {
    if (!(c > Scalar(0)) || !std::isfinite(c)) throw InputError("huber cutoff must be positive");
  }
};

/// Mean-variance data; `eta` weighs risk against return.
template <typename Scalar = double>
struct PortfolioData {
  Vector<Scalar> mu;
  Matrix<Scalar> Sigma;
  Scalar eta = Scalar(0.5);

  void validate() const {
    const Index n = mu.size();
    if (n < 1) throw InputError("portfolio: no assets");
    if (Sigma.rows() != n || Sigma.cols() != n)
      throw DimensionMismatch("portfolio: Sigma must be " + std::to_string(n) + "x" +
                              std::to_string(n));
    if (!mu.allFinite() || !Sigma.allFinite()) throw InputError("portfolio: non-finite data");
    if (!(eta >= Scalar(0) && eta <= Scalar(1))) throw InputError("portfolio: eta outside [0,1]");
    const Scalar scale = std::max(Scalar(1), Sigma.cwiseAbs().maxCoeff());
    if ((Sigma - Sigma.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-8) * scale)
      throw InputError("portfolio: Sigma is not symmetric");
    const Matrix<Scalar> sym = Scalar(0.5) * (Sigma + Sigma.transpose());
    const Scalar lowest = Eigen::SelfAdjointEigenSolver<Matrix<Scalar>>(sym, Eigen::EigenvaluesOnly)
                              .eigenvalues()
                              .minCoeff();
    if (lowest < Scalar(-1e-8))
      throw InputError("portfolio: Sigma has eigenvalue " + std::to_string(lowest) +
                       " below -1e-8");
  }
};

namespace detail {

template <typename Scalar>
void check_dims(Index model_cols, const SimplexVector<Scalar>& x, const char* who) {
  if (model_cols != x.size())
    throw DimensionMismatch(std::string(who) + ": model has " + std::to_string(model_cols) +
                            " columns but x has " + std::to_string(x.size()) + " entries");
}

/// A x accumulated over supp(x) only.
template <typename Scalar>
Vector<Scalar> apply_on_support(const Matrix<Scalar>& A, const SimplexVector<Scalar>& x) {
  const Index nnz = x.support_size();
  if (2 * nnz >= x.size()) return A * x.values();
  Vector<Scalar> Ax = Vector<Scalar>::Zero(A.rows());
  for (Index j = 0; j < x.size(); ++j) {
    if (x(j) > Scalar(0)) Ax.noalias() += x(j) * A.col(j);
  }
  return Ax;
}

template <typename Scalar>
Scalar huber_phi(Scalar e, Scalar c) {
  const Scalar a = std::abs(e);
  return a <= c ? Scalar(0.5) * e * e : c * a - Scalar(0.5) * c * c;
}

template <typename Scalar>
Scalar huber_dphi(Scalar e, Scalar c) {
  if (e > c) return c;
  if (e < -c) return -c;
  return e;
}

}  // namespace detail

/// 1/2 ||A x - b||^2
template <typename Scalar>
Scalar eval_quadratic(const LinearModelData<Scalar>& d, const SimplexVector<Scalar>& x) {
  detail::check_dims(d.A.cols(), x, "eval_quadratic");
  return Scalar(0.5) * (detail::apply_on_support(d.A, x) - d.b).squaredNorm();
}

/// A^T (A x - b)
template <typename Scalar>
Vector<Scalar> grad_quadratic(const LinearModelData<Scalar>& d, const SimplexVector<Scalar>& x) {
  detail::check_dims(d.A.cols(), x, "grad_quadratic");
  const Vector<Scalar> r = detail::apply_on_support(d.A, x) - d.b;
  return d.A.transpose() * r;
}

/// sum_i phi(b_i - a_i^T x) with the Huber penalty phi of cutoff c.
template <typename Scalar>
Scalar eval_huber(const LinearModelData<Scalar>& d, const HuberParams<Scalar>& p,
                  const SimplexVector<Scalar>& x) {
  detail::check_dims(d.A.cols(), x, "eval_huber");
  const Vector<Scalar> e = d.b - detail::apply_on_support(d.A, x);
  Scalar total(0);
  for (Index i = 0; i < e.size(); ++i) total += detail::huber_phi(e(i), p.c);
  return total;
}

/// -A^T phi'(b - A x)
template <typename Scalar>
Vector<Scalar> grad_huber(const LinearModelData<Scalar>& d, const HuberParams<Scalar>& p,
                          const SimplexVector<Scalar>& x) {
  detail::check_dims(d.A.cols(), x, "grad_huber");
  Vector<Scalar> e = d.b - detail::apply_on_support(d.A, x);
  for (Index i = 0; i < e.size(); ++i) e(i) = detail::huber_dphi(e(i), p.c);
  return -(d.A.transpose() * e);
}

/// 1/2 eta x^T Sigma x - (1 - eta) mu^T x
template <typename Scalar>
Scalar eval_portfolio(const PortfolioData<Scalar>& d, const SimplexVector<Scalar>& x) {
  detail::check_dims(d.mu.size(), x, "eval_portfolio");
  const auto& v = x.values();
  return Scalar(0.5) * d.eta * v.dot(d.Sigma * v) - (Scalar(1) - d.eta) * d.mu.dot(v);
}

template <typename Scalar>
Vector<Scalar> grad_portfolio(const PortfolioData<Scalar>& d, const SimplexVector<Scalar>& x) {
  detail::check_dims(d.mu.size(), x, "grad_portfolio");
  return d.eta * (d.Sigma * x.values()) - (Scalar(1) - d.eta) * d.mu;
}

enum class LossKind { quadratic, huber, portfolio };

inline const char* to_string(LossKind k) {
  switch (k) {
    case LossKind::quadratic: return "quadratic";
    case LossKind::huber: return "huber";
    case LossKind::portfolio: return "portfolio";
  }
  return "unknown";
}

/// Smallest smoothness constant handed out, so that 1/L stays finite for
/// losses with no curvature (zero data, purely linear portfolios).
template <typename Scalar>
inline constexpr Scalar kMinSmoothness = Scalar(1e-12);

template <typename Scalar>
struct ValueAndGradient {
  Scalar value;
  Vector<Scalar> gradient;
};

/// A loss over the simplex together with its smoothness constant L relative
/// to the negative entropy. Immutable; copies share the underlying data.
template <typename Scalar = double>
class Objective {
public:
  static Objective quadratic(LinearModelData<Scalar> data) {
    data.validate();
    Objective o(LossKind::quadratic);
    o.linear_ = std::make_shared<const LinearModelData<Scalar>>(std::move(data));
    o.bound_ = o.compute_bound();
    return o;
  }

  static Objective huber(LinearModelData<Scalar> data, HuberParams<Scalar> params) {
    data.validate();
    params.validate();
    Objective o(LossKind::huber);
    o.linear_ = std::make_shared<const LinearModelData<Scalar>>(std::move(data));
    o.huber_ = params;
    o.bound_ = o.compute_bound();
    return o;
  }

  static Objective portfolio(PortfolioData<Scalar> data) {
    data.validate();
    Objective o(LossKind::portfolio);
    o.portfolio_ = std::make_shared<const PortfolioData<Scalar>>(std::move(data));
    o.bound_ = o.compute_bound();
    return o;
  }

  /// Same loss with a user-chosen smoothness constant instead of the bound.
  Objective with_smoothness(Scalar L) const {
    if (!(L > Scalar(0)) || !std::isfinite(L)) throw InputError("smoothness must be positive");
    Objective o = *this;
    o.override_ = L;
    return o;
  }

  LossKind kind() const { return kind_; }

  Index dimension() const {
    return kind_ == LossKind::portfolio ? portfolio_->mu.size() : linear_->A.cols();
  }

  /// The constant the solvers use: the user override if set, else the bound.
  Scalar smoothness() const { return override_.value_or(bound_); }
  Scalar smoothness_bound() const { return bound_; }

  const LinearModelData<Scalar>& linear_data() const {
    if (!linear_) throw InputError("objective has no linear model");
    return *linear_;
  }
  const PortfolioData<Scalar>& portfolio_data() const {
    if (!portfolio_) throw InputError("objective has no portfolio data");
    return *portfolio_;
  }
  const HuberParams<Scalar>& huber_params() const { return huber_; }

  Scalar value(const SimplexVector<Scalar>& x) const {
    switch (kind_) {
      case LossKind::quadratic: return eval_quadratic(*linear_, x);
      case LossKind::huber: return eval_huber(*linear_, huber_, x);
      case LossKind::portfolio: return eval_portfolio(*portfolio_, x);
    }
    return Scalar(0);
  }

  Vector<Scalar> gradient(const SimplexVector<Scalar>& x) const {
    switch (kind_) {
      case LossKind::quadratic: return grad_quadratic(*linear_, x);
      case LossKind::huber: return grad_huber(*linear_, huber_, x);
      case LossKind::portfolio: return grad_portfolio(*portfolio_, x);
    }
    return {};
  }

  /// Value and gradient from a single product with the data matrix.
  ValueAndGradient<Scalar> evaluate(const SimplexVector<Scalar>& x) const {
    detail::check_dims(dimension(), x, "Objective::evaluate");
    switch (kind_) {
      case LossKind::quadratic: {
        const Vector<Scalar> r = detail::apply_on_support(linear_->A, x) - linear_->b;
        return {Scalar(0.5) * r.squaredNorm(), linear_->A.transpose() * r};
      }
      case LossKind::huber: {
        Vector<Scalar> e = linear_->b - detail::apply_on_support(linear_->A, x);
        Scalar total(0);
        for (Index i = 0; i < e.size(); ++i) {
          total += detail::huber_phi(e(i), huber_.c);
          e(i) = detail::huber_dphi(e(i), huber_.c);
        }
        return {total, -(linear_->A.transpose() * e)};
      }
      case LossKind::portfolio: {
        const auto& d = *portfolio_;
        const Vector<Scalar> Sx = d.Sigma * x.values();
        return {Scalar(0.5) * d.eta * x.values().dot(Sx) - (Scalar(1) - d.eta) * d.mu.dot(x.values()),
                d.eta * Sx - (Scalar(1) - d.eta) * d.mu};
      }
    }
    return {};
  }

private:
  explicit Objective(LossKind kind) : kind_(kind) {}

  Scalar compute_bound() const {
    Scalar raw(0);
    if (kind_ == LossKind::portfolio) {
      raw = portfolio_->eta * portfolio_->Sigma.cwiseAbs().maxCoeff();
    } else {
      raw = (linear_->A.transpose() * linear_->A).cwiseAbs().maxCoeff();
    }
    return std::max(raw, kMinSmoothness<Scalar>);
  }

  LossKind kind_;
  std::shared_ptr<const LinearModelData<Scalar>> linear_;
  std::shared_ptr<const PortfolioData<Scalar>> portfolio_;
  HuberParams<Scalar> huber_{};
  Scalar bound_{1};
  std::optional<Scalar> override_;
};

/// max_ij |(A^T A)_ij| for the linear-model losses, eta * max_ij |Sigma_ij|
/// for the portfolio loss (floored at kMinSmoothness).
template <typename Scalar>
Scalar relative_smoothness_bound(const Objective<Scalar>& obj) {
  return obj.smoothness_bound();
}

}  // namespace l0bpg
