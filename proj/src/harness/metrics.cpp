#include "l0bpg/harness/metrics.hpp"

#include <cmath>

#include "l0bpg/errors.hpp"

namespace l0bpg::harness {

double rsnr(const Vector<double>& x_true, const Vector<double>& x_hat) {
  if (x_true.size() != x_hat.size()) throw DimensionMismatch("rsnr: dimension mismatch");
  const double err = (x_true - x_hat).squaredNorm();
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(x_true.squaredNorm() / err);
}

ConfusionMetrics confusion_metrics(const Vector<double>& x_true, const Vector<double>& x_hat) {
  if (x_true.size() != x_hat.size()) throw DimensionMismatch("confusion_metrics: dimension mismatch");
  ConfusionMetrics out;
  auto& c = out.counts;
  for (Index i = 0; i < x_true.size(); ++i) {
    const bool actual = x_true(i) != 0.0;
    const bool predicted = x_hat(i) != 0.0;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  auto ratio = [&](double num, double den) {
    if (den == 0.0) {
      out.undefined = true;
      return 0.0;
    }
    return num / den;
  };
  out.accuracy = ratio(double(c.tp + c.tn), double(c.total()));
  out.precision = ratio(double(c.tp), double(c.tp + c.fp));
  out.recall = ratio(double(c.tp), double(c.tp + c.fn));
  out.f1 = ratio(2.0 * out.precision * out.recall, out.precision + out.recall);
  return out;
}

}  // namespace l0bpg::harness
