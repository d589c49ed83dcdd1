#pragma once

#include <limits>

#include "l0bpg/simplex.hpp"

namespace l0bpg::harness {

/// Reconstruction SNR in dB, 10 log10(||x*||^2 / ||x* - xhat||^2). Returns
/// +infinity when the reconstruction is exact.
double rsnr(const Vector<double>& x_true, const Vector<double>& x_hat);

struct ConfusionCounts {
  Index tp = 0;
  Index fp = 0;
  Index fn = 0;
  Index tn = 0;

  Index total() const { return tp + fp + fn + tn; }
};

/// Support-recovery scores. A ratio whose denominator is zero is reported
/// as 0 and flagged in `undefined`.
struct ConfusionMetrics {
  ConfusionCounts counts;
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  bool undefined = false;
};

/// "Positive" means an entry that is exactly nonzero.
ConfusionMetrics confusion_metrics(const Vector<double>& x_true, const Vector<double>& x_hat);

}  // namespace l0bpg::harness
