#include "l0bpg/harness/synthetic.hpp"

#include <cmath>
#include <string>

#include "l0bpg/errors.hpp"
#include "l0bpg/harness/rng.hpp"

namespace l0bpg::harness {

void SyntheticSpec::validate() const {
  if (m < 1 || n < 1) throw InputError("synthetic: m and n must be positive");
  if (!(density > 0.0 && density <= 1.0)) throw InputError("synthetic: density must lie in (0, 1]");
  if (density * static_cast<double>(n) < 1.0)
    throw InputError("synthetic: density * n < 1 leaves x* empty");
  if (std::isnan(snr_db) || snr_db == -kNoNoise) throw InputError("synthetic: invalid SNR");
  if (noise == NoiseKind::gaussian_plus_impulse) {
    if (!(impulse_density >= 0.0 && impulse_density <= 1.0))
      throw InputError("synthetic: impulse density must lie in [0, 1]");
    if (!(impulse_amplitude_factor >= 0.0)) throw InputError("synthetic: invalid impulse amplitude");
  }
}

Index SyntheticSpec::nonzeros() const {
  const double raw = density * static_cast<double>(n);
  // Guard against 0.02 * 400 = 8.000000000000002 rounding up to 9.
  return static_cast<Index>(std::ceil(raw - 1e-9 * raw));
}

double measured_snr_db(const Vector<double>& signal, const Vector<double>& noise) {
  return 10.0 * std::log10(signal.squaredNorm() / noise.squaredNorm());
}

SyntheticInstance generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const Index m = spec.m, n = spec.n;

  Matrix<double> A(m, n);
  {
    Rng rng(derive_seed(spec.seed, Stream::matrix));
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) A(i, j) = rng.normal();
  }

  Vector<double> xbar = Vector<double>::Zero(n);
  {
    Rng support_rng(derive_seed(spec.seed, Stream::support));
    Rng value_rng(derive_seed(spec.seed, Stream::values));
    const auto idx = support_rng.sample_without_replacement(static_cast<std::size_t>(n),
                                                            static_cast<std::size_t>(spec.nonzeros()));
    for (std::size_t i : idx) xbar(static_cast<Index>(i)) = std::abs(value_rng.normal());
  }
  SimplexVector<double> x_true = SimplexVector<double>::normalized(std::move(xbar));

  Vector<double> clean = A * x_true.values();
  Vector<double> noise = Vector<double>::Zero(m);
  if (std::isfinite(spec.snr_db)) {
    Rng rng(derive_seed(spec.seed, Stream::noise));
    for (Index i = 0; i < m; ++i) noise(i) = rng.normal();
    const double target = clean.squaredNorm() / std::pow(10.0, spec.snr_db / 10.0);
    noise *= std::sqrt(target / noise.squaredNorm());
  }

  Vector<double> b = clean + noise;
  if (spec.noise == NoiseKind::gaussian_plus_impulse) {
    b = add_impulse_noise(b, noise, spec.impulse_density, derive_seed(spec.seed, Stream::impulse),
                          spec.impulse_amplitude_factor);
  }
  return {LinearModelData<double>{std::move(A), std::move(b)}, std::move(x_true), std::move(noise),
          std::move(clean)};
}

Vector<double> add_impulse_noise(const Vector<double>& b, const Vector<double>& ref_gaussian,
                                 double density, std::uint64_t seed, double amplitude_factor) {
  if (!(density >= 0.0 && density <= 1.0)) throw InputError("impulse noise: density must lie in [0, 1]");
  const std::size_t m = static_cast<std::size_t>(b.size());
  const auto count = static_cast<std::size_t>(std::floor(density * static_cast<double>(m) + 1e-9));
  const double amplitude =
      amplitude_factor * (ref_gaussian.size() > 0 ? ref_gaussian.cwiseAbs().maxCoeff() : 0.0);

  Vector<double> out = b;
  Rng rng(seed);
  const auto idx = rng.sample_without_replacement(m, std::min(count, m));
  const std::size_t zeros = idx.size() / 2;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out(static_cast<Index>(idx[k])) = k < zeros ? 0.0 : amplitude;
  }
  return out;
}

}  // namespace l0bpg::harness
