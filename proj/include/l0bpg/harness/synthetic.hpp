#pragma once

#include <cstdint>
#include <limits>

#include "l0bpg/losses.hpp"
#include "l0bpg/simplex.hpp"

namespace l0bpg::harness {

enum class NoiseKind { gaussian, gaussian_plus_impulse };

/// Parameters of b = A x* + n with sparse x* on the simplex.
struct SyntheticSpec {
  Index m = 200;
  Index n = 400;
  double density = 0.02;      ///< fraction of nonzeros in x*
  double snr_db = 50.0;       ///< +infinity means no noise
  NoiseKind noise = NoiseKind::gaussian;
  double impulse_density = 0.0;
  double impulse_amplitude_factor = 20.0;   ///< impulse value is factor * ||n_G||_inf
  std::uint64_t seed = 1;

  void validate() const;
  /// ceil(density * n): number of nonzeros of x*.
  Index nonzeros() const;
};

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

struct SyntheticInstance {
  LinearModelData<double> data;
  SimplexVector<double> x_true;
  Vector<double> gaussian_noise;   ///< n_G (zero when snr_db is infinite)
  Vector<double> clean;            ///< A x*
};

/// A iid N(0,1); x* = |xbar| / ||xbar||_1 where xbar has ceil(density n)
/// N(0,1) entries on a uniformly drawn support; Gaussian noise rescaled to
/// the exact requested SNR; optional impulse overwrite of b. Each component
/// draws from its own stream derived from spec.seed.
SyntheticInstance generate_synthetic(const SyntheticSpec& spec);

/// Overwrites floor(density * m) entries of b, chosen uniformly without
/// replacement: the first floor(count/2) drawn become 0, the rest become
/// amplitude_factor * ||ref_gaussian||_inf.
Vector<double> add_impulse_noise(const Vector<double>& b, const Vector<double>& ref_gaussian,
                                 double density, std::uint64_t seed,
                                 double amplitude_factor = 20.0);

/// 10 log10(||signal||^2 / ||noise||^2).
double measured_snr_db(const Vector<double>& signal, const Vector<double>& noise);

}  // namespace l0bpg::harness
