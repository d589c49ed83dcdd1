// Writes a seeded stand-in for an OR-Library portfolio file: one market
// factor plus three sector factors, weekly-scale means and volatilities.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "l0bpg/harness/orlib.hpp"
#include "l0bpg/harness/rng.hpp"

using l0bpg::Index;
using l0bpg::Matrix;
using l0bpg::Vector;

int main(int argc, char** argv) {
  const Index n = argc > 1 ? std::atol(argv[1]) : 31;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
  if (n < 1) {
    std::cerr << "usage: make_port_surrogate [n] [seed]\n";
    return 1;
  }
  l0bpg::harness::Rng rng(seed);
  constexpr int kSectors = 3;

  Vector<double> mean(n), sd(n), market(n), sector_load(n);
  Vector<Index> sector(n);
  for (Index i = 0; i < n; ++i) {
    sd(i) = 0.025 + 0.035 * rng.uniform();
    // Higher volatility tends to carry higher mean, with noise.
    mean(i) = 0.0005 + 0.08 * (sd(i) - 0.025) + 0.002 * rng.normal();
    market(i) = 0.45 + 0.35 * rng.uniform();
    sector(i) = static_cast<Index>(rng.below(kSectors));
    sector_load(i) = 0.2 + 0.3 * rng.uniform();
  }
  // Correlation of standardized returns r_i = m_i M + s_i S_sector + e_i.
  Matrix<double> corr(n, n);
  for (Index i = 0; i < n; ++i) {
    const double var_i = market(i) * market(i) + sector_load(i) * sector_load(i);
    for (Index j = 0; j < n; ++j) {
      if (i == j) {
        corr(i, j) = 1.0;
        continue;
      }
      const double var_j = market(j) * market(j) + sector_load(j) * sector_load(j);
      double cov = market(i) * market(j);
      if (sector(i) == sector(j)) cov += sector_load(i) * sector_load(j);
      // Idiosyncratic variance tops each asset up to unit variance.
      corr(i, j) = cov / std::sqrt(std::max(var_i, 1.0) * std::max(var_j, 1.0));
    }
  }
  std::cout << l0bpg::harness::format_or_library(mean, sd, corr);
  return 0;
}
