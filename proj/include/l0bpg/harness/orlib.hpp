#pragma once

#include <string>
#include <string_view>

#include "l0bpg/losses.hpp"

namespace l0bpg::harness {

/// Parses an OR-Library portfolio file ("port1.txt" ... "port5.txt"):
///
///   N
///   mean_1 stddev_1
///   ...
///   mean_N stddev_N
///   i j corr_ij        (1-based, every pair with i <= j)
///
/// Sigma_ij = corr_ij * sd_i * sd_j, mirrored across the diagonal. Throws
/// ParseError on malformed lines, out-of-range indices, or missing pairs.
/// The returned eta is left at 0.5; callers set it per frontier point.
PortfolioData<double> parse_or_library(std::string_view text);

PortfolioData<double> load_or_library(const std::string& path);

/// Writes data in the same format (17 significant digits).
std::string format_or_library(const Vector<double>& mean, const Vector<double>& stddev,
                              const Matrix<double>& corr);

}  // namespace l0bpg::harness
