#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "l0bpg/simplex.hpp"

namespace l0bpg::harness {

/// Shortest text that reads back to the same double (17 significant digits).
std::string format_double(double v);

/// Minimal CSV writer; fields are written as given, rows end with '\n'.
class CsvWriter {
public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void header(const std::vector<std::string>& names);
  CsvWriter& field(std::string_view s);
  CsvWriter& field(double v);
  CsvWriter& field(long long v);
  CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(std::size_t v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(long v) { return field(static_cast<long long>(v)); }
  void end_row();

private:
  std::ostream& out_;
  bool first_ = true;
};

/// Dense matrix as comma- or whitespace-separated rows of numbers.
Matrix<double> parse_matrix_csv(std::string_view text);
std::string format_matrix_csv(const Matrix<double>& M);

/// Binary matrix container: 8-byte magic "L0BPGMAT", uint32 rows, uint32
/// cols (little endian), then rows*cols little-endian float64 in row-major order.
inline constexpr std::array<char, 8> kMatrixMagic{'L', '0', 'B', 'P', 'G', 'M', 'A', 'T'};
std::string encode_matrix_binary(const Matrix<double>& M);
Matrix<double> decode_matrix_binary(std::string_view bytes);

/// Reads a matrix file: binary when it starts with the magic, CSV otherwise.
Matrix<double> load_matrix(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace l0bpg::harness
