#include "l0bpg/harness/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

#include "l0bpg/errors.hpp"

namespace l0bpg::harness {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (const auto& n : names) field(std::string_view(n));
  end_row();
}

CsvWriter& CsvWriter::field(std::string_view s) {
  if (!first_) out_ << ',';
  out_ << s;
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(std::string_view(format_double(v))); }

CsvWriter& CsvWriter::field(long long v) { return field(std::string_view(std::to_string(v))); }

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

Matrix<double> parse_matrix_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string line(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (line.empty() || line[0] == '#') continue;
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\r') c = ' ';
    std::vector<double> row;
    const char* p = line.c_str();
    for (;;) {
      while (*p == ' ' || *p == '\t') ++p;
      if (*p == '\0') break;
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) throw ParseError("matrix line " + std::to_string(line_no) + ": bad number");
      row.push_back(v);
      p = end;
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("matrix line " + std::to_string(line_no) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("matrix: no data");
  Matrix<double> M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) M(Index(i), Index(j)) = rows[i][j];
  return M;
}

std::string format_matrix_csv(const Matrix<double>& M) {
  std::ostringstream out;
  CsvWriter w(out);
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) w.field(M(i, j));
    w.end_row();
  }
  return out.str();
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint64_t get_le(std::string_view bytes, std::size_t at, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
  return v;
}

}  // namespace

std::string encode_matrix_binary(const Matrix<double>& M) {
  std::string out(kMatrixMagic.begin(), kMatrixMagic.end());
  put_u32(out, static_cast<std::uint32_t>(M.rows()));
  put_u32(out, static_cast<std::uint32_t>(M.cols()));
  out.reserve(out.size() + 8 * static_cast<std::size_t>(M.size()));
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      std::uint64_t bits;
      const double v = M(i, j);
      std::memcpy(&bits, &v, sizeof bits);
      for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
    }
  }
  return out;
}

Matrix<double> decode_matrix_binary(std::string_view bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMatrixMagic.data(), kMatrixMagic.size()) != 0)
    throw ParseError("binary matrix: bad magic");
  const auto rows = static_cast<Index>(get_le(bytes, 8, 4));
  const auto cols = static_cast<Index>(get_le(bytes, 12, 4));
  const std::size_t expected = 16 + 8 * static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (bytes.size() != expected)
    throw ParseError("binary matrix: expected " + std::to_string(expected) + " bytes, got " +
                     std::to_string(bytes.size()));
  Matrix<double> M(rows, cols);
  std::size_t at = 16;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j, at += 8) {
      const std::uint64_t bits = get_le(bytes, at, 8);
      double v;
      std::memcpy(&v, &bits, sizeof v);
      M(i, j) = v;
    }
  }
  return M;
}

Matrix<double> load_matrix(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() >= kMatrixMagic.size() &&
      std::memcmp(bytes.data(), kMatrixMagic.data(), kMatrixMagic.size()) == 0)
    return decode_matrix_binary(bytes);
  return parse_matrix_csv(bytes);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw InputError("failed writing " + path);
}

}  // namespace l0bpg::harness
