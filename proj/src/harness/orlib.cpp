#include "l0bpg/harness/orlib.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <string>
#include <vector>

#include "l0bpg/errors.hpp"
#include "l0bpg/harness/io.hpp"

namespace l0bpg::harness {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double to_double(std::string_view tok, std::size_t line_no) {
  std::string s(tok);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v))
    throw ParseError("or-library line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

long to_index(std::string_view tok, std::size_t line_no) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError("or-library line " + std::to_string(line_no) + ": bad integer '" +
                     std::string(tok) + "'");
  return v;
}

}  // namespace

PortfolioData<double> parse_or_library(std::string_view text) {
  std::vector<std::pair<std::size_t, std::vector<std::string_view>>> lines;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    auto toks = split_ws(line);
    if (!toks.empty()) lines.emplace_back(line_no, std::move(toks));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (lines.empty()) throw ParseError("or-library: empty input");

  auto it = lines.begin();
  if (it->second.size() != 1) throw ParseError("or-library line 1: expected the asset count");
  const long n = to_index(it->second[0], it->first);
  if (n < 1) throw ParseError("or-library: asset count must be positive");
  ++it;

  Vector<double> mu(n), sd(n);
  for (long i = 0; i < n; ++i, ++it) {
    if (it == lines.end()) throw ParseError("or-library: expected " + std::to_string(n) + " asset lines");
    if (it->second.size() != 2)
      throw ParseError("or-library line " + std::to_string(it->first) + ": expected 'mean stddev'");
    mu(i) = to_double(it->second[0], it->first);
    sd(i) = to_double(it->second[1], it->first);
    if (sd(i) < 0.0)
      throw ParseError("or-library line " + std::to_string(it->first) + ": negative stddev");
  }

  Matrix<double> corr = Matrix<double>::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  for (; it != lines.end(); ++it) {
    if (it->second.size() != 3)
      throw ParseError("or-library line " + std::to_string(it->first) + ": expected 'i j corr'");
    const long i = to_index(it->second[0], it->first);
    const long j = to_index(it->second[1], it->first);
    if (i < 1 || j < 1 || i > n || j > n)
      throw ParseError("or-library line " + std::to_string(it->first) + ": index out of range");
    const double c = to_double(it->second[2], it->first);
    if (!std::isnan(corr(i - 1, j - 1)))
      throw ParseError("or-library line " + std::to_string(it->first) + ": duplicate pair");
    corr(i - 1, j - 1) = c;
    corr(j - 1, i - 1) = c;
  }

  Matrix<double> Sigma(n, n);
  for (long i = 0; i < n; ++i) {
    Sigma(i, i) = sd(i) * sd(i);
    for (long j = i + 1; j < n; ++j) {
      if (std::isnan(corr(i, j)))
        throw ParseError("or-library: missing correlation for pair (" + std::to_string(i + 1) + ", " +
                         std::to_string(j + 1) + ")");
      Sigma(i, j) = Sigma(j, i) = corr(i, j) * sd(i) * sd(j);
    }
  }
  return PortfolioData<double>{std::move(mu), std::move(Sigma), 0.5};
}

PortfolioData<double> load_or_library(const std::string& path) {
  return parse_or_library(read_file(path));
}

std::string format_or_library(const Vector<double>& mean, const Vector<double>& stddev,
                              const Matrix<double>& corr) {
  const Index n = mean.size();
  std::string out = std::to_string(n) + "\n";
  for (Index i = 0; i < n; ++i)
    out += format_double(mean(i)) + " " + format_double(stddev(i)) + "\n";
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j)
      out += std::to_string(i + 1) + " " + std::to_string(j + 1) + " " + format_double(corr(i, j)) + "\n";
  return out;
}

}  // namespace l0bpg::harness
