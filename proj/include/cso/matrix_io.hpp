#pragma once

#include <Eigen/Dense>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "cso/conjugation.hpp"
#include "cso/errors.hpp"

// Plain-text complex matrices:
//
//   # comment
//   3
//   1,0  0,0  0,0
//   ...
//
// First non-comment line is the dimension n; then n rows of n "re,im" tokens
// separated by whitespace. A bare real "x" is accepted for "x,0".

namespace cso {

namespace detail {

inline Complex parse_complex_token(const std::string& tok) {
  const auto comma = tok.find(',');
  try {
    std::size_t used = 0;
    if (comma == std::string::npos) {
      const double re = std::stod(tok, &used);
      if (used != tok.size()) throw DomainError("bad matrix entry '" + tok + "'");
      return {re, 0.0};
    }
    const std::string a = tok.substr(0, comma), b = tok.substr(comma + 1);
    const double re = std::stod(a, &used);
    if (used != a.size()) throw DomainError("bad matrix entry '" + tok + "'");
    const double im = std::stod(b, &used);
    if (used != b.size()) throw DomainError("bad matrix entry '" + tok + "'");
    return {re, im};
  } catch (const std::logic_error&) {
    throw DomainError("bad matrix entry '" + tok + "'");
  }
}

inline bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

}  // namespace detail

inline Eigen::MatrixXcd read_complex_matrix(std::istream& in) {
  std::string line;
  if (!detail::next_content_line(in, line)) throw DomainError("matrix file: missing dimension header");
  long n = 0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> n) || (hs >> extra) || n < 1) throw DomainError("matrix file: bad dimension header '" + line + "'");
  }
  Eigen::MatrixXcd m(n, n);
  for (long r = 0; r < n; ++r) {
    if (!detail::next_content_line(in, line))
      throw DomainError("matrix file: expected " + std::to_string(n) + " rows, got " + std::to_string(r));
    std::istringstream rs(line);
    std::string tok;
    long c = 0;
    while (rs >> tok) {
      if (c >= n) throw DomainError("matrix file: row " + std::to_string(r + 1) + " has too many entries");
      m(r, c++) = detail::parse_complex_token(tok);
    }
    if (c != n) throw DomainError("matrix file: row " + std::to_string(r + 1) + " has " + std::to_string(c) + " entries");
  }
  if (detail::next_content_line(in, line)) throw DomainError("matrix file: trailing data after last row");
  return m;
}

inline Eigen::MatrixXcd load_complex_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open matrix file '" + path + "'");
  return read_complex_matrix(in);
}

inline void write_complex_matrix(std::ostream& out, const Eigen::MatrixXcd& m) {
  out << m.rows() << '\n';
  out.precision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << m(r, c).real() << ',' << m(r, c).imag();
    }
    out << '\n';
  }
}

}  // namespace cso
